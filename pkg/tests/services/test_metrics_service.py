"""
평가 지표 서비스 테스트
"""

import numpy as np
import pytest

from adaptive_mlc.exception.model.model_exception import MetricsShapeError
from adaptive_mlc.models.tensors import ConfusionCounts
from adaptive_mlc.services import metrics_service

PRED = np.array([[1, 0, 1], [0, 1, 0]])
TARGET = np.array([[1, 1, 0], [0, 1, 0]])


@pytest.fixture
def example_counts():
    return metrics_service.accumulate(ConfusionCounts.empty(3), PRED, TARGET)


class TestAccumulate:
    def test_hand_counts(self, example_counts):
        np.testing.assert_array_equal(example_counts.tp, [1, 1, 0])
        np.testing.assert_array_equal(example_counts.fp, [0, 0, 1])
        np.testing.assert_array_equal(example_counts.fn, [0, 1, 0])
        assert example_counts.total_predicted_positive == 3
        assert example_counts.total_cells == 6

    def test_perfect_predictions(self):
        counts = metrics_service.accumulate(ConfusionCounts.empty(3), TARGET, TARGET)
        assert not counts.fp.any() and not counts.fn.any()

    def test_all_zero_predictions(self):
        counts = metrics_service.accumulate(ConfusionCounts.empty(3), np.zeros((2, 3)), TARGET)
        assert not counts.tp.any()
        np.testing.assert_array_equal(counts.fn, TARGET.sum(axis=0))

    def test_does_not_mutate_input(self):
        empty = ConfusionCounts.empty(3)
        metrics_service.accumulate(empty, PRED, TARGET)
        assert not empty.tp.any()

    def test_shape_mismatch(self):
        with pytest.raises(MetricsShapeError):
            metrics_service.accumulate(ConfusionCounts.empty(3), np.zeros((2, 3)), np.zeros((3, 3)))

    def test_label_count_mismatch(self):
        with pytest.raises(MetricsShapeError):
            metrics_service.accumulate(ConfusionCounts.empty(4), PRED, TARGET)

    def test_streaming_equals_single_pass(self, rng):
        """배치를 어떻게 나눠 누적해도 한 번에 누적한 결과와 같아야 함"""
        pred = rng.uniform(size=(37, 6)) < 0.3
        target = rng.uniform(size=(37, 6)) < 0.3
        whole = metrics_service.accumulate(ConfusionCounts.empty(6), pred, target)

        streamed = ConfusionCounts.empty(6)
        for start in range(0, 37, 5):
            streamed = metrics_service.accumulate(streamed, pred[start:start + 5], target[start:start + 5])

        np.testing.assert_array_equal(streamed.tp, whole.tp)
        np.testing.assert_array_equal(streamed.fp, whole.fp)
        np.testing.assert_array_equal(streamed.fn, whole.fn)
        assert metrics_service.macro_f1(streamed) == metrics_service.macro_f1(whole)


class TestMerge:
    def test_merge_equals_joint_accumulate(self, rng):
        pred = rng.uniform(size=(20, 4)) < 0.5
        target = rng.uniform(size=(20, 4)) < 0.5
        left = metrics_service.accumulate(ConfusionCounts.empty(4), pred[:7], target[:7])
        right = metrics_service.accumulate(ConfusionCounts.empty(4), pred[7:], target[7:])
        whole = metrics_service.accumulate(ConfusionCounts.empty(4), pred, target)

        for merged in (metrics_service.merge(left, right), metrics_service.merge(right, left)):
            np.testing.assert_array_equal(merged.tp, whole.tp)
            assert merged.total_cells == whole.total_cells
            assert merged.total_predicted_positive == whole.total_predicted_positive

    def test_label_count_mismatch(self):
        with pytest.raises(MetricsShapeError):
            metrics_service.merge(ConfusionCounts.empty(2), ConfusionCounts.empty(3))


class TestF1:
    def test_macro_hand_value(self, example_counts):
        """per-label F1 = [1, 2/3, 0] → macro 5/9"""
        np.testing.assert_allclose(metrics_service.per_label_f1(example_counts), [1.0, 2 / 3, 0.0], atol=1e-9)
        assert metrics_service.macro_f1(example_counts) == pytest.approx(5 / 9, abs=1e-9)

    def test_micro_hand_value(self, example_counts):
        """Σtp=2, Σfp=1, Σfn=1 → 4/6"""
        assert metrics_service.micro_f1(example_counts) == pytest.approx(2 / 3, abs=1e-9)

    def test_perfect(self):
        """모든 레이블이 한 번 이상 등장하는 정답을 그대로 예측하면 1"""
        target = np.array([[1, 1, 0], [0, 1, 1]])
        counts = metrics_service.accumulate(ConfusionCounts.empty(3), target, target)
        assert metrics_service.macro_f1(counts) == 1.0
        assert metrics_service.micro_f1(counts) == 1.0

    def test_absent_label_contributes_zero(self):
        """한 번도 등장/예측되지 않은 레이블은 0/0 := 0 으로 평균에 포함"""
        target = np.array([[1, 0], [1, 0]])
        counts = metrics_service.accumulate(ConfusionCounts.empty(2), target, target)
        assert metrics_service.macro_f1(counts) == pytest.approx(0.5)

    def test_all_zero_predictions_micro(self):
        counts = metrics_service.accumulate(ConfusionCounts.empty(3), np.zeros((2, 3)), TARGET)
        assert metrics_service.micro_f1(counts) == 0.0

    def test_macro_requires_labels(self):
        with pytest.raises(MetricsShapeError):
            metrics_service.macro_f1(ConfusionCounts.empty(0))


class TestPositiveRatio:
    def test_hand_value(self, example_counts):
        assert metrics_service.positive_ratio(example_counts) == pytest.approx(0.5)

    @pytest.mark.parametrize("fill, expected", [(0, 0.0), (1, 1.0)])
    def test_extremes(self, fill, expected):
        counts = metrics_service.accumulate(ConfusionCounts.empty(3), np.full((2, 3), fill), TARGET)
        assert metrics_service.positive_ratio(counts) == expected

    def test_empty_counts(self):
        assert metrics_service.positive_ratio(ConfusionCounts.empty(3)) == 0.0


class TestBucketedMacroF1:
    def test_head_to_tail_buckets(self):
        """빈도 내림차순으로 head/torso/tail 버킷을 나눔"""
        counts = ConfusionCounts(
            tp=np.array([0, 1, 1, 0, 1, 0]),
            fp=np.zeros(6, dtype=np.int64),
            fn=np.array([1, 0, 0, 1, 0, 1]),
        )
        label_freq = np.array([1, 50, 40, 2, 30, 3])
        # 빈도순 1, 2, 4, 5, 3, 0 → [1,2] [4,5] [3,0]
        assert metrics_service.bucketed_macro_f1(counts, label_freq) == [1.0, 0.5, 0.0]

    def test_frequency_shape_mismatch(self):
        with pytest.raises(MetricsShapeError):
            metrics_service.bucketed_macro_f1(ConfusionCounts.empty(3), np.ones(2))
