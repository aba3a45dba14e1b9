"""
적응형 임계값 서비스 테스트
"""

import numpy as np
import pytest

from adaptive_mlc.exception.model.model_exception import ThresholdShapeError
from adaptive_mlc.models.tensors import KnnSignal, ThresholdParams
from adaptive_mlc.services import threshold_service
from tests.helpers import FD_STEP, central_difference, relative_error


def _params(n_labels, alpha=1.0, beta=1.0, bias=0.0, lambda_raw=0.0):
    return ThresholdParams(
        alpha=np.full(n_labels, alpha, dtype=np.float64),
        beta=np.full(n_labels, beta, dtype=np.float64),
        bias=np.full(n_labels, bias, dtype=np.float64),
        lambda_raw=lambda_raw,
    )


class TestComputeThreshold:
    def test_hand_value(self):
        """λ=0.5, α=2, idf=3, β=4, knn=0.5, b=0.1 → θ = 3 + 1 + 0.1 = 4.1"""
        params = _params(1, alpha=2.0, beta=4.0, bias=0.1, lambda_raw=0.0)
        theta = threshold_service.compute_threshold(params, np.array([3.0]), KnnSignal(np.array([[0.5]]), 1e-12))
        assert theta[0, 0] == pytest.approx(4.1, abs=1e-9)

    def test_global_limit(self, rng):
        """λ_raw=40 이면 θ ≈ idf"""
        idf = rng.uniform(0, 5, size=4)
        knn = KnnSignal(rng.uniform(size=(3, 4)), 1e-12)
        theta = threshold_service.compute_threshold(_params(4, lambda_raw=40.0), idf, knn)
        np.testing.assert_allclose(theta, np.tile(idf, (3, 1)), atol=1e-9)

    def test_local_limit(self, rng):
        """λ_raw=-40 이면 θ ≈ knn"""
        idf = rng.uniform(0, 5, size=4)
        knn = KnnSignal(rng.uniform(size=(3, 4)), 1e-12)
        theta = threshold_service.compute_threshold(_params(4, lambda_raw=-40.0), idf, knn)
        np.testing.assert_allclose(theta, knn.values, atol=1e-9)

    def test_pinned_blend_without_knn(self):
        """blend=1 이면 KNN 신호 없이 n_rows 만으로 계산"""
        theta = threshold_service.compute_threshold(
            _params(2, alpha=2.0), np.array([1.0, 3.0]), None, blend=1.0, n_rows=3
        )
        np.testing.assert_allclose(theta, [[2.0, 6.0]] * 3)

    def test_pinned_blend_without_idf(self):
        knn = KnnSignal(np.array([[0.5, 1.0]]), 1e-12)
        theta = threshold_service.compute_threshold(_params(2, beta=2.0, bias=0.5), None, knn, blend=0.0)
        np.testing.assert_allclose(theta, [[1.5, 2.5]])

    def test_idf_length_mismatch(self):
        with pytest.raises(ThresholdShapeError):
            threshold_service.compute_threshold(_params(3), np.ones(2), KnnSignal(np.ones((1, 3)), 1e-12))

    def test_knn_width_mismatch(self):
        with pytest.raises(ThresholdShapeError):
            threshold_service.compute_threshold(_params(3), np.ones(3), KnnSignal(np.ones((1, 4)), 1e-12))

    def test_missing_rows_without_knn(self):
        with pytest.raises(ThresholdShapeError):
            threshold_service.compute_threshold(_params(2), np.ones(2), None, blend=1.0)


class TestThresholdBackward:
    def test_zero_upstream(self, rng):
        params = _params(3, lambda_raw=0.3)
        grad = threshold_service.threshold_backward(
            params, rng.uniform(size=3), KnnSignal(rng.uniform(size=(2, 3)), 1e-12), np.zeros((2, 3))
        )
        assert not grad.d_alpha.any() and not grad.d_beta.any() and not grad.d_bias.any()
        assert grad.d_lambda_raw == 0.0

    def test_single_entry_hand_value(self):
        """upstream (0,l)=1, λ=0.5, idf[l]=2 → d_alpha[l] = 1"""
        upstream = np.zeros((2, 2))
        upstream[0, 1] = 1.0
        grad = threshold_service.threshold_backward(
            _params(2), np.array([0.5, 2.0]), KnnSignal(np.ones((2, 2)), 1e-12), upstream
        )
        assert grad.d_alpha[1] == pytest.approx(1.0)
        assert grad.d_alpha[0] == 0.0

    @pytest.mark.parametrize("seed", range(50))
    def test_matches_finite_differences(self, seed):
        """임의 인스턴스에서 α, β, b, λ_raw 기울기가 중앙 차분과 1e-5 이내로 일치"""
        rng = np.random.default_rng(seed)
        n_labels, n_rows = int(rng.integers(1, 6)), int(rng.integers(1, 5))
        params = ThresholdParams(
            alpha=rng.normal(size=n_labels),
            beta=rng.normal(size=n_labels),
            bias=rng.normal(size=n_labels),
            lambda_raw=float(rng.normal()),
        )
        idf = rng.uniform(0, 4, size=n_labels)
        knn = KnnSignal(rng.uniform(size=(n_rows, n_labels)), 1e-12)
        upstream = rng.normal(size=(n_rows, n_labels))

        def scalar():
            return float((upstream * threshold_service.compute_threshold(params, idf, knn)).sum())

        grad = threshold_service.threshold_backward(params, idf, knn, upstream)
        assert relative_error(grad.d_alpha, central_difference(scalar, params.alpha)) < 1e-5
        assert relative_error(grad.d_beta, central_difference(scalar, params.beta)) < 1e-5
        assert relative_error(grad.d_bias, central_difference(scalar, params.bias)) < 1e-5

        original = params.lambda_raw
        params.lambda_raw = original + FD_STEP
        plus = scalar()
        params.lambda_raw = original - FD_STEP
        minus = scalar()
        params.lambda_raw = original
        assert relative_error(grad.d_lambda_raw, (plus - minus) / (2 * FD_STEP)) < 1e-5

    def test_pinned_blend_has_no_lambda_gradient(self, rng):
        grad = threshold_service.threshold_backward(
            _params(2), rng.uniform(size=2), None, rng.normal(size=(3, 2)), blend=1.0
        )
        assert grad.d_lambda_raw == 0.0
        assert not grad.d_beta.any()


class TestStandardizeLogits:
    def test_constant_logits(self):
        out = threshold_service.standardize_logits(np.full((2, 3), 0.7))
        assert np.all(out.values == 0.0)
        assert out.std == 0.0

    @pytest.mark.parametrize("value", [0.1, 0.7, -3.3, 1e6 + 0.1])
    def test_constant_logits_with_inexact_mean(self, value):
        """평균이 정확히 표현되지 않는 상수 배치도 정확히 0이어야 함"""
        out = threshold_service.standardize_logits(np.full((7, 13), value))
        assert np.all(out.values == 0.0)
        assert out.mean == pytest.approx(value)

    def test_spread_below_epsilon_scale_is_zero(self):
        logits = np.array([[0.7, 0.7 + 1e-14], [0.7, 0.7]])
        out = threshold_service.standardize_logits(logits, epsilon=1e-12)
        assert np.all(out.values == 0.0)
        assert out.std == 0.0

    def test_two_values(self):
        """{0, 2} → μ=1, σ=1, 출력 {−1, +1}"""
        out = threshold_service.standardize_logits(np.array([[0.0, 2.0]]))
        assert out.mean == pytest.approx(1.0)
        assert out.std == pytest.approx(1.0)
        np.testing.assert_allclose(out.values, [[-1.0, 1.0]], atol=1e-9)

    def test_mean_zero_std_one(self, rng):
        out = threshold_service.standardize_logits(rng.normal(3.0, 2.0, size=(5, 7)))
        assert abs(out.values.mean()) < 1e-6
        assert abs(out.values.std() - 1.0) < 1e-6

    def test_idempotent(self, rng):
        once = threshold_service.standardize_logits(rng.normal(size=(4, 4))).values
        twice = threshold_service.standardize_logits(once).values
        np.testing.assert_allclose(twice, once, atol=1e-9)


class TestInitParams:
    def test_initial_values(self):
        params = threshold_service.init_params(3)
        np.testing.assert_array_equal(params.alpha, [1, 1, 1])
        np.testing.assert_array_equal(params.beta, [1, 1, 1])
        np.testing.assert_array_equal(params.bias, [0, 0, 0])
        assert threshold_service.effective_lambda(params) == 0.5

    def test_deterministic(self):
        a = threshold_service.init_params(4, seed=1)
        b = threshold_service.init_params(4, seed=1)
        np.testing.assert_array_equal(a.alpha, b.alpha)
        assert a.lambda_raw == b.lambda_raw

    def test_rejects_zero_labels(self):
        with pytest.raises(ThresholdShapeError):
            threshold_service.init_params(0)

    def test_weight_summary(self):
        params = _params(2, alpha=2.0, beta=0.5)
        summary = threshold_service.weight_summary(params)
        assert summary == {
            "alpha_mean": 2.0, "alpha_std": 0.0, "beta_mean": 0.5, "beta_std": 0.0, "lambda_value": 0.5,
        }
