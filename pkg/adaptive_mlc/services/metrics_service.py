"""
평가 지표 서비스

ConfusionCounts를 배치 단위로 누적(accumulate)하거나 독립 누적값을 병합(merge)한 뒤
macro/micro F1, 예측 양성 셀 비율을 계산합니다. 모든 카운트는 정수이므로 배치 분할과
병합 순서에 관계없이 결과가 정확히 같습니다.

F1의 0/0은 0으로 정의하고, macro-F1은 평가 분할에 등장하지 않는 레이블까지 포함한
전체 L개 레이블의 단순 평균입니다.
"""

import numpy as np

from adaptive_mlc.exception.model.model_exception import MetricsShapeError
from adaptive_mlc.models.tensors import ConfusionCounts


def _as_binary(matrix) -> np.ndarray:
    if hasattr(matrix, "toarray"):
        matrix = matrix.toarray()
    return np.asarray(matrix) != 0


def accumulate(counts: ConfusionCounts, predictions, targets) -> ConfusionCounts:
    """B×L 이진 예측/정답으로 카운트를 더한 새 ConfusionCounts를 반환합니다."""
    pred = _as_binary(predictions)
    true = _as_binary(targets)
    if pred.shape != true.shape or pred.ndim != 2:
        raise MetricsShapeError(f"예측 {pred.shape} 와 정답 {true.shape} 형태가 다릅니다.")
    if pred.shape[1] != counts.n_labels:
        raise MetricsShapeError(f"레이블 수 {pred.shape[1]} != 누적 레이블 수 {counts.n_labels}")

    return ConfusionCounts(
        tp=counts.tp + (pred & true).sum(axis=0),
        fp=counts.fp + (pred & ~true).sum(axis=0),
        fn=counts.fn + (~pred & true).sum(axis=0),
        total_predicted_positive=counts.total_predicted_positive + int(pred.sum()),
        total_cells=counts.total_cells + int(pred.size),
    )


def merge(left: ConfusionCounts, right: ConfusionCounts) -> ConfusionCounts:
    """독립적으로 누적한 두 부분 결과를 합칩니다 (결합·교환 법칙 성립)."""
    if left.n_labels != right.n_labels:
        raise MetricsShapeError(f"병합할 레이블 수가 다릅니다: {left.n_labels} != {right.n_labels}")
    return ConfusionCounts(
        tp=left.tp + right.tp,
        fp=left.fp + right.fp,
        fn=left.fn + right.fn,
        total_predicted_positive=left.total_predicted_positive + right.total_predicted_positive,
        total_cells=left.total_cells + right.total_cells,
    )


def _safe_f1(tp, fp, fn) -> np.ndarray:
    numerator = 2.0 * np.asarray(tp, dtype=np.float64)
    denominator = numerator + fp + fn
    return np.divide(numerator, denominator, out=np.zeros_like(numerator), where=denominator > 0)


def per_label_f1(counts: ConfusionCounts) -> np.ndarray:
    return _safe_f1(counts.tp, counts.fp, counts.fn)


def macro_f1(counts: ConfusionCounts) -> float:
    if counts.n_labels < 1:
        raise MetricsShapeError("레이블이 없어 macro-F1을 계산할 수 없습니다.")
    return float(per_label_f1(counts).mean())


def micro_f1(counts: ConfusionCounts) -> float:
    return float(_safe_f1(counts.tp.sum(), counts.fp.sum(), counts.fn.sum()))


def positive_ratio(counts: ConfusionCounts) -> float:
    """예측 양성 셀 수 / 전체 셀 수 (B·L 기준). 아직 아무것도 누적하지 않았으면 0."""
    if counts.total_cells == 0:
        return 0.0
    return counts.total_predicted_positive / counts.total_cells


def bucketed_macro_f1(counts: ConfusionCounts, label_freq: np.ndarray, n_buckets: int = 3) -> list[float]:
    """학습 빈도 내림차순으로 레이블을 n_buckets개(head → tail)로 나눠 버킷별 macro-F1을 계산합니다.

    동률 빈도는 낮은 레이블 id가 앞 버킷으로 갑니다. 빈 버킷은 0.0 입니다.
    """
    label_freq = np.asarray(label_freq)
    if label_freq.shape != (counts.n_labels,):
        raise MetricsShapeError(f"빈도 벡터 {label_freq.shape} 가 레이블 수 {counts.n_labels}와 맞지 않습니다.")
    if n_buckets < 1:
        raise MetricsShapeError(f"n_buckets는 1 이상이어야 합니다: {n_buckets}")

    scores = per_label_f1(counts)
    order = np.argsort(-label_freq, kind="stable")
    return [float(scores[bucket].mean()) if bucket.size else 0.0 for bucket in np.array_split(order, n_buckets)]
