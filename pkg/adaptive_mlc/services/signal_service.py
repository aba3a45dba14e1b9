"""
임계값 신호 서비스

- 전역 신호: 레이블 희귀도 IDF (DatasetStats에 캐시된 값을 그대로 노출)
- 지역 신호(학습): 배치 정답 레이블 Y 위의 soft-KNN
    raw  = Y·Yᵀ                         (B×B, 공유 레이블 수, 대각 포함)
    norm = raw / (rowsum(Y) + ε)         (행별 자기 레이블 수로 정규화)
    knn  = norm·Y                        (B×L, 레이블 공간으로 전파)
- 지역 신호(평가): 평가 배치는 정답 Y가 없으므로, 학습 참조 집합에서 피처 코사인 유사도
  상위 k개 이웃의 레이블 벡터를 유사도 가중 평균한 값으로 대체합니다.

모든 함수는 입력에 대해 순수 함수이므로 서로 다른 배치에 대해 동시에 호출해도 안전합니다.
"""

import logging
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp

from adaptive_mlc.core.constants import DEFAULT_EPSILON
from adaptive_mlc.exception.common.config_exception import ConfigValidationError
from adaptive_mlc.exception.model.model_exception import SignalShapeError
from adaptive_mlc.models.tensors import DatasetStats, KnnSignal, LabelMatrix, SparseFeatureMatrix

logger = logging.getLogger(__name__)

LabelsLike = Union[LabelMatrix, np.ndarray, sp.spmatrix]


def _as_dense_labels(batch_labels: LabelsLike) -> np.ndarray:
    if isinstance(batch_labels, LabelMatrix):
        return batch_labels.dense()
    if sp.issparse(batch_labels):
        return batch_labels.toarray().astype(np.float64)
    return np.asarray(batch_labels, dtype=np.float64)


def knn_signal(batch_labels: LabelsLike, epsilon: float = DEFAULT_EPSILON) -> KnnSignal:
    """배치 정답 레이블로 soft-KNN 신호(B×L)를 계산합니다. 레이블이 없는 행은 0 행이 됩니다."""
    if epsilon <= 0:
        raise ConfigValidationError(f"epsilon은 0보다 커야 합니다: {epsilon}")
    y = _as_dense_labels(batch_labels)
    if y.ndim != 2 or y.shape[0] < 1:
        raise SignalShapeError(f"배치 레이블은 B≥1 인 2차원 행렬이어야 합니다: {y.shape}")

    raw = y @ y.T
    norm = raw / (y.sum(axis=1, keepdims=True) + epsilon)
    return KnnSignal(values=norm @ y, epsilon=epsilon)


def _l2_normalize_rows(matrix: sp.csr_matrix) -> tuple[sp.csr_matrix, np.ndarray]:
    norms = np.sqrt(np.asarray(matrix.multiply(matrix).sum(axis=1)).ravel())
    safe = np.where(norms > 0, norms, 1.0)
    return sp.diags(1.0 / safe) @ matrix, norms


def knn_signal_reference(
    batch_features: SparseFeatureMatrix,
    reference: tuple[SparseFeatureMatrix, LabelMatrix],
    k: int,
    epsilon: float = DEFAULT_EPSILON,
    exclude: Optional[np.ndarray] = None,
) -> KnnSignal:
    """평가 시점 KNN 신호.

    배치의 각 샘플마다 참조 집합에서 코사인 유사도가 가장 높은 k개 행을 고르고
    (동률이면 낮은 인덱스 우선), 유사도를 합이 1이 되도록 정규화(+ε)한 가중치로
    이웃 레이블 벡터를 평균합니다. 음수 유사도는 0으로 취급합니다.
    피처 노름이 0인 배치 행은 0 행이 되고 degenerate_rows에 기록됩니다.

    exclude[i] (≥ 0)는 배치 행 i의 이웃 후보에서 뺄 참조 행입니다. 배치 행이 참조 집합에
    들어 있는 학습 시점에 자기 자신을 이웃으로 고르지 않도록 쓰며, 음수면 제외하지 않습니다.
    """
    ref_features, ref_labels = reference
    if k < 1:
        raise ConfigValidationError(f"k는 1 이상이어야 합니다: {k}")
    if ref_features.n_samples < 1:
        raise SignalShapeError("참조 집합이 비어 있습니다.")
    if ref_features.n_samples != ref_labels.n_samples:
        raise SignalShapeError("참조 피처와 레이블의 샘플 수가 다릅니다.")
    if batch_features.n_features != ref_features.n_features:
        raise SignalShapeError(
            f"배치 피처 차원 {batch_features.n_features} != 참조 피처 차원 {ref_features.n_features}"
        )

    batch_unit, batch_norms = _l2_normalize_rows(batch_features.matrix)
    ref_unit, _ = _l2_normalize_rows(ref_features.matrix)
    sims = np.asarray((batch_unit @ ref_unit.T).todense())
    sims = np.maximum(sims, 0.0)
    n_batch = batch_features.n_samples
    if exclude is not None:
        exclude = np.asarray(exclude, dtype=np.int64)
        if exclude.shape != (n_batch,):
            raise SignalShapeError(f"exclude 길이 {exclude.shape}가 배치 행 수 {n_batch}와 다릅니다.")
        own = np.flatnonzero(exclude >= 0)
        # 음수는 어떤 실제 이웃보다 뒤로 정렬되고, 가중치 계산 전에 0으로 잘립니다
        sims[own, exclude[own]] = -1.0

    k = min(k, ref_features.n_samples)
    # stable 정렬이므로 동률일 때 낮은 참조 인덱스가 앞에 옵니다
    top = np.argsort(-sims, axis=1, kind="stable")[:, :k]
    top_sims = np.take_along_axis(sims, top, axis=1).clip(min=0.0)
    weights = top_sims / (top_sims.sum(axis=1, keepdims=True) + epsilon)

    rows = np.repeat(np.arange(n_batch), k)
    weight_matrix = sp.csr_matrix(
        (weights.ravel(), (rows, top.ravel())), shape=(n_batch, ref_features.n_samples)
    )
    values = np.asarray((weight_matrix @ ref_labels.matrix).todense(), dtype=np.float64)

    degenerate = tuple(int(i) for i in np.flatnonzero(batch_norms == 0))
    if degenerate:
        values[list(degenerate)] = 0.0
        logger.warning({"event": "knn_zero_norm_rows", "count": len(degenerate), "rows": list(degenerate[:20])})

    return KnnSignal(values=values, epsilon=epsilon, degenerate_rows=degenerate)


def idf_signal(stats: DatasetStats) -> np.ndarray:
    """전역 희귀도 신호. 임계값 코드가 신호를 한 곳에서 가져가도록 stats.idf를 그대로 반환합니다."""
    return stats.idf
