"""
수치 계산용 컨테이너 타입

pydantic DTO(models/dto.py)는 설정/기록용이고, 여기의 타입들은 numpy / scipy.sparse
배열을 직접 담는 dataclass입니다. 데이터셋과 통계 타입은 생성 후 변경되지 않으므로
여러 스레드에서 동시에 읽어도 안전합니다.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
import scipy.sparse as sp


def _csr_equal(a: sp.csr_matrix, b: sp.csr_matrix) -> bool:
    if a.shape != b.shape:
        return False
    a = a.tocsr()
    b = b.tocsr()
    a.sort_indices()
    b.sort_indices()
    return (
        np.array_equal(a.indptr, b.indptr)
        and np.array_equal(a.indices, b.indices)
        and np.array_equal(a.data, b.data)
    )


# ---------------------------------------------------------------------------
# dataset
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SparseFeatureMatrix:
    """행 단위 희소 실수 피처 (N×D, CSR, 행 내부 인덱스 오름차순)"""
    matrix: sp.csr_matrix

    @property
    def n_samples(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_features(self) -> int:
        return self.matrix.shape[1]

    def row(self, i: int) -> list[tuple[int, float]]:
        start, end = self.matrix.indptr[i], self.matrix.indptr[i + 1]
        return list(zip(self.matrix.indices[start:end].tolist(), self.matrix.data[start:end].tolist()))

    def rows(self) -> Iterator[list[tuple[int, float]]]:
        for i in range(self.n_samples):
            yield self.row(i)

    def take(self, indices: np.ndarray) -> "SparseFeatureMatrix":
        return SparseFeatureMatrix(self.matrix[np.asarray(indices)].tocsr())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseFeatureMatrix):
            return NotImplemented
        return _csr_equal(self.matrix, other.matrix)


@dataclass(frozen=True, eq=False)
class LabelMatrix:
    """이진 레이블 할당 (N×L, CSR, 값은 모두 1)"""
    matrix: sp.csr_matrix

    @property
    def n_samples(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_labels(self) -> int:
        return self.matrix.shape[1]

    def row(self, i: int) -> list[int]:
        start, end = self.matrix.indptr[i], self.matrix.indptr[i + 1]
        return self.matrix.indices[start:end].tolist()

    def rows(self) -> Iterator[list[int]]:
        for i in range(self.n_samples):
            yield self.row(i)

    def take(self, indices: np.ndarray) -> "LabelMatrix":
        return LabelMatrix(self.matrix[np.asarray(indices)].tocsr())

    def dense(self) -> np.ndarray:
        return self.matrix.toarray().astype(np.float64)

    @property
    def total_positives(self) -> int:
        return int(self.matrix.nnz)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabelMatrix):
            return NotImplemented
        return _csr_equal(self.matrix, other.matrix)


@dataclass(frozen=True)
class Dataset:
    features: SparseFeatureMatrix
    labels: LabelMatrix

    @property
    def n_samples(self) -> int:
        return self.features.n_samples

    def take(self, indices: np.ndarray) -> "Dataset":
        return Dataset(self.features.take(indices), self.labels.take(indices))


@dataclass(frozen=True, eq=False)
class DatasetStats:
    """전역 레이블 통계: N, 레이블별 빈도 f_l, 캐시된 IDF 벡터"""
    n_samples: int
    label_freq: np.ndarray
    idf: np.ndarray
    epsilon: float

    @property
    def n_labels(self) -> int:
        return int(self.label_freq.shape[0])


# ---------------------------------------------------------------------------
# signals / threshold
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class KnnSignal:
    """B×L 밀집 soft-KNN 신호. degenerate_rows는 피처 노름이 0이라 0으로 채운 행 번호"""
    values: np.ndarray
    epsilon: float
    degenerate_rows: tuple[int, ...] = ()


@dataclass(eq=False)
class ThresholdParams:
    """학습 가능한 레이블별 α, β, b 와 시그모이드 이전 블렌드 스칼라 λ_raw"""
    alpha: np.ndarray
    beta: np.ndarray
    bias: np.ndarray
    lambda_raw: float

    @property
    def n_labels(self) -> int:
        return int(self.alpha.shape[0])

    def copy(self) -> "ThresholdParams":
        return ThresholdParams(self.alpha.copy(), self.beta.copy(), self.bias.copy(), float(self.lambda_raw))


@dataclass(eq=False)
class ThresholdGrad:
    d_alpha: np.ndarray
    d_beta: np.ndarray
    d_bias: np.ndarray
    d_lambda_raw: float


@dataclass(frozen=True, eq=False)
class StandardizedLogits:
    values: np.ndarray
    mean: float
    std: float
    epsilon: float


# ---------------------------------------------------------------------------
# losses
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LossOutput:
    total: float
    bce_component: float
    margin_component: float
    d_logits: np.ndarray
    d_threshold: np.ndarray


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class MlpParams:
    """relu 은닉층 1개짜리 MLP. W1: hidden×D, W2: L×hidden"""
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    @property
    def hidden_dim(self) -> int:
        return int(self.W1.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.W1.shape[1])

    @property
    def n_labels(self) -> int:
        return int(self.W2.shape[0])

    def copy(self) -> "MlpParams":
        return MlpParams(self.W1.copy(), self.b1.copy(), self.W2.copy(), self.b2.copy())


@dataclass(eq=False)
class MlpGrad:
    dW1: np.ndarray
    db1: np.ndarray
    dW2: np.ndarray
    db2: np.ndarray


@dataclass(frozen=True, eq=False)
class ForwardCache:
    inputs: sp.csr_matrix
    pre_activation: np.ndarray
    hidden: np.ndarray


@dataclass(eq=False)
class OptimizerState:
    """옵티마이저 상태. method == 'adam' 일 때만 moments가 채워집니다."""
    learning_rate: float
    method: str = "sgd"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    first_moments: dict[str, np.ndarray] = field(default_factory=dict)
    second_moments: dict[str, np.ndarray] = field(default_factory=dict)

    def copy(self) -> "OptimizerState":
        return OptimizerState(
            learning_rate=self.learning_rate,
            method=self.method,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
            step=self.step,
            first_moments={k: v.copy() for k, v in self.first_moments.items()},
            second_moments={k: v.copy() for k, v in self.second_moments.items()},
        )


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConfusionCounts:
    """레이블별 tp/fp/fn 누적값과 예측 양성 셀 수, 전체 셀 수 (B·L 누적)"""
    tp: np.ndarray
    fp: np.ndarray
    fn: np.ndarray
    total_predicted_positive: int = 0
    total_cells: int = 0

    @classmethod
    def empty(cls, n_labels: int) -> "ConfusionCounts":
        zeros = np.zeros(n_labels, dtype=np.int64)
        return cls(zeros, zeros.copy(), zeros.copy(), 0, 0)

    @property
    def n_labels(self) -> int:
        return int(self.tp.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConfusionCounts):
            return NotImplemented
        return (
            np.array_equal(self.tp, other.tp)
            and np.array_equal(self.fp, other.fp)
            and np.array_equal(self.fn, other.fn)
            and self.total_predicted_positive == other.total_predicted_positive
            and self.total_cells == other.total_cells
        )


# ---------------------------------------------------------------------------
# checkpoint
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class Checkpoint:
    """모델 + 임계값 파라미터 묶음.

    idf와 reference는 평가 시점 신호 계산에 필요하므로 함께 저장합니다.
    progress는 재개(resume)에 필요한 학습 진행 상태(JSON 직렬화 가능한 dict)입니다.
    eval_settings는 판정에 영향을 주는 학습 설정(EvalSettings 덤프)이며, 비어 있으면 평가 호출자의 설정을 씁니다.
    """
    mlp: MlpParams
    threshold: ThresholdParams
    config_hash: str
    variant: str
    epoch: int
    idf: np.ndarray
    reference: Optional[Dataset] = None
    optimizer: Optional[OptimizerState] = None
    progress: dict = field(default_factory=dict)
    eval_settings: dict = field(default_factory=dict)

    def copy(self) -> "Checkpoint":
        return Checkpoint(
            mlp=self.mlp.copy(),
            threshold=self.threshold.copy(),
            config_hash=self.config_hash,
            variant=self.variant,
            epoch=self.epoch,
            idf=self.idf.copy(),
            reference=self.reference,
            optimizer=self.optimizer.copy() if self.optimizer is not None else None,
            progress=copy.deepcopy(self.progress),
            eval_settings=copy.deepcopy(self.eval_settings),
        )
