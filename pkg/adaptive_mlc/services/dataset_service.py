"""
데이터셋 서비스

전역 레이블 통계(IDF) 계산, Zipf 분포 합성 데이터셋 생성, 학습/평가 분할을 제공합니다.

합성 데이터 생성 방식:
- 레이블 l(빈도 순위 r)의 샘플링 확률 ∝ r^(-zipf_exponent)
- 샘플당 레이블 수 ~ Poisson(mean_labels_per_sample), [0, L]로 잘라냄
- 한 번도 뽑히지 않은 레이블은 임의 샘플에 하나씩 추가 (모든 레이블 최소 1회 등장)
- 레이블 id는 실제 빈도 내림차순으로 다시 매김 (id 0이 가장 빈번)
- 레이블마다 희소한 가우시안 피처 시그니처를 두고, 샘플 피처 = 보유 레이블 시그니처 합 + 노이즈,
  마지막에 L2 정규화 (TF-IDF 벡터와 같은 스케일)
"""

import logging

import numpy as np
import scipy.sparse as sp

from adaptive_mlc.core.constants import DEFAULT_EPSILON, IDF_LOG
from adaptive_mlc.exception.common.config_exception import ConfigValidationError
from adaptive_mlc.exception.dataset.dataset_exception import EmptySplitError
from adaptive_mlc.models.dto import SyntheticSpec
from adaptive_mlc.models.tensors import DatasetStats, LabelMatrix, SparseFeatureMatrix

logger = logging.getLogger(__name__)

# 레이블 시그니처가 차지하는 피처 비율과 노이즈 세기
SIGNATURE_DENSITY = 0.02
SIGNATURE_SCALE = 0.25
NOISE_SCALE = 0.5


def compute_stats(labels: LabelMatrix, epsilon: float = DEFAULT_EPSILON) -> DatasetStats:
    """레이블 빈도 f_l 과 IDF_l = log(N / (f_l + ε)) 를 계산합니다.

    f_l = 0 인 레이블도 ε 덕분에 유한한 IDF를 가집니다.
    """
    if epsilon <= 0:
        raise ConfigValidationError(f"epsilon은 0보다 커야 합니다: {epsilon}")
    n_samples = labels.n_samples
    label_freq = np.asarray((labels.matrix != 0).sum(axis=0)).ravel().astype(np.int64)
    idf = IDF_LOG(n_samples / (label_freq.astype(np.float64) + epsilon))
    return DatasetStats(n_samples=n_samples, label_freq=label_freq, idf=idf, epsilon=epsilon)


def _sample_label_sets(spec: SyntheticSpec, rng: np.random.Generator) -> list[np.ndarray]:
    ranks = np.arange(1, spec.n_labels + 1, dtype=np.float64)
    weights = ranks ** (-spec.zipf_exponent)
    probs = weights / weights.sum()

    counts = np.clip(rng.poisson(spec.mean_labels_per_sample, size=spec.n_samples), 0, spec.n_labels)
    label_sets = [
        rng.choice(spec.n_labels, size=int(k), replace=False, p=probs) if k else np.empty(0, dtype=np.int64)
        for k in counts
    ]

    present = np.zeros(spec.n_labels, dtype=bool)
    for labels in label_sets:
        present[labels] = True
    for missing in np.flatnonzero(~present):
        host = int(rng.integers(spec.n_samples))
        label_sets[host] = np.append(label_sets[host], missing)

    freq = np.zeros(spec.n_labels, dtype=np.int64)
    for labels in label_sets:
        freq[labels] += 1
    order = np.argsort(-freq, kind="stable")
    relabel = np.empty(spec.n_labels, dtype=np.int64)
    relabel[order] = np.arange(spec.n_labels)
    return [np.sort(relabel[labels]) for labels in label_sets]


def generate_synthetic(spec: SyntheticSpec) -> tuple[SparseFeatureMatrix, LabelMatrix]:
    """롱테일 레이블 분포를 따르는 합성 데이터셋을 생성합니다. 같은 seed면 항상 같은 결과입니다."""
    rng = np.random.default_rng(spec.seed)
    label_sets = _sample_label_sets(spec, rng)

    support = max(1, min(spec.n_features, int(round(spec.n_features * SIGNATURE_DENSITY))))
    signature_idx = np.stack([
        np.sort(rng.choice(spec.n_features, size=support, replace=False)) for _ in range(spec.n_labels)
    ])
    signature_val = np.abs(rng.normal(1.0, SIGNATURE_SCALE, size=(spec.n_labels, support)))
    n_noise = max(1, support // 2)

    feature_rows = []
    for labels in label_sets:
        x = np.zeros(spec.n_features, dtype=np.float64)
        for label in labels:
            jitter = 1.0 + SIGNATURE_SCALE * rng.standard_normal(support)
            x[signature_idx[label]] += signature_val[label] * np.abs(jitter)
        noise_idx = rng.choice(spec.n_features, size=n_noise, replace=False)
        x[noise_idx] += np.abs(rng.normal(0.0, NOISE_SCALE, size=n_noise))
        norm = np.linalg.norm(x)
        if norm > 0:
            x /= norm
        feature_rows.append(x)

    features = sp.csr_matrix(np.vstack(feature_rows))
    features.sort_indices()

    indptr = np.zeros(spec.n_samples + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(labels) for labels in label_sets])
    indices = np.concatenate(label_sets).astype(np.int64) if indptr[-1] else np.empty(0, dtype=np.int64)
    labels = sp.csr_matrix(
        (np.ones(indptr[-1], dtype=np.float64), indices, indptr),
        shape=(spec.n_samples, spec.n_labels),
    )

    logger.info({
        "event": "synthetic_generated",
        "n_samples": spec.n_samples,
        "n_labels": spec.n_labels,
        "n_features": spec.n_features,
        "total_positives": int(indptr[-1]),
        "seed": spec.seed,
    })
    return SparseFeatureMatrix(features), LabelMatrix(labels)


def train_eval_split(
    features: SparseFeatureMatrix,
    labels: LabelMatrix,
    eval_fraction: float,
    seed: int,
) -> tuple[tuple[SparseFeatureMatrix, LabelMatrix], tuple[SparseFeatureMatrix, LabelMatrix]]:
    """행을 섞어 (train, eval) 두 쌍으로 나눕니다. 양쪽 모두 최소 1개 샘플을 갖도록 clamp 합니다."""
    if not 0 < eval_fraction < 1:
        raise ConfigValidationError(f"eval_fraction은 (0, 1) 범위여야 합니다: {eval_fraction}")
    n = features.n_samples
    if n != labels.n_samples:
        raise EmptySplitError(f"피처({n})와 레이블({labels.n_samples}) 샘플 수가 다릅니다.")
    if n < 2:
        raise EmptySplitError(f"샘플이 {n}개라 학습/평가 양쪽을 채울 수 없습니다.")

    n_eval = min(max(int(round(n * eval_fraction)), 1), n - 1)
    perm = np.random.default_rng(seed).permutation(n)
    eval_idx = np.sort(perm[:n_eval])
    train_idx = np.sort(perm[n_eval:])

    absent = int(np.sum(np.asarray(labels.take(eval_idx).matrix.sum(axis=0)).ravel() == 0))
    if absent:
        logger.warning({"event": "labels_absent_from_eval", "count": absent})

    return (
        (features.take(train_idx), labels.take(train_idx)),
        (features.take(eval_idx), labels.take(eval_idx)),
    )
