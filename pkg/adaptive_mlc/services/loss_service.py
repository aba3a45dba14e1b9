"""
복합 손실 서비스

total = BCEWithLogits(z − θ, y; pos_weight) + λ_m · Margin(z, θ, y)

- 두 항 모두 B·L 전체에 대한 평균으로 축약합니다.
- 임계값은 로짓에서 빼는 패널티로 작동하므로 BCE 항의 θ 기울기는 shifted 로짓 기울기의 부호 반전입니다.
- 힌지의 꺾이는 점에서 subgradient는 0 입니다.
- use_standardization이면 z를 배치 전체 μ, σ로 표준화한 뒤 두 항에 넣고, μ, σ는 상수로 취급합니다.
"""

from typing import Optional

import numpy as np
from scipy.special import expit

from adaptive_mlc.exception.model.model_exception import NonFiniteInputError, ThresholdShapeError
from adaptive_mlc.models.dto import LossConfig
from adaptive_mlc.models.tensors import LossOutput
from adaptive_mlc.services.threshold_service import standardize_logits


def _check_shapes(*arrays: np.ndarray) -> None:
    shapes = {np.shape(a) for a in arrays}
    if len(shapes) != 1:
        raise ThresholdShapeError(f"손실 입력 형태가 서로 다릅니다: {sorted(shapes)}")


def bce_with_logits(shifted: np.ndarray, targets: np.ndarray, pos_weight: float = 1.0) -> tuple[float, np.ndarray]:
    """수치적으로 안정적인 가중 BCE-with-logits (평균 축약)와 shifted 로짓에 대한 기울기

    per-entry: pos_weight·y·softplus(−s) + (1−y)·softplus(s)
    """
    shifted = np.asarray(shifted, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    _check_shapes(shifted, targets)
    if not np.all(np.isfinite(shifted)):
        raise NonFiniteInputError()

    per_entry = pos_weight * targets * np.logaddexp(0.0, -shifted) + (1.0 - targets) * np.logaddexp(0.0, shifted)
    prob = expit(shifted)
    grad = pos_weight * targets * (prob - 1.0) + (1.0 - targets) * prob
    n_cells = shifted.size
    return float(per_entry.sum() / n_cells), grad / n_cells


def margin_loss(
    logits: np.ndarray, thresholds: np.ndarray, targets: np.ndarray, margin: float
) -> tuple[float, np.ndarray, np.ndarray]:
    """힌지 마진 손실 (평균 축약)과 로짓/임계값 기울기

    y=1: max(0, θ − z + Δ),  y=0: max(0, z − θ + Δ)
    """
    logits = np.asarray(logits, dtype=np.float64)
    thresholds = np.asarray(thresholds, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    _check_shapes(logits, thresholds, targets)

    # sign = +1 (y=0) / −1 (y=1): hinge = max(0, sign·(z − θ) + Δ)
    sign = 1.0 - 2.0 * targets
    hinge = sign * (logits - thresholds) + margin
    active = hinge > 0

    n_cells = logits.size
    d_logits = np.where(active, sign, 0.0) / n_cells
    return float(np.where(active, hinge, 0.0).sum() / n_cells), d_logits, -d_logits


def decision_scores(logits: np.ndarray, thresholds: Optional[np.ndarray], config: LossConfig) -> np.ndarray:
    """예측 판정에 쓰는 점수 z − θ (표준화 설정이면 표준화된 z 기준). θ가 없으면 z 그대로."""
    z = standardize_logits(logits, config.epsilon).values if config.use_standardization else np.asarray(logits)
    return z if thresholds is None else z - thresholds


def composite_loss(logits: np.ndarray, thresholds: np.ndarray, targets: np.ndarray, config: LossConfig) -> LossOutput:
    """BCE + λ_m·Margin 복합 손실과 로짓/임계값에 대한 기울기"""
    logits = np.asarray(logits, dtype=np.float64)
    thresholds = np.asarray(thresholds, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    _check_shapes(logits, thresholds, targets)

    scale = 1.0
    z = logits
    if config.use_standardization:
        standardized = standardize_logits(logits, config.epsilon)
        z = standardized.values
        scale = 1.0 / (standardized.std + standardized.epsilon)

    bce, d_shifted = bce_with_logits(z - thresholds, targets, config.pos_weight)
    d_z = d_shifted.copy()
    d_threshold = -d_shifted

    margin_value, d_margin_z, d_margin_theta = margin_loss(z, thresholds, targets, config.margin)
    d_z += config.margin_weight * d_margin_z
    d_threshold += config.margin_weight * d_margin_theta

    return LossOutput(
        total=bce + config.margin_weight * margin_value,
        bce_component=bce,
        margin_component=margin_value,
        d_logits=d_z * scale,
        d_threshold=d_threshold,
    )
