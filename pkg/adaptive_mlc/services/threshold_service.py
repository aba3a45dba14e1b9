"""
적응형 임계값 서비스

θ[i,l] = λ·α_l·IDF_l + (1−λ)·β_l·KNN[i,l] + b_l,   λ = sigmoid(λ_raw)

λ는 시그모이드 이전 값으로 저장하므로 어떤 업데이트 이후에도 (0,1) 안에 머뭅니다.
ablation 변형은 blend 인자로 λ를 고정(idf_only=1, knn_only=0)하고, 고정된 경우
λ_raw의 기울기는 0입니다. IDF/KNN 신호는 배치마다 상수로 취급합니다.
"""

from typing import Optional

import numpy as np
from scipy.special import expit

from adaptive_mlc.core.constants import DEFAULT_EPSILON
from adaptive_mlc.exception.model.model_exception import ThresholdShapeError
from adaptive_mlc.models.tensors import KnnSignal, StandardizedLogits, ThresholdGrad, ThresholdParams


def effective_lambda(params: ThresholdParams) -> float:
    return float(expit(params.lambda_raw))


def init_params(n_labels: int, seed: int = 0) -> ThresholdParams:
    """α=1, β=1, b=0, λ_raw=0 (λ=0.5) 로 초기화합니다.

    초기화에 난수를 쓰지 않으므로 seed와 무관하게 항상 같은 값입니다.
    """
    if n_labels < 1:
        raise ThresholdShapeError(f"n_labels는 1 이상이어야 합니다: {n_labels}")
    return ThresholdParams(
        alpha=np.ones(n_labels, dtype=np.float64),
        beta=np.ones(n_labels, dtype=np.float64),
        bias=np.zeros(n_labels, dtype=np.float64),
        lambda_raw=0.0,
    )


def _validate_shapes(params: ThresholdParams, idf: Optional[np.ndarray], knn: Optional[KnnSignal]) -> None:
    n_labels = params.n_labels
    if params.beta.shape != (n_labels,) or params.bias.shape != (n_labels,):
        raise ThresholdShapeError("alpha, beta, bias 길이가 서로 다릅니다.")
    if idf is not None and np.shape(idf) != (n_labels,):
        raise ThresholdShapeError(f"IDF 길이 {np.shape(idf)} != 레이블 수 {n_labels}")
    if knn is not None and (knn.values.ndim != 2 or knn.values.shape[1] != n_labels):
        raise ThresholdShapeError(f"KNN 신호 형태 {knn.values.shape} 가 레이블 수 {n_labels}와 맞지 않습니다.")


def compute_threshold(
    params: ThresholdParams,
    idf: Optional[np.ndarray],
    knn: Optional[KnnSignal],
    blend: Optional[float] = None,
    n_rows: Optional[int] = None,
) -> np.ndarray:
    """B×L 임계값 행렬을 계산합니다.

    Args:
        blend: None이면 sigmoid(λ_raw), 값이 있으면 그 값으로 λ를 고정
        n_rows: knn이 없을 때(idf_only) 출력 행 수
    """
    _validate_shapes(params, idf, knn)
    lam = effective_lambda(params) if blend is None else float(blend)

    if knn is not None:
        rows = knn.values.shape[0]
    elif n_rows is not None:
        rows = n_rows
    else:
        raise ThresholdShapeError("KNN 신호가 없으면 n_rows를 지정해야 합니다.")

    theta = np.broadcast_to(params.bias, (rows, params.n_labels)).copy()
    if lam != 0.0:
        if idf is None:
            raise ThresholdShapeError("λ > 0 인데 IDF 신호가 없습니다.")
        theta += lam * params.alpha * idf
    if lam != 1.0:
        if knn is None:
            raise ThresholdShapeError("λ < 1 인데 KNN 신호가 없습니다.")
        theta += (1.0 - lam) * params.beta * knn.values
    return theta


def threshold_backward(
    params: ThresholdParams,
    idf: Optional[np.ndarray],
    knn: Optional[KnnSignal],
    upstream_grad: np.ndarray,
    blend: Optional[float] = None,
) -> ThresholdGrad:
    """compute_threshold 에 대한 α, β, b, λ_raw 의 해석적 기울기"""
    _validate_shapes(params, idf, knn)
    upstream_grad = np.asarray(upstream_grad, dtype=np.float64)
    if upstream_grad.ndim != 2 or upstream_grad.shape[1] != params.n_labels:
        raise ThresholdShapeError(f"upstream 기울기 형태 {upstream_grad.shape} 가 맞지 않습니다.")
    if knn is not None and knn.values.shape != upstream_grad.shape:
        raise ThresholdShapeError(f"KNN 신호 {knn.values.shape} != upstream {upstream_grad.shape}")

    lam = effective_lambda(params) if blend is None else float(blend)
    col_sum = upstream_grad.sum(axis=0)
    zeros = np.zeros(params.n_labels, dtype=np.float64)

    d_alpha = col_sum * lam * idf if (idf is not None and lam != 0.0) else zeros.copy()
    weighted_knn = (upstream_grad * knn.values).sum(axis=0) if knn is not None else zeros.copy()
    d_beta = (1.0 - lam) * weighted_knn

    d_lambda_raw = 0.0
    if blend is None:
        sigma_prime = lam * (1.0 - lam)
        global_term = float(np.dot(col_sum, params.alpha * idf)) if idf is not None else 0.0
        local_term = float(np.dot(weighted_knn, params.beta))
        d_lambda_raw = sigma_prime * (global_term - local_term)

    return ThresholdGrad(d_alpha=d_alpha, d_beta=d_beta, d_bias=col_sum, d_lambda_raw=d_lambda_raw)


def standardize_logits(logits: np.ndarray, epsilon: float = DEFAULT_EPSILON) -> StandardizedLogits:
    """배치×레이블 전체에 대한 평균/모표준편차로 ẑ = (z − μ)/(σ + ε) 를 계산합니다.

    모든 값이 같거나 σ가 ε 규모 이하이면 평균의 반올림 오차가 1/ε 배로 커지지 않도록
    0 행렬과 σ = 0 을 돌려줍니다.
    """
    logits = np.asarray(logits, dtype=np.float64)
    mean = float(logits.mean())
    centered = logits - mean
    std = float(np.sqrt(np.mean(centered * centered)))
    if np.ptp(logits) == 0 or std <= epsilon * max(1.0, abs(mean)):
        return StandardizedLogits(values=np.zeros_like(logits), mean=mean, std=0.0, epsilon=epsilon)
    return StandardizedLogits(values=centered / (std + epsilon), mean=mean, std=std, epsilon=epsilon)


def weight_summary(params: ThresholdParams) -> dict[str, float]:
    """에폭 기록용 α/β 평균·표준편차와 유효 λ"""
    return {
        "alpha_mean": float(params.alpha.mean()),
        "alpha_std": float(params.alpha.std()),
        "beta_mean": float(params.beta.mean()),
        "beta_std": float(params.beta.std()),
        "lambda_value": effective_lambda(params),
    }
