"""
MLP 백본 서비스

logits = W2·relu(W1·x + b1) + b2

첫 번째 층은 희소 입력(CSR)과 밀집 가중치의 곱으로 계산하고, 두 번째 층은 밀집 연산입니다.
relu의 0 지점 subgradient는 0 입니다. 옵티마이저는 MLP와 임계값 파라미터를 함께 갱신합니다.
"""

import logging
from typing import Iterator, Optional

import numpy as np
import scipy.sparse as sp

from adaptive_mlc.core import constants
from adaptive_mlc.exception.model.model_exception import (
    ModelShapeError,
    NonFiniteGradientError,
    StaleCacheError,
)
from adaptive_mlc.models.tensors import (
    ForwardCache,
    MlpGrad,
    MlpParams,
    OptimizerState,
    SparseFeatureMatrix,
    ThresholdGrad,
    ThresholdParams,
)

logger = logging.getLogger(__name__)


def parameter_count(n_features: int, hidden_dim: int, n_labels: int) -> int:
    """W1, b1, W2, b2 전체 파라미터 수"""
    return n_features * hidden_dim + hidden_dim + hidden_dim * n_labels + n_labels


def init_mlp(n_features: int, n_labels: int, hidden_dim: int, seed: int) -> MlpParams:
    """fan_in 기준 ±1/sqrt(fan_in) 균등 분포 초기화. 같은 seed면 항상 같은 텐서입니다."""
    if min(n_features, n_labels, hidden_dim) < 1:
        raise ModelShapeError(f"모든 차원은 1 이상이어야 합니다: D={n_features}, L={n_labels}, hidden={hidden_dim}")
    rng = np.random.default_rng(seed)
    bound1 = 1.0 / np.sqrt(n_features)
    bound2 = 1.0 / np.sqrt(hidden_dim)
    params = MlpParams(
        W1=rng.uniform(-bound1, bound1, size=(hidden_dim, n_features)),
        b1=rng.uniform(-bound1, bound1, size=hidden_dim),
        W2=rng.uniform(-bound2, bound2, size=(n_labels, hidden_dim)),
        b2=rng.uniform(-bound2, bound2, size=n_labels),
    )
    logger.debug({
        "event": "mlp_initialized",
        "parameter_count": parameter_count(n_features, hidden_dim, n_labels),
        "activation": constants.ACTIVATION,
    })
    return params


def _as_csr(batch) -> sp.csr_matrix:
    if isinstance(batch, SparseFeatureMatrix):
        return batch.matrix
    if sp.issparse(batch):
        return batch.tocsr()
    return sp.csr_matrix(np.atleast_2d(np.asarray(batch, dtype=np.float64)))


def forward(params: MlpParams, batch) -> tuple[np.ndarray, ForwardCache]:
    """B×L 로짓과 backward용 캐시(입력, 은닉 pre-activation, 은닉 activation)"""
    inputs = _as_csr(batch)
    if inputs.shape[1] != params.n_features:
        raise ModelShapeError(f"입력 차원 {inputs.shape[1]} != 모델 입력 차원 {params.n_features}")

    pre_activation = np.asarray(inputs @ params.W1.T) + params.b1
    hidden = np.maximum(pre_activation, 0.0)
    logits = hidden @ params.W2.T + params.b2
    return logits, ForwardCache(inputs=inputs, pre_activation=pre_activation, hidden=hidden)


def backward(params: MlpParams, cache: ForwardCache, d_logits: np.ndarray) -> MlpGrad:
    """로짓 upstream 기울기로부터 W1, b1, W2, b2 기울기를 계산합니다."""
    d_logits = np.asarray(d_logits, dtype=np.float64)
    if d_logits.shape != (cache.hidden.shape[0], params.n_labels) or cache.hidden.shape[1] != params.hidden_dim:
        raise StaleCacheError(
            f"d_logits {d_logits.shape}, 캐시 은닉 {cache.hidden.shape}, 모델 (L={params.n_labels}, hidden={params.hidden_dim})"
        )

    dW2 = d_logits.T @ cache.hidden
    db2 = d_logits.sum(axis=0)
    d_pre = (d_logits @ params.W2) * (cache.pre_activation > 0)
    dW1 = np.asarray(cache.inputs.T @ d_pre).T
    db1 = d_pre.sum(axis=0)
    return MlpGrad(dW1=dW1, db1=db1, dW2=dW2, db2=db2)


def init_optimizer(method: str, learning_rate: float) -> OptimizerState:
    return OptimizerState(
        learning_rate=learning_rate,
        method=method,
        beta1=constants.ADAM_BETA1,
        beta2=constants.ADAM_BETA2,
        eps=constants.ADAM_EPSILON,
    )


def _named_slots(
    mlp: MlpParams, mlp_grad: MlpGrad, threshold: Optional[ThresholdParams], threshold_grad: Optional[ThresholdGrad]
) -> Iterator[tuple[str, np.ndarray, np.ndarray]]:
    yield "mlp.W1", mlp.W1, mlp_grad.dW1
    yield "mlp.b1", mlp.b1, mlp_grad.db1
    yield "mlp.W2", mlp.W2, mlp_grad.dW2
    yield "mlp.b2", mlp.b2, mlp_grad.db2
    if threshold is not None and threshold_grad is not None:
        yield "threshold.alpha", threshold.alpha, threshold_grad.d_alpha
        yield "threshold.beta", threshold.beta, threshold_grad.d_beta
        yield "threshold.bias", threshold.bias, threshold_grad.d_bias


def sgd_step(
    mlp: MlpParams,
    mlp_grad: MlpGrad,
    state: OptimizerState,
    threshold: Optional[ThresholdParams] = None,
    threshold_grad: Optional[ThresholdGrad] = None,
) -> OptimizerState:
    """파라미터를 제자리(in-place) 갱신하고 step 카운터를 올립니다.

    기본은 plain SGD, state.method == 'adam' 이면 편향 보정 적응 모멘트를 사용합니다.
    갱신 전에 모든 기울기를 검사하므로 예외가 나면 어떤 파라미터도 바뀌지 않습니다.
    """
    slots = list(_named_slots(mlp, mlp_grad, threshold, threshold_grad))
    lambda_slot = None
    if threshold is not None and threshold_grad is not None:
        lambda_slot = np.array([threshold.lambda_raw], dtype=np.float64)
        slots.append(("threshold.lambda_raw", lambda_slot, np.array([threshold_grad.d_lambda_raw], dtype=np.float64)))

    for name, param, grad in slots:
        if param.shape != np.shape(grad):
            raise ModelShapeError(f"{name}: 파라미터 {param.shape} != 기울기 {np.shape(grad)}")
        if not np.all(np.isfinite(grad)):
            raise NonFiniteGradientError(name)

    state.step += 1
    if state.method == "adam":
        correction1 = 1.0 - state.beta1 ** state.step
        correction2 = 1.0 - state.beta2 ** state.step
        for name, param, grad in slots:
            m = state.first_moments.setdefault(name, np.zeros_like(param))
            v = state.second_moments.setdefault(name, np.zeros_like(param))
            m *= state.beta1
            m += (1.0 - state.beta1) * grad
            v *= state.beta2
            v += (1.0 - state.beta2) * grad * grad
            param -= state.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + state.eps)
    else:
        for _, param, grad in slots:
            param -= state.learning_rate * grad

    if lambda_slot is not None:
        threshold.lambda_raw = float(lambda_slot[0])
    return state
