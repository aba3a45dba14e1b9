"""
MLP 백본 / 옵티마이저 테스트
"""

import numpy as np
import pytest
import scipy.sparse as sp

from adaptive_mlc.exception.model.model_exception import (
    ModelShapeError,
    NonFiniteGradientError,
    StaleCacheError,
)
from adaptive_mlc.models.dto import LossConfig
from adaptive_mlc.models.tensors import KnnSignal, MlpGrad, MlpParams, ThresholdGrad, ThresholdParams
from adaptive_mlc.services import loss_service, model_service, threshold_service
from tests.helpers import FD_STEP, central_difference, relative_error


@pytest.fixture
def unit_network():
    """W1=[[2]], b1=[0], W2=[[3]], b2=[1] 인 1×1×1 네트워크"""
    return MlpParams(W1=np.array([[2.0]]), b1=np.array([0.0]), W2=np.array([[3.0]]), b2=np.array([1.0]))


def _zero_grad(params: MlpParams) -> MlpGrad:
    return MlpGrad(
        dW1=np.zeros_like(params.W1), db1=np.zeros_like(params.b1),
        dW2=np.zeros_like(params.W2), db2=np.zeros_like(params.b2),
    )


class TestForward:
    def test_hand_value(self, unit_network):
        """x=0.5 → 3·relu(1) + 1 = 4"""
        logits, _ = model_service.forward(unit_network, np.array([[0.5]]))
        assert logits[0, 0] == pytest.approx(4.0)

    def test_zero_network(self):
        params = MlpParams(np.zeros((4, 3)), np.zeros(4), np.zeros((2, 4)), np.zeros(2))
        logits, _ = model_service.forward(params, np.ones((5, 3)))
        assert logits.shape == (5, 2)
        assert not logits.any()

    def test_zero_input_uses_bias_path(self, rng):
        params = model_service.init_mlp(6, 3, 4, seed=0)
        logits, _ = model_service.forward(params, sp.csr_matrix((2, 6)))
        expected = params.W2 @ np.maximum(params.b1, 0) + params.b2
        np.testing.assert_allclose(logits, np.tile(expected, (2, 1)))

    def test_input_dimension_mismatch(self):
        params = model_service.init_mlp(4, 2, 3, seed=0)
        with pytest.raises(ModelShapeError):
            model_service.forward(params, np.ones((1, 5)))


class TestBackward:
    def test_hand_values(self, unit_network):
        """d_logit=1 → dW2=1, db2=1, dW1=3·1·0.5=1.5, db1=3"""
        _, cache = model_service.forward(unit_network, np.array([[0.5]]))
        grad = model_service.backward(unit_network, cache, np.array([[1.0]]))
        assert grad.dW2[0, 0] == pytest.approx(1.0)
        assert grad.db2[0] == pytest.approx(1.0)
        assert grad.dW1[0, 0] == pytest.approx(1.5)
        assert grad.db1[0] == pytest.approx(3.0)

    def test_zero_upstream(self, rng):
        params = model_service.init_mlp(5, 3, 4, seed=1)
        _, cache = model_service.forward(params, rng.normal(size=(2, 5)))
        grad = model_service.backward(params, cache, np.zeros((2, 3)))
        for g in (grad.dW1, grad.db1, grad.dW2, grad.db2):
            assert not g.any()

    @pytest.mark.parametrize("seed", range(50))
    def test_matches_finite_differences(self, seed):
        """end-to-end 기울기가 중앙 차분과 1e-4 이내로 일치"""
        rng = np.random.default_rng(seed)
        params = model_service.init_mlp(5, 3, 4, seed=seed)
        x = sp.csr_matrix(rng.normal(size=(3, 5)))
        upstream = rng.normal(size=(3, 3))
        # relu 꺾임점에서 떨어뜨리기
        _, cache = model_service.forward(params, x)
        params.b1[np.abs(cache.pre_activation).min(axis=0) < 1e-3] += 0.01

        def scalar():
            logits, _ = model_service.forward(params, x)
            return float((upstream * logits).sum())

        _, cache = model_service.forward(params, x)
        grad = model_service.backward(params, cache, upstream)

        assert relative_error(grad.dW1, central_difference(scalar, params.W1)) < 1e-4
        assert relative_error(grad.db1, central_difference(scalar, params.b1)) < 1e-4
        assert relative_error(grad.dW2, central_difference(scalar, params.W2)) < 1e-4
        assert relative_error(grad.db2, central_difference(scalar, params.b2)) < 1e-4

    def test_stale_cache(self):
        params = model_service.init_mlp(3, 2, 4, seed=0)
        _, cache = model_service.forward(params, np.ones((2, 3)))
        with pytest.raises(StaleCacheError):
            model_service.backward(params, cache, np.ones((3, 2)))


class TestEndToEndGradient:
    """sparse 입력 → MLP → 복합 손실 ← 임계값(IDF, KNN, λ) 전체 경로의 해석 기울기 검증"""

    @staticmethod
    def _instance(seed):
        rng = np.random.default_rng(seed)
        n_rows, n_features = int(rng.integers(1, 4)), int(rng.integers(2, 6))
        n_labels, hidden = int(rng.integers(1, 5)), int(rng.integers(2, 5))
        x = sp.csr_matrix(rng.normal(size=(n_rows, n_features)) * (rng.uniform(size=(n_rows, n_features)) < 0.7))
        mlp = model_service.init_mlp(n_features, n_labels, hidden, seed=seed)
        mlp.b1 += rng.normal(0.0, 0.3, size=hidden)
        mlp.b2 += rng.normal(0.0, 0.5, size=n_labels)
        threshold = ThresholdParams(
            alpha=rng.normal(size=n_labels),
            beta=rng.normal(size=n_labels),
            bias=rng.normal(size=n_labels),
            lambda_raw=float(rng.normal()),
        )
        idf = rng.uniform(0.0, 4.0, size=n_labels)
        knn = KnnSignal(rng.uniform(size=(n_rows, n_labels)), 1e-12)
        y = (rng.uniform(size=(n_rows, n_labels)) < 0.4).astype(np.float64)
        return rng, x, mlp, threshold, idf, knn, y

    @pytest.mark.parametrize("seed", range(50))
    def test_all_parameters_match_finite_differences(self, seed):
        """W1, b1, W2, b2, α, β, b, λ_raw 기울기가 중앙 차분과 1e-4 이내로 일치 (relu/힌지 꺾임점 제외)"""
        rng, x, mlp, threshold, idf, knn, y = self._instance(seed)

        # relu 꺾임점에서 떨어뜨리기
        for _ in range(20):
            _, cache = model_service.forward(mlp, x)
            near_kink = np.abs(cache.pre_activation).min(axis=0) < 1e-2
            if not near_kink.any():
                break
            mlp.b1[near_kink] += 0.05

        # 모든 셀의 힌지가 꺾임점에서 1e-2 이상 떨어지는 Δ 선택
        logits, cache = model_service.forward(mlp, x)
        gap = (1 - 2 * y) * (logits - threshold_service.compute_threshold(threshold, idf, knn))
        margin = next(d for d in np.arange(0.05, 0.5, 0.005) if np.abs(gap + d).min() >= 1e-2)
        config = LossConfig(margin=float(margin), margin_weight=0.5, pos_weight=float(rng.uniform(0.5, 3.0)))

        def total():
            z, _ = model_service.forward(mlp, x)
            theta = threshold_service.compute_threshold(threshold, idf, knn)
            return loss_service.composite_loss(z, theta, y, config).total

        theta = threshold_service.compute_threshold(threshold, idf, knn)
        out = loss_service.composite_loss(logits, theta, y, config)
        mlp_grad = model_service.backward(mlp, cache, out.d_logits)
        threshold_grad = threshold_service.threshold_backward(threshold, idf, knn, out.d_threshold)

        assert relative_error(mlp_grad.dW1, central_difference(total, mlp.W1)) < 1e-4
        assert relative_error(mlp_grad.db1, central_difference(total, mlp.b1)) < 1e-4
        assert relative_error(mlp_grad.dW2, central_difference(total, mlp.W2)) < 1e-4
        assert relative_error(mlp_grad.db2, central_difference(total, mlp.b2)) < 1e-4
        assert relative_error(threshold_grad.d_alpha, central_difference(total, threshold.alpha)) < 1e-4
        assert relative_error(threshold_grad.d_beta, central_difference(total, threshold.beta)) < 1e-4
        assert relative_error(threshold_grad.d_bias, central_difference(total, threshold.bias)) < 1e-4

        original = threshold.lambda_raw
        threshold.lambda_raw = original + FD_STEP
        plus = total()
        threshold.lambda_raw = original - FD_STEP
        minus = total()
        threshold.lambda_raw = original
        assert relative_error(threshold_grad.d_lambda_raw, (plus - minus) / (2 * FD_STEP)) < 1e-4


class TestInitMlp:
    def test_parameter_count(self):
        assert model_service.parameter_count(100, 50, 20) == 6070

    def test_shapes(self):
        params = model_service.init_mlp(100, 20, 50, seed=0)
        assert params.W1.shape == (50, 100)
        assert params.W2.shape == (20, 50)
        assert params.W1.size + params.b1.size + params.W2.size + params.b2.size == 6070

    def test_same_seed_identical(self):
        a = model_service.init_mlp(7, 3, 5, seed=11)
        b = model_service.init_mlp(7, 3, 5, seed=11)
        np.testing.assert_array_equal(a.W1, b.W1)
        np.testing.assert_array_equal(a.W2, b.W2)
        np.testing.assert_array_equal(a.b1, b.b1)

    def test_rejects_zero_dimension(self):
        with pytest.raises(ModelShapeError):
            model_service.init_mlp(0, 3, 5, seed=0)


class TestSgdStep:
    def test_plain_sgd_hand_value(self, unit_network):
        """lr=0.1, 파라미터 1.0, 기울기 0.5 → 0.95"""
        unit_network.W1[0, 0] = 1.0
        grad = _zero_grad(unit_network)
        grad.dW1[0, 0] = 0.5
        state = model_service.init_optimizer("sgd", 0.1)

        model_service.sgd_step(unit_network, grad, state)

        assert unit_network.W1[0, 0] == pytest.approx(0.95)
        assert state.step == 1

    def test_zero_gradient_keeps_parameters(self):
        params = model_service.init_mlp(4, 2, 3, seed=0)
        before = params.copy()
        model_service.sgd_step(params, _zero_grad(params), model_service.init_optimizer("sgd", 0.1))
        np.testing.assert_array_equal(params.W1, before.W1)
        np.testing.assert_array_equal(params.b2, before.b2)

    @pytest.mark.parametrize("g", [0.003, 1.0, 50.0])
    def test_adam_first_step_magnitude_is_lr(self, unit_network, g):
        """편향 보정된 첫 Adam 스텝의 크기는 |g|와 무관하게 ≈ lr"""
        grad = _zero_grad(unit_network)
        grad.dW2[0, 0] = g
        state = model_service.init_optimizer("adam", 0.01)

        model_service.sgd_step(unit_network, grad, state)

        assert 3.0 - unit_network.W2[0, 0] == pytest.approx(0.01, rel=1e-4)

    def test_updates_threshold_parameters(self):
        params = model_service.init_mlp(2, 2, 2, seed=0)
        threshold = threshold_service.init_params(2)
        t_grad = ThresholdGrad(
            d_alpha=np.array([1.0, 0.0]), d_beta=np.zeros(2), d_bias=np.array([0.0, -2.0]), d_lambda_raw=0.5
        )

        model_service.sgd_step(params, _zero_grad(params), model_service.init_optimizer("sgd", 0.1), threshold, t_grad)

        np.testing.assert_allclose(threshold.alpha, [0.9, 1.0])
        np.testing.assert_allclose(threshold.bias, [0.0, 0.2])
        assert threshold.lambda_raw == pytest.approx(-0.05)

    def test_non_finite_gradient_names_tensor(self):
        """NaN 기울기 → 텐서 이름이 담긴 예외, 파라미터는 변경되지 않음"""
        params = model_service.init_mlp(3, 2, 2, seed=0)
        before = params.copy()
        grad = _zero_grad(params)
        grad.dW1[0, 0] = 1.0
        grad.dW2[1, 0] = np.nan

        with pytest.raises(NonFiniteGradientError) as exc_info:
            model_service.sgd_step(params, grad, model_service.init_optimizer("sgd", 0.1))

        assert exc_info.value.tensor_name == "mlp.W2"
        np.testing.assert_array_equal(params.W1, before.W1)

    def test_shape_mismatch(self):
        params = model_service.init_mlp(3, 2, 2, seed=0)
        grad = _zero_grad(params)
        grad.db1 = np.zeros(5)
        with pytest.raises(ModelShapeError):
            model_service.sgd_step(params, grad, model_service.init_optimizer("sgd", 0.1))
