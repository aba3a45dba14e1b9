"""
정적 임계값 기준선

θ ≡ 0 이고 sigmoid(z) > 0.5 (즉 z > 0) 로 판정합니다. 마진을 걸 θ가 없으므로
마진 항은 끄고 BCE만 최적화합니다. 임계값 파라미터는 초기값 그대로 남습니다.
"""

from typing import Optional

import numpy as np

from adaptive_mlc.models.dto import LossConfig
from adaptive_mlc.models.tensors import KnnSignal, ThresholdGrad, ThresholdParams
from adaptive_mlc.services import threshold_service
from adaptive_mlc.variants.base import BaseVariant
from adaptive_mlc.variants.registry import registry


class StaticVariant(BaseVariant):
    name = "static"
    uses_knn = False
    uses_idf = False
    blend = None

    def loss_config(self, base: LossConfig) -> LossConfig:
        return base.model_copy(update={"margin_weight": 0.0})

    def reported_lambda(self, params: ThresholdParams) -> float:
        return threshold_service.effective_lambda(params)

    def thresholds(
        self, params: ThresholdParams, idf: np.ndarray, knn: Optional[KnnSignal], n_rows: int
    ) -> Optional[np.ndarray]:
        return None

    def threshold_grad(
        self, params: ThresholdParams, idf: np.ndarray, knn: Optional[KnnSignal], d_threshold: np.ndarray
    ) -> Optional[ThresholdGrad]:
        return None

    @property
    def description(self) -> str:
        return "static 0.5 cutoff"


registry.register(StaticVariant.name, StaticVariant())
