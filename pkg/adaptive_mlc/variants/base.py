from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from adaptive_mlc.models.dto import LossConfig
from adaptive_mlc.models.tensors import KnnSignal, ThresholdGrad, ThresholdParams
from adaptive_mlc.services import threshold_service


class BaseVariant(ABC):
    """
    학습 변형(variant)이 구현해야 하는 기본 인터페이스.

    변형마다 다른 것은 임계값을 어떻게 만들고 어떤 신호를 쓰는지 뿐이며,
    MLP/옵티마이저/손실 계산 흐름은 트레이너가 공통으로 처리합니다.

    새로운 변형을 추가할 때:
    1. 이 클래스를 상속받아 name, uses_knn, blend 등을 정의
    2. 필요하면 thresholds / threshold_grad / loss_config 재정의
    3. 모듈 하단에서 registry.register()로 등록

    Example:
        class NewVariant(BaseVariant):
            name = "new"
            uses_knn = True
            blend = 0.25

        registry.register(NewVariant.name, NewVariant())
    """
    name: str = ""
    uses_knn: bool = True
    uses_idf: bool = True
    # None이면 sigmoid(λ_raw)를 학습, 값이 있으면 λ를 그 값으로 고정
    blend: Optional[float] = None

    def loss_config(self, base: LossConfig) -> LossConfig:
        return base

    def reported_lambda(self, params: ThresholdParams) -> float:
        """EpochRecord.lambda_value에 기록할 유효 λ"""
        if self.blend is not None:
            return float(self.blend)
        return threshold_service.effective_lambda(params)

    def thresholds(
        self,
        params: ThresholdParams,
        idf: np.ndarray,
        knn: Optional[KnnSignal],
        n_rows: int,
    ) -> Optional[np.ndarray]:
        """B×L 임계값. None이면 임계값 없이 로짓 부호(sigmoid > 0.5)로 판정합니다."""
        return threshold_service.compute_threshold(
            params,
            idf if self.uses_idf else None,
            knn if self.uses_knn else None,
            blend=self.blend,
            n_rows=n_rows,
        )

    def threshold_grad(
        self,
        params: ThresholdParams,
        idf: np.ndarray,
        knn: Optional[KnnSignal],
        d_threshold: np.ndarray,
    ) -> Optional[ThresholdGrad]:
        """임계값 파라미터 기울기. None이면 임계값 파라미터를 갱신하지 않습니다."""
        return threshold_service.threshold_backward(
            params,
            idf if self.uses_idf else None,
            knn if self.uses_knn else None,
            d_threshold,
            blend=self.blend,
        )

    @property
    @abstractmethod
    def description(self) -> str:
        """요약 로그/플롯 범례용 한 줄 설명"""
        ...
