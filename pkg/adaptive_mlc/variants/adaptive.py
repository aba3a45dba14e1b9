from adaptive_mlc.variants.base import BaseVariant
from adaptive_mlc.variants.registry import registry


class AdaptiveVariant(BaseVariant):
    """IDF 전역 신호와 KNN 지역 신호를 학습 가능한 λ로 섞는 전체 모델"""
    name = "adaptive"
    uses_knn = True
    uses_idf = True
    blend = None

    @property
    def description(self) -> str:
        return "IDF + KNN fusion"


registry.register(AdaptiveVariant.name, AdaptiveVariant())
