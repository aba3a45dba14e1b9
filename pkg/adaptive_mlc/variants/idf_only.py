from adaptive_mlc.variants.base import BaseVariant
from adaptive_mlc.variants.registry import registry


class IdfOnlyVariant(BaseVariant):
    """θ = α·IDF + b. KNN 신호는 계산하지 않고 λ는 1로 고정합니다."""
    name = "idf_only"
    uses_knn = False
    uses_idf = True
    blend = 1.0

    @property
    def description(self) -> str:
        return "IDF only"


registry.register(IdfOnlyVariant.name, IdfOnlyVariant())
