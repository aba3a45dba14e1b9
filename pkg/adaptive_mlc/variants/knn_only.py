from adaptive_mlc.variants.base import BaseVariant
from adaptive_mlc.variants.registry import registry


class KnnOnlyVariant(BaseVariant):
    """θ = β·KNN + b. λ는 0으로 고정합니다."""
    name = "knn_only"
    uses_knn = True
    uses_idf = False
    blend = 0.0

    @property
    def description(self) -> str:
        return "KNN only"


registry.register(KnnOnlyVariant.name, KnnOnlyVariant())
