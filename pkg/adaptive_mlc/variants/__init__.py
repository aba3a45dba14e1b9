from adaptive_mlc.variants.base import BaseVariant
from adaptive_mlc.variants.registry import VariantRegistry, registry

# Import variants to register them on module import.
from adaptive_mlc.variants import adaptive, idf_only, knn_only, static

__all__ = ["BaseVariant", "VariantRegistry", "registry"]
