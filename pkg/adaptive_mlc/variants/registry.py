from __future__ import annotations

from threading import Lock

from adaptive_mlc.core.constants import VARIANT_ORDER
from adaptive_mlc.exception.training.training_exception import UnknownVariantError
from adaptive_mlc.variants.base import BaseVariant


class VariantRegistry:
    """학습 변형을 중앙에서 관리하는 싱글톤 레지스트리.

    Double-checked locking으로 여러 스레드에서 처음 접근해도
    인스턴스가 하나만 만들어집니다.
    """
    _instance: VariantRegistry | None = None
    _lock: Lock = Lock()

    def __new__(cls):
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
                    # 인스턴스 변수로 초기화 (클래스 변수 공유 방지)
                    cls._instance._variants = {}
        return cls._instance

    def register(self, name: str, variant: BaseVariant) -> None:
        self._variants[name] = variant

    def get(self, name: str) -> BaseVariant:
        """이름으로 변형 조회. 등록되지 않은 이름이면 UnknownVariantError."""
        try:
            return self._variants[name]
        except KeyError:
            known = ", ".join(sorted(self._variants))
            raise UnknownVariantError(f"등록되지 않은 학습 변형입니다: {name} (가능한 값: {known})") from None

    def get_all(self) -> list[BaseVariant]:
        """등록된 변형을 요약 표 순서(VARIANT_ORDER, 그 외는 등록 순)로 반환합니다."""
        ordered = [self._variants[name] for name in VARIANT_ORDER if name in self._variants]
        return ordered + [v for name, v in self._variants.items() if name not in VARIANT_ORDER]


# Global singleton instance
registry = VariantRegistry()
