import contextvars
from contextlib import contextmanager
from typing import Iterator, Optional

# 실행(run) 단위 식별자와 현재 학습 중인 변형 이름
# 로깅 시 매번 인자로 넘기지 않고도 어느 실행의 로그인지 식별하기 위해 사용합니다.
run_id_context: contextvars.ContextVar[Optional[str]] = contextvars.ContextVar("run_id", default=None)
variant_context: contextvars.ContextVar[Optional[str]] = contextvars.ContextVar("variant", default=None)


def get_run_id() -> Optional[str]:
    """현재 컨텍스트의 Run ID를 반환합니다."""
    return run_id_context.get()


def set_run_id(run_id: str) -> None:
    """현재 컨텍스트에 Run ID를 설정합니다."""
    run_id_context.set(run_id)


def get_variant() -> Optional[str]:
    return variant_context.get()


@contextmanager
def run_context(run_id: str, variant: Optional[str] = None) -> Iterator[None]:
    """블록 안에서만 run_id / variant 컨텍스트를 설정하고 종료 시 복원합니다."""
    run_token = run_id_context.set(run_id)
    variant_token = variant_context.set(variant)
    try:
        yield
    finally:
        variant_context.reset(variant_token)
        run_id_context.reset(run_token)
