import os
from dotenv import load_dotenv

load_dotenv()

APP_ENV = os.getenv("APP_ENV", "production")
IS_DEBUG = APP_ENV == "development"

# 학습 산출물(metrics.csv, 체크포인트, 플롯) 기본 저장 위치
OUTPUT_DIR = os.getenv("MLC_OUTPUT_DIR", "runs")

LOG_DIR = os.getenv("MLC_LOG_DIR", "logs")
LOG_LEVEL = os.getenv("MLC_LOG_LEVEL", "DEBUG" if IS_DEBUG else "INFO")


def _parse_positive_int(value: str | None, default: int) -> int:
    if not value:
        return default
    try:
        parsed = int(value)
    except ValueError:
        return default
    return parsed if parsed >= 1 else default


# 평가 배치를 나눠 처리할 워커 스레드 수 (1이면 순차 실행)
NUM_WORKERS = _parse_positive_int(os.getenv("MLC_NUM_WORKERS"), 1)
