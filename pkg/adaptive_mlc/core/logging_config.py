import logging
import json
import os
from logging.handlers import TimedRotatingFileHandler

import numpy as np

from adaptive_mlc.core.context import get_run_id, get_variant


class RunContextFilter(logging.Filter):
    """
    모든 로그 레코드에 run_id / variant 를 주입합니다.

    Rationale:
        한 프로세스에서 ablation 스위트가 네 변형을 순차 학습하므로,
        로그 한 줄만 보고도 어떤 실행/변형의 로그인지 구분할 수 있어야 합니다.
    """

    def filter(self, record: logging.LogRecord) -> bool:
        record.run_id = get_run_id()
        record.variant = get_variant()
        return True


def _to_jsonable(value):
    # numpy 스칼라/배열이 extra나 dict 메시지에 섞여 들어와도 직렬화되도록 변환
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {k: _to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_jsonable(v) for v in value]
    return value


class JsonFormatter(logging.Formatter):
    # 표준 LogRecord 속성 리스트 (extra 데이터를 구분하기 위함)
    DEFAULT_ATTRS = {
        "name", "msg", "args", "levelname", "levelno", "pathname", "filename",
        "module", "exc_info", "exc_text", "stack_info", "lineno", "funcName",
        "created", "msecs", "relativeCreated", "thread", "threadName",
        "processName", "process", "taskName", "run_id", "variant",
    }

    def format(self, record: logging.LogRecord) -> str:
        # 메시지가 dict면 그대로 기반으로 삼고, 아니면 기본 구조 생성
        message_body = record.msg if isinstance(record.msg, dict) else {
            "message": record.getMessage()
        }

        log = {
            "timestamp": self.formatTime(record, datefmt="%Y-%m-%dT%H:%M:%S"),
            "level": record.levelname,
            "logger": record.name,
            "run_id": getattr(record, "run_id", None),
            "variant": getattr(record, "variant", None),
            **_to_jsonable(message_body),
        }

        extra_data = {
            k: v for k, v in record.__dict__.items()
            if k not in self.DEFAULT_ATTRS and not k.startswith("_")
        }
        if extra_data:
            log.update(_to_jsonable(extra_data))

        if record.exc_info:
            log["exception"] = self.formatException(record.exc_info)

        return json.dumps(log, ensure_ascii=False)


def setup_logging(log_dir: str = "logs", level: str = "INFO") -> None:
    os.makedirs(log_dir, exist_ok=True)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)

    # 기존 핸들러 제거 (중복 방지)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    json_formatter = JsonFormatter()
    context_filter = RunContextFilter()

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(json_formatter)
    console_handler.addFilter(context_filter)
    root_logger.addHandler(console_handler)

    # 일자별 파일 로테이션 핸들러 (자정 기준, 7일 보관)
    file_handler = TimedRotatingFileHandler(
        filename=os.path.join(log_dir, "train.log"),
        when="midnight",
        backupCount=7,
        encoding="utf-8",
        utc=False,
    )
    file_handler.setFormatter(json_formatter)
    file_handler.addFilter(context_filter)
    root_logger.addHandler(file_handler)
