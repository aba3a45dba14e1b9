"""
구조화 로깅 테스트 모듈

RunContextFilter, JsonFormatter, setup_logging 이 실행 컨텍스트(run_id, variant)와
numpy 값이 섞인 dict 메시지를 올바르게 JSON 한 줄로 만드는지 검증합니다.
"""

import json
import logging

import numpy as np

from adaptive_mlc.core.context import run_context
from adaptive_mlc.core.logging_config import JsonFormatter, RunContextFilter, setup_logging


def _make_record(msg, level=logging.INFO, **extra):
    record = logging.LogRecord(
        name="test.logger", level=level, pathname="test.py", lineno=1, msg=msg, args=None, exc_info=None
    )
    for k, v in extra.items():
        setattr(record, k, v)
    return record


class TestRunContextFilter:
    def test_injects_run_context(self):
        """run_context 블록 안에서는 run_id / variant 가 레코드에 주입되는지 검증"""
        record = _make_record("hello")
        with run_context("run-123", "adaptive"):
            assert RunContextFilter().filter(record) is True
        assert record.run_id == "run-123"
        assert record.variant == "adaptive"

    def test_outside_context_is_none(self):
        """컨텍스트 밖에서는 None 이 주입되는지 검증"""
        record = _make_record("hello")
        RunContextFilter().filter(record)
        assert record.run_id is None
        assert record.variant is None


class TestJsonFormatter:
    def setup_method(self):
        self.formatter = JsonFormatter()

    def test_basic_structure(self):
        """JSON 출력에 timestamp, level, logger, message 가 있는지 검증"""
        parsed = json.loads(self.formatter.format(_make_record("메시지")))
        assert parsed["level"] == "INFO"
        assert parsed["logger"] == "test.logger"
        assert parsed["message"] == "메시지"
        assert "timestamp" in parsed

    def test_dict_message_with_numpy_values(self):
        """dict 메시지 안의 numpy 스칼라/배열이 JSON 으로 변환되는지 검증"""
        record = _make_record({"event": "epoch_end", "loss": np.float64(0.5), "rows": np.array([1, 2])})
        parsed = json.loads(self.formatter.format(record))
        assert parsed["event"] == "epoch_end"
        assert parsed["loss"] == 0.5
        assert parsed["rows"] == [1, 2]

    def test_extra_fields_merged(self):
        """extra 로 넘긴 속성이 출력에 병합되는지 검증"""
        parsed = json.loads(self.formatter.format(_make_record("x", batch=np.int64(3))))
        assert parsed["batch"] == 3

    def test_run_context_fields(self):
        record = _make_record("x", run_id="abc", variant="static")
        parsed = json.loads(self.formatter.format(record))
        assert parsed["run_id"] == "abc"
        assert parsed["variant"] == "static"


class TestSetupLogging:
    def test_writes_json_lines_to_file(self, tmp_path):
        """setup_logging 후 train.log 에 JSON 한 줄씩 기록되는지 검증"""
        setup_logging(log_dir=str(tmp_path), level="INFO")
        with run_context("file-run", "knn_only"):
            logging.getLogger("adaptive_mlc.test").info({"event": "probe", "value": 1})
        for handler in logging.getLogger().handlers:
            handler.flush()

        lines = (tmp_path / "train.log").read_text(encoding="utf-8").strip().splitlines()
        parsed = json.loads(lines[-1])
        assert parsed["event"] == "probe"
        assert parsed["run_id"] == "file-run"
        assert parsed["variant"] == "knn_only"

    def test_repeated_setup_does_not_duplicate_handlers(self, tmp_path):
        setup_logging(log_dir=str(tmp_path))
        setup_logging(log_dir=str(tmp_path))
        assert len(logging.getLogger().handlers) == 2
