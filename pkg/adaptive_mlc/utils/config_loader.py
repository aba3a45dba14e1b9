"""
YAML 설정 파일 로더

파일 구조 (모든 블록은 선택):

    variant: adaptive          # TrainConfig 필드는 최상위에
    batch_size: 128
    loss:
      margin: 0.1
    synthetic:                 # SyntheticSpec (generate / 데이터 경로가 없을 때)
      n_samples: 5000
    data:                      # 데이터셋 파일 경로
      features: data/features.txt
      labels: data/labels.txt

우선순위: CLI 플래그 > 설정 파일 > 모델 기본값.
"""

from typing import Any, Mapping, Optional

import yaml
from pydantic import ValidationError

from adaptive_mlc.exception.common.config_exception import ConfigValidationError
from adaptive_mlc.models.dto import SyntheticSpec, TrainConfig

_NON_TRAIN_BLOCKS = {"synthetic", "data"}


def load_yaml_config(path: Optional[str]) -> dict[str, Any]:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as f:
            loaded = yaml.safe_load(f) or {}
    except OSError as e:
        raise ConfigValidationError(f"설정 파일을 읽을 수 없습니다: {path} ({e})") from e
    except yaml.YAMLError as e:
        raise ConfigValidationError(f"설정 파일 YAML 파싱 실패: {path} ({e})") from e
    if not isinstance(loaded, dict):
        raise ConfigValidationError(f"설정 파일 최상위는 매핑이어야 합니다: {path}")
    return loaded


def apply_overrides(base: Mapping[str, Any], overrides: Mapping[str, Any]) -> dict[str, Any]:
    """"loss.margin" 같은 점 표기 키를 중첩 dict에 덮어씁니다. 값이 None인 키는 무시합니다."""
    merged = {k: (dict(v) if isinstance(v, Mapping) else v) for k, v in base.items()}
    for dotted, value in overrides.items():
        if value is None:
            continue
        *parents, leaf = dotted.split(".")
        node = merged
        for key in parents:
            child = node.get(key)
            if not isinstance(child, dict):
                child = {}
                node[key] = child
            node = child
        node[leaf] = value
    return merged


def _format_validation_error(e: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in e.errors()
    )


def load_train_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> TrainConfig:
    raw = {k: v for k, v in load_yaml_config(path).items() if k not in _NON_TRAIN_BLOCKS}
    try:
        return TrainConfig.model_validate(apply_overrides(raw, overrides or {}))
    except ValidationError as e:
        raise ConfigValidationError(f"학습 설정 검증 실패: {_format_validation_error(e)}") from e


def load_synthetic_spec(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> SyntheticSpec:
    raw = load_yaml_config(path).get("synthetic") or {}
    try:
        return SyntheticSpec.model_validate(apply_overrides(raw, overrides or {}))
    except ValidationError as e:
        raise ConfigValidationError(f"합성 데이터 설정 검증 실패: {_format_validation_error(e)}") from e


def load_data_paths(path: Optional[str] = None) -> dict[str, Optional[str]]:
    data = load_yaml_config(path).get("data") or {}
    return {"features": data.get("features"), "labels": data.get("labels"), "xc": data.get("xc")}
