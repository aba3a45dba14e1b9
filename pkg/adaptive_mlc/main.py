"""
adaptive-mlc 명령행 진입점

    python -m adaptive_mlc train    --features F --labels L [--variant adaptive] ...
    python -m adaptive_mlc train    --xc data/train.txt ...
    python -m adaptive_mlc ablate   [--config configs/ablation.yaml] ...
    python -m adaptive_mlc generate --out data/ [--n-samples 5000] ...
    python -m adaptive_mlc eval     --checkpoint runs/checkpoints/best.npz --features F --labels L

결과 요약은 stdout에 JSON 한 줄로, 로그는 JSON 포맷으로 stderr와 로그 파일에 남깁니다.
실패하면 stderr 마지막 줄에 `error code=<CODE> message="<msg>"` 를 출력하고
예외의 exit_code로 종료합니다.
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Optional, Sequence

from pydantic import ValidationError

import adaptive_mlc.variants  # noqa: F401  (변형 등록)
from adaptive_mlc.core.config import LOG_DIR, LOG_LEVEL
from adaptive_mlc.core.constants import BEST_CHECKPOINT, LAST_CHECKPOINT
from adaptive_mlc.core.logging_config import setup_logging
from adaptive_mlc.exception.base_exception import BaseCustomException, ErrorCode
from adaptive_mlc.exception.common.config_exception import ConfigValidationError
from adaptive_mlc.models.dto import TrainConfig
from adaptive_mlc.models.tensors import Dataset
from adaptive_mlc.repositories.npz_repository import NpzCheckpointRepository, load_checkpoint_file
from adaptive_mlc.services import artifact_service, dataset_service
from adaptive_mlc.services.trainer_service import TrainerService, split_dataset
from adaptive_mlc.utils import config_loader
from adaptive_mlc.utils.dataset_io import load_pair, load_xc_dataset, write_dataset

logger = logging.getLogger(__name__)

# CLI 플래그 → 설정 키 (점 표기는 중첩 모델)
TRAIN_FLAG_KEYS = {
    "variant": "variant",
    "epochs": "max_epochs",
    "batch_size": "batch_size",
    "lr": "learning_rate",
    "optimizer": "optimizer",
    "hidden_dim": "hidden_dim",
    "patience": "early_stop_patience",
    "eval_every": "eval_every",
    "eval_fraction": "eval_fraction",
    "k": "eval_k",
    "reference_size": "eval_reference_size",
    "train_knn": "train_knn_source",
    "margin": "loss.margin",
    "margin_weight": "loss.margin_weight",
    "pos_weight": "loss.pos_weight",
    "standardize": "loss.use_standardization",
    "seed": "seed",
    "split_seed": "split_seed",
    "out": "output_dir",
}
SYNTHETIC_FLAG_KEYS = {
    "n_samples": "n_samples",
    "n_labels": "n_labels",
    "n_features": "n_features",
    "zipf": "zipf_exponent",
    "mean_labels": "mean_labels_per_sample",
    "data_seed": "seed",
}


def _overrides(args: argparse.Namespace, mapping: dict[str, str]) -> dict[str, Any]:
    return {key: getattr(args, flag, None) for flag, key in mapping.items()}


def _emit(payload: dict) -> None:
    print(json.dumps(payload, ensure_ascii=False))


def _load_data(args: argparse.Namespace) -> Dataset:
    """--xc 또는 --features/--labels (설정 파일 data 블록 포함)가 있으면 파일을, 없으면 합성 데이터를 사용합니다."""
    paths = config_loader.load_data_paths(args.config)
    xc_path = args.xc or paths["xc"]
    if xc_path:
        return Dataset(*load_xc_dataset(xc_path))
    features_path = args.features or paths["features"]
    labels_path = args.labels or paths["labels"]
    if features_path and labels_path:
        return load_pair(features_path, labels_path)
    if features_path or labels_path:
        raise ConfigValidationError("--features 와 --labels 는 함께 지정해야 합니다.")
    spec = config_loader.load_synthetic_spec(args.config, _overrides(args, SYNTHETIC_FLAG_KEYS))
    features, labels = dataset_service.generate_synthetic(spec)
    return Dataset(features, labels)


def _train_config(args: argparse.Namespace) -> TrainConfig:
    return config_loader.load_train_config(args.config, _overrides(args, TRAIN_FLAG_KEYS))


def cmd_train(args: argparse.Namespace) -> None:
    config = _train_config(args)
    dataset = _load_data(args)
    data = split_dataset(dataset, config.eval_fraction, config.split_seed)

    repository = NpzCheckpointRepository(os.path.join(config.output_dir, "checkpoints"))
    if not args.resume:
        for name in (LAST_CHECKPOINT, BEST_CHECKPOINT):
            path = os.path.join(repository.directory, f"{name}.npz")
            if os.path.exists(path):
                os.remove(path)

    run = TrainerService().run_variant(config, data, repository)
    artifact_service.emit_artifacts(run.records, config.output_dir)
    _emit({"event": "train_finished", **run.summary_row().model_dump(), "output_dir": config.output_dir})


def cmd_ablate(args: argparse.Namespace) -> None:
    config = _train_config(args)
    dataset = _load_data(args)
    data = split_dataset(dataset, config.eval_fraction, config.split_seed)

    result = TrainerService().run_ablation_suite(config, data)
    records = [r for run in result.runs.values() for r in run.records]
    artifact_service.emit_artifacts(records, config.output_dir)
    _emit({
        "event": "ablation_finished",
        "summary": [row.model_dump() for row in result.summary],
        "output_dir": config.output_dir,
    })


def cmd_generate(args: argparse.Namespace) -> None:
    spec = config_loader.load_synthetic_spec(args.config, _overrides(args, SYNTHETIC_FLAG_KEYS))
    features, labels = dataset_service.generate_synthetic(spec)
    features_path = os.path.join(args.out, "features.txt")
    labels_path = os.path.join(args.out, "labels.txt")
    write_dataset(features, labels, features_path, labels_path)
    _emit({
        "event": "dataset_generated",
        "features": features_path,
        "labels": labels_path,
        "n_samples": features.n_samples,
        "n_labels": labels.n_labels,
        "total_positives": labels.total_positives,
    })


def cmd_eval(args: argparse.Namespace) -> None:
    config = _train_config(args)
    checkpoint = load_checkpoint_file(args.checkpoint)
    given = sorted(flag for flag in ("batch_size", "k", "standardize", "pos_weight") if getattr(args, flag) is not None)
    if checkpoint.eval_settings and given:
        # 판정 설정은 체크포인트에 저장된 학습 시점 값을 따릅니다
        logger.warning({"event": "eval_flags_ignored", "flags": given})
    dataset = load_pair(args.features, args.labels)
    result = TrainerService().evaluate(checkpoint, dataset, config)
    _emit({
        "event": "eval_finished",
        "variant": checkpoint.variant,
        "epoch": checkpoint.epoch,
        "macro_f1": result.macro_f1,
        "micro_f1": result.micro_f1,
        "bce": result.bce,
        "positive_ratio": result.positive_ratio,
        "bucket_macro_f1": result.bucket_macro_f1,
    })


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML 설정 파일 (CLI 플래그가 파일 값을 덮어씀)")
    parser.add_argument("--log-dir", default=LOG_DIR)
    parser.add_argument("--log-level", default=LOG_LEVEL)


def _add_synthetic_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n-samples", type=int)
    parser.add_argument("--n-labels", type=int)
    parser.add_argument("--n-features", type=int)
    parser.add_argument("--zipf", type=float, help="Zipf 지수")
    parser.add_argument("--mean-labels", type=float, help="샘플당 평균 레이블 수")
    parser.add_argument("--data-seed", type=int, help="합성 데이터 시드")


def _add_train_flags(parser: argparse.ArgumentParser, with_variant: bool = True) -> None:
    if with_variant:
        parser.add_argument("--variant", help="adaptive | idf_only | knn_only | static")
    parser.add_argument("--features", help="피처 파일 경로")
    parser.add_argument("--labels", help="레이블 파일 경로")
    parser.add_argument("--xc", help="단일 파일 XC 포맷 데이터셋 (헤더 N D L, 줄마다 'l1,l2 f:v ...')")
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--batch-size", type=int)
    parser.add_argument("--lr", type=float)
    parser.add_argument("--optimizer", help="sgd | adam")
    parser.add_argument("--hidden-dim", type=int)
    parser.add_argument("--patience", type=int)
    parser.add_argument("--eval-every", type=int)
    parser.add_argument("--eval-fraction", type=float)
    parser.add_argument("--k", type=int, help="평가 시점 KNN 이웃 수")
    parser.add_argument("--reference-size", type=int, help="평가 시점 KNN 참조 집합 크기")
    parser.add_argument("--train-knn", help="학습 중 KNN 신호 출처: batch_labels | reference")
    parser.add_argument("--margin", type=float)
    parser.add_argument("--margin-weight", type=float)
    parser.add_argument("--pos-weight", type=float)
    parser.add_argument("--standardize", action="store_true", default=None)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--split-seed", type=int)
    parser.add_argument("--out", help="산출물 디렉터리")
    _add_synthetic_flags(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adaptive-mlc", description="Adaptive-threshold multi-label training")
    subparsers = parser.add_subparsers(dest="command", required=True)

    train = subparsers.add_parser("train", help="변형 하나 학습")
    _add_common(train)
    _add_train_flags(train)
    train.add_argument("--resume", action="store_true", help="<out>/checkpoints/last.npz 에서 이어서 학습")
    train.set_defaults(handler=cmd_train)

    ablate = subparsers.add_parser("ablate", help="네 변형 모두 학습하고 비교")
    _add_common(ablate)
    _add_train_flags(ablate, with_variant=False)
    ablate.set_defaults(handler=cmd_ablate)

    generate = subparsers.add_parser("generate", help="롱테일 합성 데이터셋 생성")
    _add_common(generate)
    _add_synthetic_flags(generate)
    generate.add_argument("--out", required=True, help="features.txt / labels.txt 를 쓸 디렉터리")
    generate.set_defaults(handler=cmd_generate)

    evaluate = subparsers.add_parser("eval", help="체크포인트로 데이터셋 평가 (판정 설정은 체크포인트 값 우선)")
    _add_common(evaluate)
    evaluate.add_argument("--checkpoint", required=True)
    evaluate.add_argument("--features", required=True)
    evaluate.add_argument("--labels", required=True)
    evaluate.add_argument("--batch-size", type=int)
    evaluate.add_argument("--k", type=int, help="평가 시점 KNN 이웃 수")
    evaluate.add_argument("--standardize", action="store_true", default=None)
    evaluate.add_argument("--pos-weight", type=float)
    evaluate.set_defaults(handler=cmd_eval)
    return parser


def _report_error(code: str, message: str) -> None:
    one_line = " ".join(str(message).split()).replace('"', '\\"')
    print(f'error code={code} message="{one_line}"', file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        setup_logging(log_dir=args.log_dir, level=args.log_level.upper())
        args.handler(args)
    except BaseCustomException as e:
        logger.error({"event": "command_failed", "error_code": e.error_code.value, "message": e.message})
        _report_error(e.error_code.value, e.message)
        return e.exit_code
    except ValidationError as e:
        _report_error(ErrorCode.CONFIG_INVALID.value, str(e))
        return 2
    except Exception as e:
        logger.exception({"event": "command_failed", "error_code": ErrorCode.COMMON_INTERNAL_ERROR.value})
        _report_error(ErrorCode.COMMON_INTERNAL_ERROR.value, f"{type(e).__name__}: {e}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
