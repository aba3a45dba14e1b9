"""
numpy .npz 파일 기반 체크포인트 저장소

<directory>/<name>.npz 하나에 모든 텐서와 JSON 메타데이터를 담습니다.
키 구성은 docs/checkpoint_format.md 를 참고하세요.
"""

import json
import logging
import os
from typing import Optional

import numpy as np
import scipy.sparse as sp

from adaptive_mlc.exception.training.training_exception import (
    ArtifactWriteError,
    CheckpointFormatError,
    CheckpointNotFoundError,
)
from adaptive_mlc.models.tensors import (
    Checkpoint,
    Dataset,
    LabelMatrix,
    MlpParams,
    OptimizerState,
    SparseFeatureMatrix,
    ThresholdParams,
)
from adaptive_mlc.repositories.base import ICheckpointRepository

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

_MLP_KEYS = ("W1", "b1", "W2", "b2")
_REQUIRED_KEYS = (
    "meta",
    "idf",
    "mlp.W1", "mlp.b1", "mlp.W2", "mlp.b2",
    "threshold.alpha", "threshold.beta", "threshold.bias", "threshold.lambda_raw",
)


def _pack_csr(prefix: str, matrix: sp.csr_matrix) -> dict[str, np.ndarray]:
    return {
        f"{prefix}.data": matrix.data,
        f"{prefix}.indices": matrix.indices,
        f"{prefix}.indptr": matrix.indptr,
        f"{prefix}.shape": np.asarray(matrix.shape, dtype=np.int64),
    }


def _unpack_csr(prefix: str, archive) -> sp.csr_matrix:
    shape = tuple(int(v) for v in archive[f"{prefix}.shape"])
    return sp.csr_matrix(
        (archive[f"{prefix}.data"], archive[f"{prefix}.indices"], archive[f"{prefix}.indptr"]), shape=shape
    )


def checkpoint_to_arrays(checkpoint: Checkpoint) -> dict[str, np.ndarray]:
    arrays: dict[str, np.ndarray] = {f"mlp.{key}": getattr(checkpoint.mlp, key) for key in _MLP_KEYS}
    arrays.update({
        "threshold.alpha": checkpoint.threshold.alpha,
        "threshold.beta": checkpoint.threshold.beta,
        "threshold.bias": checkpoint.threshold.bias,
        "threshold.lambda_raw": np.asarray([checkpoint.threshold.lambda_raw], dtype=np.float64),
        "idf": checkpoint.idf,
    })

    optimizer_meta: Optional[dict] = None
    if checkpoint.optimizer is not None:
        state = checkpoint.optimizer
        optimizer_meta = {
            "learning_rate": state.learning_rate,
            "method": state.method,
            "beta1": state.beta1,
            "beta2": state.beta2,
            "eps": state.eps,
            "step": state.step,
        }
        arrays.update({f"optimizer.m.{name}": value for name, value in state.first_moments.items()})
        arrays.update({f"optimizer.v.{name}": value for name, value in state.second_moments.items()})

    if checkpoint.reference is not None:
        arrays.update(_pack_csr("reference.features", checkpoint.reference.features.matrix))
        arrays.update(_pack_csr("reference.labels", checkpoint.reference.labels.matrix))

    meta = {
        "format_version": FORMAT_VERSION,
        "config_hash": checkpoint.config_hash,
        "variant": checkpoint.variant,
        "epoch": checkpoint.epoch,
        "optimizer": optimizer_meta,
        "progress": checkpoint.progress,
        "eval_settings": checkpoint.eval_settings or None,
    }
    arrays["meta"] = np.asarray(json.dumps(meta, ensure_ascii=False))
    return arrays


def checkpoint_from_arrays(archive, source: str = "<memory>") -> Checkpoint:
    missing = [key for key in _REQUIRED_KEYS if key not in archive]
    if missing:
        raise CheckpointFormatError(f"{source}: 필수 키가 없습니다: {', '.join(missing)}")

    try:
        meta = json.loads(str(archive["meta"]))
    except json.JSONDecodeError as e:
        raise CheckpointFormatError(f"{source}: meta 를 해석할 수 없습니다: {e}") from e
    version = meta.get("format_version")
    if version != FORMAT_VERSION:
        raise CheckpointFormatError(f"{source}: 지원하지 않는 포맷 버전입니다: {version}")

    optimizer = None
    if meta.get("optimizer") is not None:
        scalars = meta["optimizer"]
        optimizer = OptimizerState(
            learning_rate=scalars["learning_rate"],
            method=scalars["method"],
            beta1=scalars["beta1"],
            beta2=scalars["beta2"],
            eps=scalars["eps"],
            step=scalars["step"],
            first_moments={k[len("optimizer.m."):]: np.array(archive[k]) for k in archive if k.startswith("optimizer.m.")},
            second_moments={k[len("optimizer.v."):]: np.array(archive[k]) for k in archive if k.startswith("optimizer.v.")},
        )

    reference = None
    if "reference.features.shape" in archive:
        reference = Dataset(
            SparseFeatureMatrix(_unpack_csr("reference.features", archive)),
            LabelMatrix(_unpack_csr("reference.labels", archive)),
        )

    return Checkpoint(
        mlp=MlpParams(*(np.array(archive[f"mlp.{key}"]) for key in _MLP_KEYS)),
        threshold=ThresholdParams(
            alpha=np.array(archive["threshold.alpha"]),
            beta=np.array(archive["threshold.beta"]),
            bias=np.array(archive["threshold.bias"]),
            lambda_raw=float(archive["threshold.lambda_raw"][0]),
        ),
        config_hash=meta["config_hash"],
        variant=meta["variant"],
        epoch=int(meta["epoch"]),
        idf=np.array(archive["idf"]),
        reference=reference,
        optimizer=optimizer,
        progress=meta.get("progress") or {},
        eval_settings=meta.get("eval_settings") or {},
    )


class NpzCheckpointRepository(ICheckpointRepository):
    """디렉터리 하나를 저장소로 사용하는 파일 기반 구현체"""

    def __init__(self, directory: str):
        self.directory = directory

    def _path(self, name: str) -> str:
        return os.path.join(self.directory, f"{name}.npz")

    def save(self, name: str, checkpoint: Checkpoint) -> None:
        path = self._path(name)
        tmp_path = path + ".tmp"
        try:
            os.makedirs(self.directory, exist_ok=True)
            # np.savez는 확장자가 없으면 .npz를 붙이므로 파일 객체로 저장
            with open(tmp_path, "wb") as f:
                np.savez(f, **checkpoint_to_arrays(checkpoint))
            os.replace(tmp_path, path)
        except OSError as e:
            raise ArtifactWriteError(f"체크포인트를 저장할 수 없습니다: {path} ({e})") from e
        logger.debug({"event": "checkpoint_saved", "path": path, "epoch": checkpoint.epoch})

    def load(self, name: str) -> Checkpoint:
        path = self._path(name)
        if not os.path.exists(path):
            raise CheckpointNotFoundError(f"체크포인트를 찾을 수 없습니다: {path}")
        try:
            with np.load(path, allow_pickle=False) as archive:
                return checkpoint_from_arrays({key: archive[key] for key in archive.files}, source=path)
        except (OSError, ValueError, KeyError) as e:
            raise CheckpointFormatError(f"{path}: 체크포인트를 읽을 수 없습니다: {e}") from e

    def exists(self, name: str) -> bool:
        return os.path.exists(self._path(name))


def load_checkpoint_file(path: str) -> Checkpoint:
    """임의 경로의 .npz 체크포인트를 읽습니다 (eval 서브커맨드용)."""
    directory, filename = os.path.split(path)
    if not filename.endswith(".npz"):
        raise CheckpointNotFoundError(f"체크포인트 파일은 .npz 여야 합니다: {path}")
    return NpzCheckpointRepository(directory or ".").load(filename[:-len(".npz")])
