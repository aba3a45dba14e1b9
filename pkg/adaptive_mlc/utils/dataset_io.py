"""
희소 피처 / 레이블 파일 입출력

피처 파일: 첫 줄 "N D L", 이후 N줄의 공백 구분 "index:value" (0-based, 인덱스 순증가)
레이블 파일: N줄, 각 줄은 콤마 구분 0-based 레이블 인덱스 (빈 줄 = 레이블 없음)
XC 단일 파일: 첫 줄 "N D L", 이후 N줄의 "l1,l2 f:v f:v" (레이블이 없으면 줄이 공백으로 시작)
"""

import logging
import os
from pathlib import Path
from typing import Union

import numpy as np
import scipy.sparse as sp

from adaptive_mlc.exception.dataset.dataset_exception import DatasetFileNotFoundError, SampleCountMismatchError
from adaptive_mlc.models.tensors import Dataset, LabelMatrix, SparseFeatureMatrix
from adaptive_mlc.validate.dataset_validator import (
    parse_feature_tokens,
    parse_header,
    parse_label_field,
    validate_sample_count,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]


class _CsrBuilder:
    """행 단위로 indices/values를 쌓아 CSR을 만드는 헬퍼"""

    def __init__(self):
        self.indptr = [0]
        self.indices: list[int] = []
        self.data: list[float] = []

    def append(self, indices: list[int], values: list[float]) -> None:
        self.indices.extend(indices)
        self.data.extend(values)
        self.indptr.append(len(self.indices))

    def build(self, n_cols: int) -> sp.csr_matrix:
        n_rows = len(self.indptr) - 1
        return sp.csr_matrix(
            (
                np.asarray(self.data, dtype=np.float64),
                np.asarray(self.indices, dtype=np.int64),
                np.asarray(self.indptr, dtype=np.int64),
            ),
            shape=(n_rows, n_cols),
        )


def _read_lines(path: PathLike) -> list[str]:
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except FileNotFoundError as e:
        raise DatasetFileNotFoundError(f"데이터셋 파일을 찾을 수 없습니다: {path}") from e


def load_dataset(features_path: PathLike, labels_path: PathLike) -> tuple[SparseFeatureMatrix, LabelMatrix]:
    """피처 파일 + 레이블 파일을 읽어 (SparseFeatureMatrix, LabelMatrix)를 반환합니다.

    Raises:
        MalformedLineError: 형식 오류 (줄 번호 포함)
        IndexOutOfRangeError: 선언된 범위를 벗어난 인덱스
        DuplicateLabelError: 한 줄에 중복된 레이블
        SampleCountMismatchError: 헤더/파일 간 샘플 수 불일치
    """
    features_path = str(features_path)
    labels_path = str(labels_path)

    feature_lines = _read_lines(features_path)
    if not feature_lines:
        raise SampleCountMismatchError(f"피처 파일에 헤더가 없습니다: {features_path}")
    n_samples, n_features, n_labels = parse_header(feature_lines[0], path=features_path)

    rows = feature_lines[1:]
    validate_sample_count(n_samples, len(rows), path=features_path)

    features = _CsrBuilder()
    for offset, line in enumerate(rows):
        indices, values = parse_feature_tokens(line.split(), n_features, features_path, offset + 2)
        features.append(indices, values)

    label_lines = _read_lines(labels_path)
    if len(label_lines) != n_samples:
        raise SampleCountMismatchError(
            f"피처 파일은 {n_samples}개 샘플을 선언했지만 레이블 파일에는 {len(label_lines)}줄이 있습니다."
        )

    labels = _CsrBuilder()
    for offset, line in enumerate(label_lines):
        label_ids = parse_label_field(line, n_labels, labels_path, offset + 1)
        labels.append(label_ids, [1.0] * len(label_ids))

    logger.info({
        "event": "dataset_loaded",
        "features_path": features_path,
        "labels_path": labels_path,
        "n_samples": n_samples,
        "n_features": n_features,
        "n_labels": n_labels,
    })
    return SparseFeatureMatrix(features.build(n_features)), LabelMatrix(labels.build(n_labels))


def load_xc_dataset(path: PathLike) -> tuple[SparseFeatureMatrix, LabelMatrix]:
    """레이블과 피처가 한 줄에 있는 단일 파일 포맷을 읽습니다."""
    path = str(path)
    lines = _read_lines(path)
    if not lines:
        raise SampleCountMismatchError(f"파일에 헤더가 없습니다: {path}")
    n_samples, n_features, n_labels = parse_header(lines[0], path=path)
    rows = lines[1:]
    validate_sample_count(n_samples, len(rows), path=path)

    features = _CsrBuilder()
    labels = _CsrBuilder()
    for offset, line in enumerate(rows):
        line_number = offset + 2
        # 첫 토큰에 ':'가 없으면 레이블 필드, 줄이 공백으로 시작하면 레이블 없음
        tokens = line.split(" ")
        label_text = ""
        if tokens and ":" not in tokens[0]:
            label_text = tokens.pop(0)
        label_ids = parse_label_field(label_text, n_labels, path, line_number)
        indices, values = parse_feature_tokens([t for t in tokens if t], n_features, path, line_number)
        labels.append(label_ids, [1.0] * len(label_ids))
        features.append(indices, values)

    return SparseFeatureMatrix(features.build(n_features)), LabelMatrix(labels.build(n_labels))


def write_dataset(
    features: SparseFeatureMatrix,
    labels: LabelMatrix,
    features_path: PathLike,
    labels_path: PathLike,
) -> None:
    """load_dataset의 역연산. 값은 repr로 기록하여 다시 읽으면 비트 단위로 같습니다."""
    validate_sample_count(features.n_samples, labels.n_samples)

    feature_lines = [f"{features.n_samples} {features.n_features} {labels.n_labels}"]
    for row in features.rows():
        feature_lines.append(" ".join(f"{index}:{value!r}" for index, value in row))
    label_lines = [",".join(str(label) for label in row) for row in labels.rows()]

    for target in (features_path, labels_path):
        Path(target).parent.mkdir(parents=True, exist_ok=True)
    Path(features_path).write_text("\n".join(feature_lines) + "\n", encoding="utf-8")
    Path(labels_path).write_text("".join(line + "\n" for line in label_lines), encoding="utf-8")


def load_pair(features_path: PathLike, labels_path: PathLike) -> Dataset:
    features, labels = load_dataset(features_path, labels_path)
    return Dataset(features, labels)
