import math
from typing import List, Optional

from adaptive_mlc.exception.dataset.dataset_exception import (
    DuplicateLabelError,
    IndexOutOfRangeError,
    MalformedLineError,
    SampleCountMismatchError,
)

# --- 단위 검증 함수들 (가장 작은 단위) ---


def parse_header(line: str, path: Optional[str] = None) -> tuple[int, int, int]:
    """첫 줄 'N D L' 파싱 (세 값 모두 0 이상 정수)"""
    parts = line.split()
    if len(parts) != 3:
        raise MalformedLineError("헤더는 'N D L' 세 정수여야 합니다.", path=path, line_number=1)
    try:
        n, d, l = (int(p) for p in parts)
    except ValueError:
        raise MalformedLineError(f"헤더 값이 정수가 아닙니다: {line.strip()!r}", path=path, line_number=1)
    if n < 0 or d < 1 or l < 1:
        raise MalformedLineError(f"헤더 값 범위가 잘못되었습니다: {line.strip()!r}", path=path, line_number=1)
    return n, d, l


def parse_feature_tokens(
    tokens: List[str], n_features: int, path: Optional[str], line_number: int
) -> tuple[list[int], list[float]]:
    """'index:value' 토큰 목록을 검증하며 (indices, values)로 변환"""
    indices: list[int] = []
    values: list[float] = []
    previous = -1
    for token in tokens:
        index_text, sep, value_text = token.partition(":")
        if not sep:
            raise MalformedLineError(f"'index:value' 형식이 아닙니다: {token!r}", path=path, line_number=line_number)
        try:
            index = int(index_text)
            value = float(value_text)
        except ValueError:
            raise MalformedLineError(f"숫자로 변환할 수 없습니다: {token!r}", path=path, line_number=line_number)
        if not math.isfinite(value):
            raise MalformedLineError(f"유한하지 않은 피처 값입니다: {token!r}", path=path, line_number=line_number)
        if index < 0 or index >= n_features:
            raise IndexOutOfRangeError(
                f"피처 인덱스 {index}가 선언된 차원 {n_features}을 벗어났습니다.", path=path, line_number=line_number
            )
        if index <= previous:
            raise MalformedLineError(
                f"피처 인덱스는 순증가해야 합니다: {previous} 다음 {index}", path=path, line_number=line_number
            )
        previous = index
        indices.append(index)
        values.append(value)
    return indices, values


def parse_label_field(text: str, n_labels: int, path: Optional[str], line_number: int) -> list[int]:
    """콤마 구분 레이블 목록 파싱. 빈 문자열은 레이블 없음. 반환값은 정렬된 목록"""
    text = text.strip()
    if not text:
        return []
    labels: list[int] = []
    seen: set[int] = set()
    for token in text.split(","):
        token = token.strip()
        try:
            label = int(token)
        except ValueError:
            raise MalformedLineError(f"레이블이 정수가 아닙니다: {token!r}", path=path, line_number=line_number)
        if label < 0 or label >= n_labels:
            raise IndexOutOfRangeError(
                f"레이블 인덱스 {label}가 선언된 레이블 수 {n_labels}를 벗어났습니다.", path=path, line_number=line_number
            )
        if label in seen:
            raise DuplicateLabelError(f"레이블 {label}이 중복되었습니다.", path=path, line_number=line_number)
        seen.add(label)
        labels.append(label)
    return sorted(labels)


def validate_sample_count(expected: int, actual: int, path: Optional[str] = None) -> None:
    """헤더에 선언된 샘플 수와 실제 줄 수 비교"""
    if expected != actual:
        raise SampleCountMismatchError(
            f"샘플 수 불일치: 선언 {expected}, 실제 {actual} ({path or '<memory>'})"
        )
