from typing import Optional

from adaptive_mlc.exception.base_exception import BaseCustomException, ErrorCode


class DatasetFormatError(BaseCustomException):
    """데이터 파일 파싱 중 발생하는 예외의 공통 부모.

    line_number는 1부터 시작하는 파일 기준 줄 번호입니다.
    """
    error_code = ErrorCode.DATASET_MALFORMED_LINE
    message = "데이터 파일 형식이 잘못되었습니다."
    exit_code = 3

    def __init__(self, message: str = None, path: Optional[str] = None, line_number: Optional[int] = None):
        self.path = path
        self.line_number = line_number
        if line_number is not None:
            message = f"{path or '<memory>'}:{line_number}: {message or self.message}"
        super().__init__(message=message)


class MalformedLineError(DatasetFormatError):
    """토큰이 'index:value' 형식이 아니거나, 숫자가 아니거나, 인덱스가 증가하지 않을 때"""
    error_code = ErrorCode.DATASET_MALFORMED_LINE
    message = "잘못된 형식의 줄이 있습니다."


class IndexOutOfRangeError(DatasetFormatError):
    """피처/레이블 인덱스가 헤더에 선언된 범위를 벗어날 때"""
    error_code = ErrorCode.DATASET_INDEX_OUT_OF_RANGE
    message = "인덱스가 선언된 범위를 벗어났습니다."


class DuplicateLabelError(DatasetFormatError):
    """한 샘플의 레이블 목록에 같은 인덱스가 두 번 이상 나타날 때"""
    error_code = ErrorCode.DATASET_DUPLICATE_LABEL
    message = "레이블이 중복되었습니다."


class SampleCountMismatchError(DatasetFormatError):
    """피처 파일과 레이블 파일(또는 헤더)의 샘플 수가 다를 때"""
    error_code = ErrorCode.DATASET_SAMPLE_COUNT_MISMATCH
    message = "피처와 레이블의 샘플 수가 일치하지 않습니다."


class EmptySplitError(BaseCustomException):
    """학습/평가 분할 결과 한쪽이 비게 될 때"""
    error_code = ErrorCode.DATASET_SPLIT_EMPTY
    message = "분할 결과 한쪽 집합이 비어 있습니다."
    exit_code = 3


class DatasetFileNotFoundError(BaseCustomException):
    error_code = ErrorCode.DATASET_FILE_NOT_FOUND
    message = "데이터셋 파일을 찾을 수 없습니다."
    exit_code = 3
