from adaptive_mlc.exception.base_exception import BaseCustomException, ErrorCode


class ConfigValidationError(BaseCustomException):
    """설정 파일 또는 CLI 인자가 스키마/불변식을 만족하지 않을 때 발생"""
    error_code = ErrorCode.CONFIG_INVALID
    message = "설정 값이 올바르지 않습니다."
    exit_code = 2
