from adaptive_mlc.exception.base_exception import BaseCustomException, ErrorCode

__all__ = ["BaseCustomException", "ErrorCode"]
