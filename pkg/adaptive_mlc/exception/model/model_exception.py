from adaptive_mlc.exception.base_exception import BaseCustomException, ErrorCode


class SignalShapeError(BaseCustomException):
    """신호 계산 입력의 차원이 서로 맞지 않을 때"""
    error_code = ErrorCode.SIGNAL_SHAPE_MISMATCH
    message = "신호 계산 입력의 차원이 일치하지 않습니다."
    exit_code = 4


class ThresholdShapeError(BaseCustomException):
    """임계값 파라미터, IDF, KNN 신호의 차원이 서로 맞지 않을 때"""
    error_code = ErrorCode.THRESHOLD_SHAPE_MISMATCH
    message = "임계값 계산 입력의 차원이 일치하지 않습니다."
    exit_code = 4


class NonFiniteInputError(BaseCustomException):
    """손실 함수 입력에 NaN/Inf가 포함될 때"""
    error_code = ErrorCode.LOSS_NON_FINITE_INPUT
    message = "손실 입력에 유한하지 않은 값이 있습니다."
    exit_code = 4


class ModelShapeError(BaseCustomException):
    """배치 피처 차원이 모델 입력 차원과 다를 때"""
    error_code = ErrorCode.MODEL_SHAPE_MISMATCH
    message = "입력 차원이 모델과 일치하지 않습니다."
    exit_code = 4


class StaleCacheError(BaseCustomException):
    """backward에 전달된 캐시가 해당 forward 결과가 아닐 때"""
    error_code = ErrorCode.MODEL_STALE_CACHE
    message = "forward 캐시와 upstream 기울기의 형태가 일치하지 않습니다."
    exit_code = 4


class NonFiniteGradientError(BaseCustomException):
    """옵티마이저 스텝 직전 기울기에 NaN/Inf가 있을 때 (텐서 이름 포함)"""
    error_code = ErrorCode.MODEL_NON_FINITE_GRADIENT
    message = "기울기에 유한하지 않은 값이 있습니다."
    exit_code = 4

    def __init__(self, tensor_name: str):
        self.tensor_name = tensor_name
        super().__init__(message=f"기울기에 유한하지 않은 값이 있습니다: {tensor_name}")


class MetricsShapeError(BaseCustomException):
    """예측과 정답, 또는 병합할 누적값의 레이블 수가 다를 때"""
    error_code = ErrorCode.METRICS_SHAPE_MISMATCH
    message = "지표 계산 입력의 차원이 일치하지 않습니다."
    exit_code = 4
