from adaptive_mlc.exception.base_exception import BaseCustomException, ErrorCode


class NonFiniteLossError(BaseCustomException):
    """학습 중 손실이 NaN/Inf가 되어 실행을 중단할 때"""
    error_code = ErrorCode.TRAIN_NON_FINITE_LOSS
    message = "손실 값이 유한하지 않아 학습을 중단합니다."
    exit_code = 5

    def __init__(self, epoch: int, batch_index: int, bce: float, margin: float):
        self.epoch = epoch
        self.batch_index = batch_index
        super().__init__(
            message=f"epoch={epoch} batch={batch_index} bce={bce} margin={margin}: 손실 값이 유한하지 않아 학습을 중단합니다."
        )


class EmptyDatasetError(BaseCustomException):
    """학습/평가 데이터가 비어 있을 때"""
    error_code = ErrorCode.TRAIN_EMPTY_DATASET
    message = "데이터셋이 비어 있습니다."
    exit_code = 5


class UnknownVariantError(BaseCustomException):
    """레지스트리에 등록되지 않은 변형 이름이 요청될 때"""
    error_code = ErrorCode.TRAIN_UNKNOWN_VARIANT
    message = "등록되지 않은 학습 변형입니다."
    exit_code = 2


class ArtifactWriteError(BaseCustomException):
    """산출물 디렉터리에 쓸 수 없을 때"""
    error_code = ErrorCode.ARTIFACT_WRITE_FAILED
    message = "산출물을 저장할 수 없습니다."
    exit_code = 6


class CheckpointNotFoundError(BaseCustomException):
    error_code = ErrorCode.CHECKPOINT_NOT_FOUND
    message = "체크포인트를 찾을 수 없습니다."
    exit_code = 6


class CheckpointFormatError(BaseCustomException):
    """체크포인트 포맷 버전이 다르거나 필수 키가 없을 때"""
    error_code = ErrorCode.CHECKPOINT_FORMAT
    message = "체크포인트 형식이 올바르지 않습니다."
    exit_code = 6
