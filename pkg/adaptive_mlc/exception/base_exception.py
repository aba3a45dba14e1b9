from enum import Enum


class ErrorCode(str, Enum):
    """
    애플리케이션 전반에서 사용하는 에러 코드 정의.
    형식: 카테고리(영문)-번호(3자리)
    """
    # 1. COMMON: 공통/일반 에러
    GENERIC_UNKNOWN = "GENERIC-000"
    COMMON_INTERNAL_ERROR = "COMMON-001"

    # 2. CONFIG: 설정 파일/CLI 인자 검증
    CONFIG_INVALID = "CONFIG-001"

    # 3. DATASET: 파일 포맷/데이터 불변식
    DATASET_MALFORMED_LINE = "DATASET-001"
    DATASET_INDEX_OUT_OF_RANGE = "DATASET-002"
    DATASET_DUPLICATE_LABEL = "DATASET-003"
    DATASET_SAMPLE_COUNT_MISMATCH = "DATASET-004"
    DATASET_SPLIT_EMPTY = "DATASET-005"
    DATASET_FILE_NOT_FOUND = "DATASET-006"

    # 4. NUMERIC: 신호/임계값/손실/모델 계산
    SIGNAL_SHAPE_MISMATCH = "SIGNAL-001"
    THRESHOLD_SHAPE_MISMATCH = "THRESHOLD-001"
    LOSS_NON_FINITE_INPUT = "LOSS-001"
    MODEL_SHAPE_MISMATCH = "MODEL-001"
    MODEL_STALE_CACHE = "MODEL-002"
    MODEL_NON_FINITE_GRADIENT = "MODEL-003"
    METRICS_SHAPE_MISMATCH = "METRICS-001"

    # 5. TRAIN: 학습 오케스트레이션/산출물
    TRAIN_NON_FINITE_LOSS = "TRAIN-001"
    TRAIN_EMPTY_DATASET = "TRAIN-002"
    TRAIN_UNKNOWN_VARIANT = "TRAIN-003"
    ARTIFACT_WRITE_FAILED = "ARTIFACT-001"
    CHECKPOINT_NOT_FOUND = "CHECKPOINT-001"
    CHECKPOINT_FORMAT = "CHECKPOINT-002"


class BaseCustomException(Exception):
    """
    모든 커스텀 예외의 최상위 클래스.
    이 클래스를 상속받아 구체적인 예외를 정의해야 함.

    exit_code는 CLI가 프로세스 종료 코드로 그대로 사용합니다.
    """
    error_code: ErrorCode = ErrorCode.GENERIC_UNKNOWN
    message: str = "알 수 없는 오류가 발생했습니다."
    exit_code: int = 1

    def __init__(self, message: str = None, error_code: ErrorCode = None, exit_code: int = None):
        if message:
            self.message = message
        if error_code:
            self.error_code = error_code
        if exit_code:
            self.exit_code = exit_code
        super().__init__(self.message)
