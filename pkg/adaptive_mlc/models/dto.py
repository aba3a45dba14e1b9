import hashlib
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from adaptive_mlc.core import constants
from adaptive_mlc.core.config import OUTPUT_DIR

VariantName = Literal["adaptive", "idf_only", "knn_only", "static"]
OptimizerName = Literal["sgd", "adam"]
# 학습 중 KNN 신호 출처: 배치 정답 레이블 soft-KNN / 참조 집합 코사인 이웃 (자기 자신 제외)
TrainKnnSource = Literal["batch_labels", "reference"]


# 합성 데이터
class SyntheticSpec(BaseModel):
    """Zipf 분포 레이블 + 레이블별 가우시안 피처 시그니처로 합성 데이터셋을 만드는 명세"""
    model_config = ConfigDict(frozen=True)

    n_samples: int = Field(5000, ge=1, description="Number of samples")
    n_labels: int = Field(200, ge=1, description="Number of labels")
    n_features: int = Field(1000, ge=1, description="Feature dimension")
    zipf_exponent: float = Field(1.2, gt=0, description="Label-frequency skew")
    mean_labels_per_sample: float = Field(3.0, gt=0, description="Average positives per sample")
    seed: int = Field(42, description="Generator seed")

    @model_validator(mode="after")
    def check_mean_labels(self) -> "SyntheticSpec":
        if self.mean_labels_per_sample > self.n_labels:
            raise ValueError("mean_labels_per_sample는 n_labels 이하여야 합니다.")
        return self


class LossConfig(BaseModel):
    """BCE + 마진 복합 손실 설정"""
    model_config = ConfigDict(frozen=True)

    margin: float = Field(constants.DEFAULT_MARGIN, ge=0, description="Hinge margin (Δ)")
    margin_weight: float = Field(constants.DEFAULT_MARGIN_WEIGHT, ge=0, description="Margin term weight (λ_m)")
    pos_weight: float = Field(1.0, gt=0, description="BCE positive-class weight")
    use_standardization: bool = Field(False, description="Standardize logits before both loss terms")
    epsilon: float = Field(constants.DEFAULT_EPSILON, gt=0, description="ε of the standardization denominator")


class TrainConfig(BaseModel):
    """단일 학습 실행의 모든 하이퍼파라미터"""
    model_config = ConfigDict(frozen=True)

    variant: VariantName = "adaptive"
    batch_size: int = Field(constants.DEFAULT_BATCH_SIZE, ge=1)
    max_epochs: int = Field(constants.DEFAULT_MAX_EPOCHS, ge=1)
    early_stop_patience: int = Field(constants.DEFAULT_PATIENCE, ge=1, description="Epochs without eval macro-F1 improvement")
    eval_every: int = Field(1, ge=1, description="Evaluation stride in epochs")
    loss: LossConfig = Field(default_factory=LossConfig)
    epsilon: float = Field(constants.DEFAULT_EPSILON, gt=0, description="Shared ε for IDF and KNN normalization")
    hidden_dim: int = Field(constants.DEFAULT_HIDDEN_DIM, ge=1)
    learning_rate: float = Field(constants.DEFAULT_LEARNING_RATE, gt=0)
    optimizer: OptimizerName = "sgd"
    eval_k: int = Field(constants.DEFAULT_EVAL_K, ge=1, description="Neighbors of the eval-time KNN signal")
    eval_reference_size: int = Field(constants.DEFAULT_REFERENCE_SIZE, ge=1, description="Training rows kept as KNN reference")
    train_knn_source: TrainKnnSource = Field("batch_labels", description="KNN signal fed to the threshold during training")
    eval_fraction: float = Field(0.2, gt=0, lt=1)
    seed: int = 42
    split_seed: int = 0
    output_dir: str = Field(default_factory=lambda: OUTPUT_DIR)

    def config_hash(self) -> str:
        """output_dir, max_epochs를 제외한 설정의 SHA-256 앞 16자리 (체크포인트 호환성 확인용)

        max_epochs는 제외하므로 저장된 실행을 더 긴 에폭으로 이어서 학습할 수 있습니다.
        """
        payload = self.model_dump_json(exclude={"output_dir", "max_epochs"})
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


class EvalSettings(BaseModel):
    """평가 판정에 영향을 주는 학습 설정. 체크포인트 meta에 저장되어 eval 이 그대로 재사용합니다."""
    model_config = ConfigDict(frozen=True)

    loss: LossConfig
    eval_k: int = Field(..., ge=1)
    epsilon: float = Field(..., gt=0)
    # 표준화가 켜져 있으면 μ, σ가 평가 배치 구성에 따라 달라지므로 배치 크기도 함께 고정
    batch_size: int = Field(..., ge=1)

    @classmethod
    def from_config(cls, config: TrainConfig) -> "EvalSettings":
        return cls(loss=config.loss, eval_k=config.eval_k, epsilon=config.epsilon, batch_size=config.batch_size)


class EpochRecord(BaseModel):
    """에폭 단위 학습/평가 지표와 임계값 가중치 통계"""
    model_config = ConfigDict(allow_inf_nan=False)

    epoch: int = Field(..., ge=1)
    variant: VariantName
    train_loss: float
    train_bce: float
    train_margin: float
    train_macro_f1: float = Field(..., ge=0, le=1)

    # eval_every > 1 이면 평가하지 않은 에폭은 None
    eval_macro_f1: Optional[float] = Field(None, ge=0, le=1)
    eval_micro_f1: Optional[float] = Field(None, ge=0, le=1)
    eval_bce: Optional[float] = None
    eval_positive_ratio: Optional[float] = Field(None, ge=0, le=1)

    alpha_mean: float
    alpha_std: float
    beta_mean: float
    beta_std: float
    lambda_value: float = Field(..., ge=0, le=1, description="Effective blend weight (pinned for ablations)")

    @property
    def evaluated(self) -> bool:
        return self.eval_macro_f1 is not None


class SummaryRow(BaseModel):
    """ablation 요약 표 한 행 (변형별 최종 지표)"""
    variant: VariantName
    macro_f1: float
    micro_f1: float
    bce: float
    positive_ratio: float
    best_epoch: int
    epochs_run: int
