"""
학습 오케스트레이션 서비스

네 가지 변형(adaptive, idf_only, knn_only, static)을 같은 학습 루프로 돌리고,
에폭마다 평가 → 조기 종료 판단 → 최고 체크포인트 보관을 수행합니다.

학습 루프 한 스텝:
1. MLP forward → 로짓 z
2. KNN 신호 계산 (변형이 KNN을 쓰는 경우에만). train_knn_source가 batch_labels면 배치 정답
   레이블 soft-KNN, reference면 평가와 같은 참조 집합 코사인 이웃 (자기 자신 행은 제외)
3. 변형 규칙으로 임계값 θ 계산 (static은 θ 없음)
4. 복합 손실 + 기울기 → MLP backward, 임계값 backward
5. 옵티마이저 스텝 (MLP와 임계값 파라미터를 함께 갱신)

평가 시점에는 정답 레이블을 쓸 수 없으므로 학습 참조 집합에서 코사인 top-k 이웃으로
KNN 신호를 만듭니다. 평가 배치는 읽기 전용 스냅샷 위에서 워커 스레드로 나눠 처리하고,
부분 카운트는 배치 순서대로 병합합니다.

재현성:
- 난수 스트림은 (seed, 용도, epoch) 조합으로 만들므로 에폭 단위로 독립적입니다.
- 따라서 체크포인트에서 재개한 실행은 끊기지 않은 실행과 비트 단위로 같습니다.
"""

from __future__ import annotations

import logging
import os
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import reduce
from typing import Optional

import numpy as np

from adaptive_mlc.core.config import NUM_WORKERS
from adaptive_mlc.core.constants import BEST_CHECKPOINT, LAST_CHECKPOINT
from adaptive_mlc.core.context import run_context
from adaptive_mlc.exception.training.training_exception import (
    CheckpointFormatError,
    EmptyDatasetError,
    NonFiniteLossError,
)
from adaptive_mlc.models.dto import EpochRecord, EvalSettings, SummaryRow, TrainConfig
from adaptive_mlc.models.tensors import Checkpoint, ConfusionCounts, Dataset, KnnSignal
from adaptive_mlc.repositories.base import ICheckpointRepository
from adaptive_mlc.repositories.memory import MemoryCheckpointRepository
from adaptive_mlc.repositories.npz_repository import NpzCheckpointRepository
from adaptive_mlc.services import (
    dataset_service,
    loss_service,
    metrics_service,
    model_service,
    signal_service,
    threshold_service,
)
from adaptive_mlc.variants import registry
from adaptive_mlc.variants.base import BaseVariant

logger = logging.getLogger(__name__)

DatasetPair = tuple[Dataset, Dataset]

# 난수 스트림 구분자: default_rng([seed, stream, epoch])
_STREAM_SHUFFLE = 1
_STREAM_REFERENCE = 2


@dataclass
class EvaluationResult:
    counts: ConfusionCounts
    bce: float
    bucket_macro_f1: list[float] = field(default_factory=list)

    @property
    def macro_f1(self) -> float:
        return metrics_service.macro_f1(self.counts)

    @property
    def micro_f1(self) -> float:
        return metrics_service.micro_f1(self.counts)

    @property
    def positive_ratio(self) -> float:
        return metrics_service.positive_ratio(self.counts)


@dataclass
class VariantRun:
    """변형 하나의 학습 결과. final은 평가 macro-F1이 가장 높았던 에폭의 기록입니다."""
    final: EpochRecord
    checkpoint: Checkpoint
    records: list[EpochRecord]
    stopped_early: bool = False

    @property
    def epochs_run(self) -> int:
        return len(self.records)

    def summary_row(self) -> SummaryRow:
        return SummaryRow(
            variant=self.final.variant,
            macro_f1=self.final.eval_macro_f1,
            micro_f1=self.final.eval_micro_f1,
            bce=self.final.eval_bce,
            positive_ratio=self.final.eval_positive_ratio,
            best_epoch=self.final.epoch,
            epochs_run=self.epochs_run,
        )


@dataclass
class AblationResult:
    runs: dict[str, VariantRun]
    summary: list[SummaryRow]


@dataclass
class _TrainingState:
    """학습 루프가 단독으로 소유하는 가변 상태"""
    checkpoint: Checkpoint
    records: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    best_macro_f1: float = -1.0
    stopped_early: bool = False

    def progress(self) -> dict:
        return {
            "records": [record.model_dump() for record in self.records],
            "best_epoch": self.best_epoch,
            "best_macro_f1": self.best_macro_f1,
            "stopped_early": self.stopped_early,
        }


def split_dataset(dataset: Dataset, eval_fraction: float, seed: int) -> DatasetPair:
    """Dataset 하나를 (train, eval) 쌍으로 나눕니다."""
    (train_x, train_y), (eval_x, eval_y) = dataset_service.train_eval_split(
        dataset.features, dataset.labels, eval_fraction, seed
    )
    return Dataset(train_x, train_y), Dataset(eval_x, eval_y)


def _batches(n: int, batch_size: int) -> list[slice]:
    return [slice(start, min(start + batch_size, n)) for start in range(0, n, batch_size)]


def _reference_indices(config: TrainConfig, n_train: int) -> np.ndarray:
    """KNN 참조 집합으로 쓸 학습 행 인덱스 (오름차순). seed와 학습 행 수만으로 정해집니다."""
    n_reference = min(config.eval_reference_size, n_train)
    ref_rng = np.random.default_rng([config.seed, _STREAM_REFERENCE, 0])
    return np.sort(ref_rng.choice(n_train, size=n_reference, replace=False))


class TrainerService:
    """변형 학습/평가 서비스.

    Attributes:
        num_workers: 평가 배치를 나눠 처리할 스레드 수 (1이면 순차 실행)
    """

    def __init__(self, num_workers: int = NUM_WORKERS):
        self.num_workers = max(1, num_workers)

    # ------------------------------------------------------------------
    # evaluation
    # ------------------------------------------------------------------

    def _evaluate_batch(
        self, checkpoint: Checkpoint, variant: BaseVariant, batch: Dataset, settings: EvalSettings
    ) -> tuple[ConfusionCounts, float]:
        loss_config = variant.loss_config(settings.loss)
        logits, _ = model_service.forward(checkpoint.mlp, batch.features)

        knn = None
        if variant.uses_knn:
            reference = checkpoint.reference
            knn = signal_service.knn_signal_reference(
                batch.features, (reference.features, reference.labels), settings.eval_k, settings.epsilon
            )
        theta = variant.thresholds(checkpoint.threshold, checkpoint.idf, knn, batch.n_samples)

        targets = batch.labels.dense()
        scores = loss_service.decision_scores(logits, theta, loss_config)
        bce, _ = loss_service.bce_with_logits(scores, targets, loss_config.pos_weight)
        counts = metrics_service.accumulate(ConfusionCounts.empty(targets.shape[1]), scores > 0, targets)
        return counts, bce * targets.size

    def evaluate(self, checkpoint: Checkpoint, data: Dataset, config: TrainConfig) -> EvaluationResult:
        """체크포인트로 데이터셋 전체를 평가합니다.

        변형은 체크포인트에 기록된 이름을, 손실/KNN/배치 크기 설정은 체크포인트에 저장된 값을 따릅니다.
        저장된 설정이 없는 체크포인트만 config의 값을 씁니다.
        """
        if data.n_samples < 1:
            raise EmptyDatasetError("평가 데이터가 비어 있습니다.")
        variant = registry.get(checkpoint.variant)
        if variant.uses_knn and (checkpoint.reference is None or checkpoint.reference.n_samples < 1):
            raise CheckpointFormatError("KNN 신호를 쓰는 변형인데 체크포인트에 참조 집합이 없습니다.")

        settings = (
            EvalSettings.model_validate(checkpoint.eval_settings)
            if checkpoint.eval_settings
            else EvalSettings.from_config(config)
        )
        batches = [data.take(np.arange(s.start, s.stop)) for s in _batches(data.n_samples, settings.batch_size)]
        if self.num_workers == 1 or len(batches) == 1:
            partials = [self._evaluate_batch(checkpoint, variant, batch, settings) for batch in batches]
        else:
            with ThreadPoolExecutor(max_workers=self.num_workers) as executor:
                # map은 입력 순서대로 결과를 돌려주므로 병합 순서가 고정됩니다
                partials = list(executor.map(lambda b: self._evaluate_batch(checkpoint, variant, b, settings), batches))

        counts = reduce(metrics_service.merge, (c for c, _ in partials))
        total_bce = sum(weighted for _, weighted in partials)
        buckets = metrics_service.bucketed_macro_f1(counts, np.exp(-checkpoint.idf))
        return EvaluationResult(counts=counts, bce=total_bce / counts.total_cells, bucket_macro_f1=buckets)

    # ------------------------------------------------------------------
    # training
    # ------------------------------------------------------------------

    def _init_state(
        self, config: TrainConfig, variant: BaseVariant, train: Dataset, idf: np.ndarray, ref_idx: np.ndarray
    ) -> _TrainingState:
        checkpoint = Checkpoint(
            mlp=model_service.init_mlp(
                train.features.n_features, train.labels.n_labels, config.hidden_dim, config.seed
            ),
            threshold=threshold_service.init_params(train.labels.n_labels, config.seed),
            config_hash=config.config_hash(),
            variant=variant.name,
            epoch=0,
            idf=idf,
            reference=train.take(ref_idx),
            optimizer=model_service.init_optimizer(config.optimizer, config.learning_rate),
            eval_settings=EvalSettings.from_config(config).model_dump(),
        )
        return _TrainingState(checkpoint=checkpoint)

    def _restore_state(self, config: TrainConfig, repository: ICheckpointRepository) -> Optional[_TrainingState]:
        if not repository.exists(LAST_CHECKPOINT):
            return None
        last = repository.load(LAST_CHECKPOINT)
        if last.config_hash != config.config_hash() or last.variant != config.variant:
            raise CheckpointFormatError(
                f"저장된 체크포인트(variant={last.variant}, hash={last.config_hash})가 "
                f"현재 설정(variant={config.variant}, hash={config.config_hash()})과 다릅니다."
            )
        progress = last.progress
        state = _TrainingState(
            checkpoint=last,
            records=[EpochRecord.model_validate(r) for r in progress.get("records", [])],
            best_epoch=int(progress.get("best_epoch", 0)),
            best_macro_f1=float(progress.get("best_macro_f1", -1.0)),
            stopped_early=bool(progress.get("stopped_early", False)),
        )
        logger.info({"event": "training_resumed", "epoch": last.epoch, "best_epoch": state.best_epoch})
        return state

    def _train_knn(
        self, config: TrainConfig, batch: Dataset, reference: Dataset, excluded: np.ndarray
    ) -> KnnSignal:
        if config.train_knn_source == "reference":
            return signal_service.knn_signal_reference(
                batch.features,
                (reference.features, reference.labels),
                config.eval_k,
                config.epsilon,
                exclude=excluded,
            )
        return signal_service.knn_signal(batch.labels, config.epsilon)

    def _train_epoch(
        self,
        epoch: int,
        config: TrainConfig,
        variant: BaseVariant,
        train: Dataset,
        state: _TrainingState,
        reference_position: np.ndarray,
    ) -> dict[str, float]:
        """한 에폭 학습. reference_position[i]는 학습 행 i의 참조 집합 위치 (없으면 -1)"""
        checkpoint = state.checkpoint
        loss_config = variant.loss_config(config.loss)
        order = np.random.default_rng([config.seed, _STREAM_SHUFFLE, epoch]).permutation(train.n_samples)

        counts = ConfusionCounts.empty(train.labels.n_labels)
        sums = {"loss": 0.0, "bce": 0.0, "margin": 0.0}
        for batch_index, window in enumerate(_batches(train.n_samples, config.batch_size)):
            rows = order[window]
            batch = train.take(rows)
            targets = batch.labels.dense()

            logits, cache = model_service.forward(checkpoint.mlp, batch.features)
            if not np.all(np.isfinite(logits)):
                logger.error({"event": "non_finite_logits", "epoch": epoch, "batch": batch_index})
                raise NonFiniteLossError(epoch, batch_index, float("nan"), float("nan"))

            knn = None
            if variant.uses_knn:
                knn = self._train_knn(config, batch, checkpoint.reference, reference_position[rows])
            theta = variant.thresholds(checkpoint.threshold, checkpoint.idf, knn, batch.n_samples)
            output = loss_service.composite_loss(
                logits, theta if theta is not None else np.zeros_like(logits), targets, loss_config
            )
            if not np.isfinite(output.total):
                logger.error({
                    "event": "non_finite_loss",
                    "epoch": epoch,
                    "batch": batch_index,
                    "bce": output.bce_component,
                    "margin": output.margin_component,
                })
                raise NonFiniteLossError(epoch, batch_index, output.bce_component, output.margin_component)

            predictions = loss_service.decision_scores(logits, theta, loss_config) > 0
            counts = metrics_service.accumulate(counts, predictions, targets)

            mlp_grad = model_service.backward(checkpoint.mlp, cache, output.d_logits)
            threshold_grad = variant.threshold_grad(checkpoint.threshold, checkpoint.idf, knn, output.d_threshold)
            model_service.sgd_step(
                checkpoint.mlp,
                mlp_grad,
                checkpoint.optimizer,
                checkpoint.threshold if threshold_grad is not None else None,
                threshold_grad,
            )

            sums["loss"] += output.total * batch.n_samples
            sums["bce"] += output.bce_component * batch.n_samples
            sums["margin"] += output.margin_component * batch.n_samples

        return {
            "train_loss": sums["loss"] / train.n_samples,
            "train_bce": sums["bce"] / train.n_samples,
            "train_margin": sums["margin"] / train.n_samples,
            "train_macro_f1": metrics_service.macro_f1(counts),
        }

    def run_variant(
        self,
        config: TrainConfig,
        data: DatasetPair,
        checkpoint_repository: Optional[ICheckpointRepository] = None,
    ) -> VariantRun:
        """변형 하나를 학습합니다.

        checkpoint_repository가 주어지면 매 에폭 "last"와 최고 성능 "best" 체크포인트를 저장하고,
        이미 "last"가 있으면 그 지점부터 이어서 학습합니다.
        """
        train, evaluation = data
        if train.n_samples < 1 or evaluation.n_samples < 1:
            raise EmptyDatasetError(f"학습({train.n_samples})/평가({evaluation.n_samples}) 데이터가 비어 있습니다.")
        variant = registry.get(config.variant)

        best_store = checkpoint_repository or MemoryCheckpointRepository()
        ref_idx = _reference_indices(config, train.n_samples)
        reference_position = np.full(train.n_samples, -1, dtype=np.int64)
        reference_position[ref_idx] = np.arange(ref_idx.size)
        run_id = uuid.uuid4().hex[:8]
        with run_context(run_id, variant.name):
            state = self._restore_state(config, checkpoint_repository) if checkpoint_repository else None
            if state is None:
                idf = signal_service.idf_signal(dataset_service.compute_stats(train.labels, config.epsilon))
                state = self._init_state(config, variant, train, idf, ref_idx)
            logger.info({
                "event": "training_started",
                "variant": variant.name,
                "n_train": train.n_samples,
                "n_eval": evaluation.n_samples,
                "n_labels": train.labels.n_labels,
                "start_epoch": state.checkpoint.epoch + 1,
                "max_epochs": config.max_epochs,
            })

            epoch = state.checkpoint.epoch
            while not state.stopped_early and epoch < config.max_epochs:
                epoch += 1
                started = time.perf_counter()
                train_metrics = self._train_epoch(epoch, config, variant, train, state, reference_position)
                state.checkpoint.epoch = epoch

                eval_fields = {}
                if epoch % config.eval_every == 0 or epoch == config.max_epochs:
                    result = self.evaluate(state.checkpoint, evaluation, config)
                    eval_fields = {
                        "eval_macro_f1": result.macro_f1,
                        "eval_micro_f1": result.micro_f1,
                        "eval_bce": result.bce,
                        "eval_positive_ratio": result.positive_ratio,
                    }

                weights = threshold_service.weight_summary(state.checkpoint.threshold)
                weights["lambda_value"] = variant.reported_lambda(state.checkpoint.threshold)
                record = EpochRecord(epoch=epoch, variant=variant.name, **train_metrics, **eval_fields, **weights)
                state.records.append(record)

                if record.evaluated:
                    if record.eval_macro_f1 > state.best_macro_f1:
                        state.best_epoch = epoch
                        state.best_macro_f1 = record.eval_macro_f1
                        best_store.save(BEST_CHECKPOINT, state.checkpoint)
                    elif epoch - state.best_epoch >= config.early_stop_patience:
                        state.stopped_early = True
                        logger.warning({
                            "event": "early_stopped",
                            "epoch": epoch,
                            "best_epoch": state.best_epoch,
                            "best_macro_f1": state.best_macro_f1,
                        })

                logger.info({
                    "event": "epoch_end",
                    **record.model_dump(),
                    "elapsed_sec": round(time.perf_counter() - started, 4),
                })

                if checkpoint_repository is not None:
                    state.checkpoint.progress = state.progress()
                    checkpoint_repository.save(LAST_CHECKPOINT, state.checkpoint)

            best = best_store.load(BEST_CHECKPOINT)
            best.progress = {}
            final = next(r for r in state.records if r.epoch == state.best_epoch)
            logger.info({
                "event": "training_finished",
                "best_epoch": final.epoch,
                "macro_f1": final.eval_macro_f1,
                "epochs_run": len(state.records),
                "stopped_early": state.stopped_early,
            })
        return VariantRun(final=final, checkpoint=best, records=list(state.records), stopped_early=state.stopped_early)

    def run_ablation_suite(
        self,
        base_config: TrainConfig,
        data: DatasetPair,
        checkpoint_root: Optional[str] = None,
    ) -> AblationResult:
        """등록된 모든 변형을 같은 데이터/시드로 학습하고 요약 표를 만듭니다.

        checkpoint_root가 주어지면 변형별 하위 디렉터리에 체크포인트를 저장합니다.
        """
        runs: dict[str, VariantRun] = {}
        for variant in registry.get_all():
            config = base_config.model_copy(update={"variant": variant.name})
            repository = (
                NpzCheckpointRepository(os.path.join(checkpoint_root, variant.name)) if checkpoint_root else None
            )
            runs[variant.name] = self.run_variant(config, data, repository)

        summary = [run.summary_row() for run in runs.values()]
        logger.info({"event": "ablation_finished", "summary": [row.model_dump() for row in summary]})
        return AblationResult(runs=runs, summary=summary)
