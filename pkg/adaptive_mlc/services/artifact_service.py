"""
학습 산출물 서비스

EpochRecord 목록을 CSV와 SVG 플롯으로 저장합니다.

- metrics.csv : 에폭별 평가/학습 지표 (평가하지 않은 에폭은 split=train, 평가 칸은 빈 값)
- weights.csv : α/β 평균·표준편차와 λ 궤적
- summary.csv : 변형별 최종(최고 평가 macro-F1 에폭) 지표
- macro_f1.svg, weights.svg, final_macro_f1.svg : CSV에서 그린 플롯

플롯의 모든 선/막대/띠에는 SVG id "series-<이름>"을 붙이고, 범례에는 변형 설명을 함께 적습니다.
"""

import csv
import logging
import os
from typing import Iterable, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from adaptive_mlc.core.constants import VARIANT_ORDER
from adaptive_mlc.exception.training.training_exception import ArtifactWriteError
from adaptive_mlc.models.dto import EpochRecord, SummaryRow
from adaptive_mlc.variants import registry

logger = logging.getLogger(__name__)

METRICS_COLUMNS = (
    "epoch", "split", "variant", "macro_f1", "micro_f1", "bce", "positive_ratio",
    "train_loss", "train_bce", "train_macro_f1", "train_margin",
)
WEIGHTS_COLUMNS = ("epoch", "variant", "alpha_mean", "alpha_std", "beta_mean", "beta_std", "lambda")
SUMMARY_COLUMNS = ("variant", "macro_f1", "micro_f1", "bce", "positive_ratio", "best_epoch", "epochs_run")
WEIGHT_SERIES = ("alpha_mean", "beta_mean", "lambda")
# 평균 선 주위에 ±표준편차 띠를 그리는 열 (평균 열 → 표준편차 열)
WEIGHT_BANDS = {"alpha_mean": "alpha_std", "beta_mean": "beta_std"}

SERIES_PREFIX = "series-"

# SVG 출력에서 날짜/랜덤 id를 없애 같은 입력이면 같은 파일이 나오도록 고정
_SVG_RC = {"svg.hashsalt": "adaptive-mlc", "svg.fonttype": "none", "path.simplify": False}


def _blank(value: Optional[float]):
    return "" if value is None else value


def _legend_label(variant: str) -> str:
    return f"{variant}: {registry.get(variant).description}"


def _group_by_variant(records: Iterable[EpochRecord]) -> dict[str, list[EpochRecord]]:
    grouped: dict[str, list[EpochRecord]] = {}
    for record in records:
        grouped.setdefault(record.variant, []).append(record)
    order = {name: i for i, name in enumerate(VARIANT_ORDER)}
    return dict(sorted(grouped.items(), key=lambda item: order.get(item[0], len(order))))


def summarize(records: Iterable[EpochRecord]) -> list[SummaryRow]:
    """변형별로 평가 macro-F1이 가장 높은 에폭(동률이면 앞 에폭)을 요약 행으로 만듭니다."""
    rows = []
    for variant, series in _group_by_variant(records).items():
        evaluated = [r for r in series if r.evaluated]
        if not evaluated:
            continue
        best = max(evaluated, key=lambda r: (r.eval_macro_f1, -r.epoch))
        rows.append(SummaryRow(
            variant=variant,
            macro_f1=best.eval_macro_f1,
            micro_f1=best.eval_micro_f1,
            bce=best.eval_bce,
            positive_ratio=best.eval_positive_ratio,
            best_epoch=best.epoch,
            epochs_run=len(series),
        ))
    return rows


def write_metrics_csv(records: list[EpochRecord], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(METRICS_COLUMNS)
        for r in records:
            writer.writerow([
                r.epoch, "eval" if r.evaluated else "train", r.variant,
                _blank(r.eval_macro_f1), _blank(r.eval_micro_f1), _blank(r.eval_bce), _blank(r.eval_positive_ratio),
                r.train_loss, r.train_bce, r.train_macro_f1, r.train_margin,
            ])


def write_weights_csv(records: list[EpochRecord], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(WEIGHTS_COLUMNS)
        for r in records:
            writer.writerow([r.epoch, r.variant, r.alpha_mean, r.alpha_std, r.beta_mean, r.beta_std, r.lambda_value])


def write_summary_csv(rows: list[SummaryRow], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow([getattr(row, column) for column in SUMMARY_COLUMNS])


def _read_csv(path: str) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def _save_svg(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_macro_f1(metrics_csv: str, path: str) -> None:
    """변형별 평가 macro-F1 곡선 (평가한 에폭만)"""
    series: dict[str, tuple[list[int], list[float]]] = {}
    for row in _read_csv(metrics_csv):
        if row["split"] != "eval":
            continue
        xs, ys = series.setdefault(row["variant"], ([], []))
        xs.append(int(row["epoch"]))
        ys.append(float(row["macro_f1"]))

    with plt.rc_context(_SVG_RC):
        fig, ax = plt.subplots(figsize=(8, 5))
        for variant, (xs, ys) in series.items():
            (line,) = ax.plot(xs, ys, label=_legend_label(variant), linewidth=1.5)
            line.set_gid(f"{SERIES_PREFIX}{variant}")
        ax.set_xlabel("epoch")
        ax.set_ylabel("eval macro-F1")
        ax.set_title("Macro-F1 over training epochs")
        ax.grid(alpha=0.3)
        ax.legend()
        _save_svg(fig, path)


def plot_weights(weights_csv: str, path: str) -> None:
    """α/β 평균(±표준편차 띠)과 λ 궤적.

    선 id는 series-<variant>.<column>, 띠 id는 series-<variant>.<표준편차 열> 입니다.
    """
    read_columns = WEIGHT_SERIES + tuple(WEIGHT_BANDS.values())
    series: dict[str, tuple[list[int], dict[str, list[float]]]] = {}
    for row in _read_csv(weights_csv):
        xs, columns = series.setdefault(row["variant"], ([], {c: [] for c in read_columns}))
        xs.append(int(row["epoch"]))
        for column in read_columns:
            columns[column].append(float(row[column]))

    with plt.rc_context(_SVG_RC):
        fig, ax = plt.subplots(figsize=(8, 5))
        for variant, (xs, columns) in series.items():
            for column in WEIGHT_SERIES:
                ys = columns[column]
                (line,) = ax.plot(xs, ys, label=f"{_legend_label(variant)} {column}", linewidth=1.2)
                line.set_gid(f"{SERIES_PREFIX}{variant}.{column}")
                std_column = WEIGHT_BANDS.get(column)
                if std_column is None:
                    continue
                lower = [m - s for m, s in zip(ys, columns[std_column])]
                upper = [m + s for m, s in zip(ys, columns[std_column])]
                band = ax.fill_between(xs, lower, upper, color=line.get_color(), alpha=0.15, linewidth=0)
                band.set_gid(f"{SERIES_PREFIX}{variant}.{std_column}")
        ax.set_xlabel("epoch")
        ax.set_ylabel("value")
        ax.set_title("Threshold weight dynamics")
        ax.grid(alpha=0.3)
        ax.legend(fontsize="small")
        _save_svg(fig, path)


def plot_final_macro_f1(summary_csv: str, path: str) -> None:
    rows = _read_csv(summary_csv)
    with plt.rc_context(_SVG_RC):
        fig, ax = plt.subplots(figsize=(6, 4))
        bars = ax.bar([r["variant"] for r in rows], [float(r["macro_f1"]) for r in rows], color="steelblue")
        for row, bar in zip(rows, bars):
            bar.set_gid(f"{SERIES_PREFIX}{row['variant']}")
            bar.set_label(_legend_label(row["variant"]))
        if rows:
            ax.legend(handles=list(bars), fontsize="small")
        ax.set_ylabel("macro-F1")
        ax.set_title("Final macro-F1 by variant")
        _save_svg(fig, path)


def emit_artifacts(records: list[EpochRecord], out_dir: str) -> dict[str, str]:
    """CSV 세 개와 SVG 플롯 세 개를 out_dir에 저장하고 {이름: 경로}를 반환합니다."""
    if not records:
        raise ArtifactWriteError("저장할 에폭 기록이 없습니다.")

    ordered = [r for rs in _group_by_variant(records).values() for r in rs]
    paths = {
        "metrics": os.path.join(out_dir, "metrics.csv"),
        "weights": os.path.join(out_dir, "weights.csv"),
        "summary": os.path.join(out_dir, "summary.csv"),
        "macro_f1_plot": os.path.join(out_dir, "macro_f1.svg"),
        "weights_plot": os.path.join(out_dir, "weights.svg"),
        "final_macro_f1_plot": os.path.join(out_dir, "final_macro_f1.svg"),
    }
    try:
        os.makedirs(out_dir, exist_ok=True)
        write_metrics_csv(ordered, paths["metrics"])
        write_weights_csv(ordered, paths["weights"])
        write_summary_csv(summarize(ordered), paths["summary"])
        plot_macro_f1(paths["metrics"], paths["macro_f1_plot"])
        plot_weights(paths["weights"], paths["weights_plot"])
        plot_final_macro_f1(paths["summary"], paths["final_macro_f1_plot"])
    except OSError as e:
        raise ArtifactWriteError(f"산출물을 저장할 수 없습니다: {out_dir} ({e})") from e

    logger.info({"event": "artifacts_written", "out_dir": out_dir, "n_records": len(ordered)})
    return paths
