"""Evaluation report rendering: delimited tables plus summary figures.

A report has two tables. Table one aggregates text recognition per engine
(docs, words, CER, WER, word accuracy); table two scores extracted fields
(precision, recall, F1, support) with a pooled ALL row last. Both render to
CSV (the machine format) or markdown (the human format), and the figure
helpers draw the per-engine accuracy bars and the digital-versus-scanned
confidence bars next to the delimited output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import InvariantViolation
from .metrics import FieldCounts, Score, f1_score

ENGINE_HEADER = ("engine", "docs", "words", "cer", "wer", "word_accuracy")
FIELD_HEADER = ("field", "precision", "recall", "f1", "support")
FOOTER_NOTE = "# note: layout identification: not scored"

ENGINE_SORTS = ("name", "accuracy")
REPORT_FORMATS = ("csv", "markdown")


@dataclass(frozen=True)
class EngineRow:
    engine: str
    docs: int
    words: int
    cer: float
    wer: float
    word_accuracy: float


@dataclass(frozen=True)
class FieldRow:
    field: str
    score: Score


@dataclass(frozen=True)
class EvalReport:
    engines: tuple[EngineRow, ...]
    fields: tuple[FieldRow, ...]
    micro: Score | None


def build_field_rows(per_field: Mapping[str, FieldCounts]) -> tuple[tuple[FieldRow, ...], Score | None]:
    """Score each field and pool a micro row; None micro when nothing scored."""
    rows = tuple(
        FieldRow(name, f1_score(per_field[name])) for name in sorted(per_field)
    )
    if not rows:
        return rows, None
    pooled = FieldCounts()
    for counts in per_field.values():
        pooled.add(counts)
    return rows, f1_score(pooled)


def _rate(value: float) -> str:
    return f"{value:.4f}"


def _sorted_engines(rows: Sequence[EngineRow], engine_sort: str) -> list[EngineRow]:
    if engine_sort == "name":
        return sorted(rows, key=lambda r: r.engine)
    if engine_sort == "accuracy":
        # Descending accuracy; name breaks ties so output stays stable.
        return sorted(rows, key=lambda r: (-r.word_accuracy, r.engine))
    raise InvariantViolation(f"unknown engine sort {engine_sort!r}")


def emit_report(report: EvalReport, fmt: str = "csv", engine_sort: str = "name") -> str:
    """Render the two-table report; ends with the layout-scoring footer note."""
    if fmt not in REPORT_FORMATS:
        raise InvariantViolation(f"unknown report format {fmt!r}")
    engines = _sorted_engines(report.engines, engine_sort)
    if fmt == "csv":
        return _emit_csv(engines, report)
    return _emit_markdown(engines, report)


def _engine_cells(row: EngineRow) -> tuple[str, ...]:
    return (
        row.engine,
        str(row.docs),
        str(row.words),
        _rate(row.cer),
        _rate(row.wer),
        _rate(row.word_accuracy),
    )


def _field_cells(name: str, score: Score) -> tuple[str, ...]:
    return (
        name,
        _rate(score.precision),
        _rate(score.recall),
        _rate(score.f1),
        str(score.support),
    )


def _emit_csv(engines: Sequence[EngineRow], report: EvalReport) -> str:
    lines = [",".join(ENGINE_HEADER)]
    for row in engines:
        lines.append(",".join(_engine_cells(row)))
    lines.append("")
    lines.append(",".join(FIELD_HEADER))
    for fr in report.fields:
        lines.append(",".join(_field_cells(fr.field, fr.score)))
    if report.micro is not None:
        lines.append(",".join(_field_cells("ALL", report.micro)))
    lines.append(FOOTER_NOTE)
    return "\n".join(lines) + "\n"


def _pipe_row(cells: Iterable[str]) -> str:
    return "| " + " | ".join(cells) + " |"


def _emit_markdown(engines: Sequence[EngineRow], report: EvalReport) -> str:
    lines = [_pipe_row(ENGINE_HEADER), _pipe_row(["---"] * len(ENGINE_HEADER))]
    for row in engines:
        lines.append(_pipe_row(_engine_cells(row)))
    lines.append("")
    lines.append(_pipe_row(FIELD_HEADER))
    lines.append(_pipe_row(["---"] * len(FIELD_HEADER)))
    for fr in report.fields:
        lines.append(_pipe_row(_field_cells(fr.field, fr.score)))
    if report.micro is not None:
        lines.append(_pipe_row(_field_cells("ALL", report.micro)))
    lines.append("")
    lines.append(FOOTER_NOTE)
    return "\n".join(lines) + "\n"


# --- figures --------------------------------------------------------------------


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_accuracy_figure(rows: Sequence[EngineRow], path) -> None:
    """Bar chart of word accuracy per engine, best first."""
    plt = _pyplot()
    ordered = _sorted_engines(rows, "accuracy")
    names = [r.engine for r in ordered]
    values = [r.word_accuracy for r in ordered]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(names, values, color="#4878a8")
    ax.set_ylim(0.0, 1.0)
    ax.set_ylabel("word accuracy")
    ax.set_title("Recognition accuracy by engine")
    for i, v in enumerate(values):
        ax.text(i, v + 0.01, f"{v:.3f}", ha="center", va="bottom", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_confidence_figure(means: Mapping[str, float], path) -> None:
    """Bar chart of mean aligned field confidence per document provenance."""
    plt = _pyplot()
    names = sorted(means)
    values = [means[n] for n in names]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.bar(names, values, color=["#4878a8", "#a85448"][: len(names)] or "#4878a8")
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("mean field confidence")
    ax.set_title("Field confidence by source type")
    for i, v in enumerate(values):
        ax.text(i, v + 0.01, f"{v:.3f}", ha="center", va="bottom", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
