"""Turn glyph runs into the unified page model.

PDF user space has a bottom-left origin with y up; the document model wants
top-left with y down, so baselines flip via y' = page_height - y. Runs cluster
into lines when their baselines sit within 0.4 em of the line; words split at
space glyphs and at horizontal gaps wider than a quarter em; lines split into
paragraph blocks at vertical gaps beyond 1.8 x the median line height.

The result is permutation-invariant over run order: runs are sorted before
clustering.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Sequence

from ..model import Block, BoundingBox, Line, Page, Word, sort_words
from .content import GlyphRun

LINE_BASELINE_FACTOR = 0.4
WORD_GAP_FACTOR = 0.25
BLOCK_GAP_FACTOR = 1.8
ASCENT = 0.8  # em above baseline
DESCENT = 0.2  # em below baseline


@dataclass
class _Cell:
    """One glyph with its horizontal extent on the flipped page."""

    char: str
    x0: float
    x1: float
    font_size: float


def reconstruct_layout(
    runs: Sequence[GlyphRun], page_width: float, page_height: float, page_index: int = 0
) -> Page:
    """Assemble one Page (unit: point, confidence 1.0) from glyph runs."""
    flipped = sorted(
        ((page_height - r.origin_y, r) for r in runs if r.text.strip()),
        key=lambda pair: (pair[0], pair[1].origin_x),
    )

    # cluster runs into lines by baseline proximity
    line_groups: list[tuple[float, list[tuple[float, GlyphRun]]]] = []
    for baseline, run in flipped:
        if line_groups:
            ref = line_groups[-1][0]
            if abs(baseline - ref) <= LINE_BASELINE_FACTOR * run.font_size:
                line_groups[-1][1].append((baseline, run))
                continue
        line_groups.append((baseline, [(baseline, run)]))

    lines: list[tuple[float, float, Line]] = []  # (baseline, line_height, Line)
    for ref_baseline, members in line_groups:
        cells: list[_Cell] = []
        for _, run in members:
            per_glyph = run.advance_width / len(run.text)
            for i, ch in enumerate(run.text):
                x0 = run.origin_x + i * per_glyph
                cells.append(_Cell(ch, x0, x0 + per_glyph, run.font_size))
        cells.sort(key=lambda c: (c.x0, c.x1))

        words = _cells_to_words(cells, ref_baseline, page_width, page_height)
        if not words:
            continue
        line_height = max(m[1].font_size for m in members)
        lines.append((ref_baseline, line_height, Line(tuple(sort_words(words)), ref_baseline)))

    if not lines:
        return Page(page_index, page_width, page_height, "point", ())

    median_height = statistics.median(h for _, h, _ in lines)
    blocks: list[Block] = []
    current: list[Line] = [lines[0][2]]
    prev_baseline = lines[0][0]
    for baseline, _, line in lines[1:]:
        if baseline - prev_baseline > BLOCK_GAP_FACTOR * median_height:
            blocks.append(Block(tuple(current), "paragraph"))
            current = []
        current.append(line)
        prev_baseline = baseline
    blocks.append(Block(tuple(current), "paragraph"))

    return Page(page_index, page_width, page_height, "point", tuple(blocks))


def _cells_to_words(
    cells: list[_Cell], baseline: float, page_width: float, page_height: float
) -> list[Word]:
    words: list[Word] = []
    current: list[_Cell] = []

    def flush() -> None:
        if not current:
            return
        text = "".join(c.char for c in current)
        if not text.strip():
            current.clear()
            return
        fs = max(c.font_size for c in current)
        x0 = max(0.0, min(c.x0 for c in current))
        x1 = min(page_width, max(c.x1 for c in current))
        y0 = max(0.0, baseline - ASCENT * fs)
        y1 = min(page_height, baseline + DESCENT * fs)
        words.append(Word(text, BoundingBox(x0, y0, x1, y1, "point"), 1.0))
        current.clear()

    prev: _Cell | None = None
    for cell in cells:
        if cell.char == " ":
            flush()
            prev = cell
            continue
        if prev is not None and current and cell.x0 - prev.x1 > WORD_GAP_FACTOR * prev.font_size:
            flush()
        current.append(cell)
        prev = cell
    flush()
    return words
