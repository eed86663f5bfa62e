"""Bundled 5x7 bitmap font and text-image rendering for synthetic fixtures.

Glyphs cover uppercase letters, digits, and the punctuation the fixture
generator emits; lowercase input renders through the uppercase shapes while
the logical text keeps its original case. Rendering returns both the image
and pixel-exact word boxes, so generated pages double as OCR ground truth.
"""

from __future__ import annotations

import numpy as np

from .errors import UnsupportedCharacter
from .images import RasterImage
from .model import BoundingBox, Word

# Each glyph is 7 rows of 5 cells; "X" marks ink.
GLYPHS: dict[str, tuple[str, ...]] = {
    "A": (".XXX.", "X...X", "X...X", "XXXXX", "X...X", "X...X", "X...X"),
    "B": ("XXXX.", "X...X", "X...X", "XXXX.", "X...X", "X...X", "XXXX."),
    "C": (".XXX.", "X...X", "X....", "X....", "X....", "X...X", ".XXX."),
    "D": ("XXXX.", "X...X", "X...X", "X...X", "X...X", "X...X", "XXXX."),
    "E": ("XXXXX", "X....", "X....", "XXXX.", "X....", "X....", "XXXXX"),
    "F": ("XXXXX", "X....", "X....", "XXXX.", "X....", "X....", "X...."),
    "G": (".XXX.", "X...X", "X....", "X.XXX", "X...X", "X...X", ".XXXX"),
    "H": ("X...X", "X...X", "X...X", "XXXXX", "X...X", "X...X", "X...X"),
    "I": ("XXXXX", "..X..", "..X..", "..X..", "..X..", "..X..", "XXXXX"),
    "J": ("..XXX", "...X.", "...X.", "...X.", "...X.", "X..X.", ".XX.."),
    "K": ("X...X", "X..X.", "X.X..", "XX...", "X.X..", "X..X.", "X...X"),
    "L": ("X....", "X....", "X....", "X....", "X....", "X....", "XXXXX"),
    "M": ("X...X", "XX.XX", "X.X.X", "X.X.X", "X...X", "X...X", "X...X"),
    "N": ("X...X", "XX..X", "X.X.X", "X..XX", "X...X", "X...X", "X...X"),
    "O": (".XXX.", "X...X", "X...X", "X...X", "X...X", "X...X", ".XXX."),
    "P": ("XXXX.", "X...X", "X...X", "XXXX.", "X....", "X....", "X...."),
    "Q": (".XXX.", "X...X", "X...X", "X...X", "X.X.X", "X..X.", ".XX.X"),
    "R": ("XXXX.", "X...X", "X...X", "XXXX.", "X.X..", "X..X.", "X...X"),
    "S": (".XXXX", "X....", "X....", ".XXX.", "....X", "....X", "XXXX."),
    "T": ("XXXXX", "..X..", "..X..", "..X..", "..X..", "..X..", "..X.."),
    "U": ("X...X", "X...X", "X...X", "X...X", "X...X", "X...X", ".XXX."),
    "V": ("X...X", "X...X", "X...X", "X...X", "X...X", ".X.X.", "..X.."),
    "W": ("X...X", "X...X", "X...X", "X.X.X", "X.X.X", "XX.XX", "X...X"),
    "X": ("X...X", "X...X", ".X.X.", "..X..", ".X.X.", "X...X", "X...X"),
    "Y": ("X...X", "X...X", ".X.X.", "..X..", "..X..", "..X..", "..X.."),
    "Z": ("XXXXX", "....X", "...X.", "..X..", ".X...", "X....", "XXXXX"),
    "0": (".XXX.", "X...X", "X..XX", "X.X.X", "XX..X", "X...X", ".XXX."),
    "1": ("..X..", ".XX..", "..X..", "..X..", "..X..", "..X..", "XXXXX"),
    "2": (".XXX.", "X...X", "....X", "...X.", "..X..", ".X...", "XXXXX"),
    "3": ("XXXXX", "...X.", "..X..", "...X.", "....X", "X...X", ".XXX."),
    "4": ("...X.", "..XX.", ".X.X.", "X..X.", "XXXXX", "...X.", "...X."),
    "5": ("XXXXX", "X....", "XXXX.", "....X", "....X", "X...X", ".XXX."),
    "6": ("..XX.", ".X...", "X....", "XXXX.", "X...X", "X...X", ".XXX."),
    "7": ("XXXXX", "....X", "...X.", "..X..", ".X...", ".X...", ".X..."),
    "8": (".XXX.", "X...X", "X...X", ".XXX.", "X...X", "X...X", ".XXX."),
    "9": (".XXX.", "X...X", "X...X", ".XXXX", "....X", "...X.", ".XX.."),
    " ": (".....", ".....", ".....", ".....", ".....", ".....", "....."),
    ".": (".....", ".....", ".....", ".....", ".....", ".XX..", ".XX.."),
    ",": (".....", ".....", ".....", ".....", ".....", "..XX.", ".XX.."),
    ":": (".....", ".XX..", ".XX..", ".....", ".XX..", ".XX..", "....."),
    ";": (".....", ".XX..", ".XX..", ".....", ".XX..", "..X..", ".X..."),
    "$": ("..X..", ".XXXX", "X.X..", ".XXX.", "..X.X", "XXXX.", "..X.."),
    "/": ("....X", "...X.", "...X.", "..X..", ".X...", ".X...", "X...."),
    "-": (".....", ".....", ".....", "XXXXX", ".....", ".....", "....."),
    "#": (".X.X.", ".X.X.", "XXXXX", ".X.X.", "XXXXX", ".X.X.", ".X.X."),
    "(": ("...X.", "..X..", ".X...", ".X...", ".X...", "..X..", "...X."),
    ")": (".X...", "..X..", "...X.", "...X.", "...X.", "..X..", ".X..."),
    "*": (".....", "..X..", "X.X.X", ".XXX.", "X.X.X", "..X..", "....."),
    "&": (".XX..", "X..X.", "X.X..", ".X...", "X.X.X", "X..X.", ".XX.X"),
    "%": ("XX...", "XX..X", "...X.", "..X..", ".X...", "X..XX", "...XX"),
    "+": (".....", "..X..", "..X..", "XXXXX", "..X..", "..X..", "....."),
    "=": (".....", ".....", "XXXXX", ".....", "XXXXX", ".....", "....."),
    "!": ("..X..", "..X..", "..X..", "..X..", "..X..", ".....", "..X.."),
    "?": (".XXX.", "X...X", "....X", "...X.", "..X..", ".....", "..X.."),
    "'": ("..X..", "..X..", ".....", ".....", ".....", ".....", "....."),
    '"': (".X.X.", ".X.X.", ".....", ".....", ".....", ".....", "....."),
}

GLYPH_W = 5
GLYPH_H = 7
CELL_W = 6  # glyph plus one column of spacing
LINE_PITCH = 10  # glyph plus three rows of leading


def glyph_rows(ch: str) -> tuple[str, ...]:
    rows = GLYPHS.get(ch) or GLYPHS.get(ch.upper())
    if rows is None:
        raise UnsupportedCharacter(ch)
    return rows


def measure_line(text: str, scale: int = 1) -> int:
    """Pixel width of a rendered line (excluding margins)."""
    if not text:
        return 0
    return (len(text) * CELL_W - 1) * scale


def render_text_image(
    lines: list[str], scale: int = 2, margin: int | None = None
) -> tuple[RasterImage, list[Word]]:
    """Render text as black-on-white grayscale; also return per-word boxes.

    Words are maximal runs of non-space characters; their boxes span the ink
    cells exactly (pixel units), which makes the output usable as ground truth.
    """
    if scale < 1:
        raise ValueError("scale must be >= 1")
    if margin is None:
        margin = 4 * scale

    n_cols = max((len(line) for line in lines), default=0)
    width = margin * 2 + max(measure_line("M" * n_cols, scale), scale)
    height = margin * 2 + ((len(lines) - 1) * LINE_PITCH + GLYPH_H) * scale if lines else margin * 2 + scale

    canvas = np.full((height, width), 255, dtype=np.uint8)
    words: list[Word] = []

    for row, line in enumerate(lines):
        y0 = margin + row * LINE_PITCH * scale
        for col, ch in enumerate(line):
            rows = glyph_rows(ch)
            x0 = margin + col * CELL_W * scale
            for gy in range(GLYPH_H):
                for gx in range(GLYPH_W):
                    if rows[gy][gx] == "X":
                        canvas[
                            y0 + gy * scale : y0 + (gy + 1) * scale,
                            x0 + gx * scale : x0 + (gx + 1) * scale,
                        ] = 0
        # word boxes from character runs
        col = 0
        while col < len(line):
            if line[col] == " ":
                col += 1
                continue
            start = col
            while col < len(line) and line[col] != " ":
                col += 1
            x_start = margin + start * CELL_W * scale
            x_end = margin + ((col - 1) * CELL_W + GLYPH_W) * scale
            words.append(
                Word(
                    line[start:col],
                    BoundingBox(x_start, y0, x_end, y0 + GLYPH_H * scale, "pixel"),
                    1.0,
                )
            )

    return RasterImage.from_array(canvas), words
