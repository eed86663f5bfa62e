from __future__ import annotations

import numpy as np
import pytest

from docmill.errors import UnsupportedCharacter
from docmill.fonts import CELL_W, GLYPH_H, GLYPH_W, glyph_rows, measure_line, render_text_image


def test_glyph_rows_shape():
    rows = glyph_rows("A")
    assert len(rows) == GLYPH_H
    assert all(len(r) == GLYPH_W for r in rows)


def test_lowercase_falls_back_to_uppercase():
    assert glyph_rows("q") == glyph_rows("Q")


def test_unsupported_character_raises():
    with pytest.raises(UnsupportedCharacter):
        glyph_rows("~")


def test_measure_line():
    assert measure_line("") == 0
    assert measure_line("AB") == 2 * CELL_W - 1
    assert measure_line("AB", scale=3) == (2 * CELL_W - 1) * 3


def test_render_gives_exact_word_boxes():
    image, words = render_text_image(["AB CD"], scale=1, margin=4)
    assert [w.text for w in words] == ["AB", "CD"]
    first, second = words
    assert (first.bbox.x0, first.bbox.y0) == (4.0, 4.0)
    assert first.bbox.x1 == 4 + (1 * CELL_W + GLYPH_W)  # two cells, last glyph 5 wide
    assert first.bbox.y1 == 4.0 + GLYPH_H
    assert second.bbox.x0 == 4 + 3 * CELL_W
    assert all(w.confidence == 1.0 for w in words)


def test_render_scales_boxes_linearly():
    _, at1 = render_text_image(["HELLO"], scale=1, margin=0)
    _, at3 = render_text_image(["HELLO"], scale=3, margin=0)
    assert at3[0].bbox.x1 == at1[0].bbox.x1 * 3
    assert at3[0].bbox.y1 == at1[0].bbox.y1 * 3


def test_render_ink_is_black_on_white():
    image, words = render_text_image(["I"], scale=1, margin=2)
    arr = image.to_array()
    assert arr.min() == 0 and arr.max() == 255
    box = words[0].bbox
    inside = arr[int(box.y0) : int(box.y1), int(box.x0) : int(box.x1)]
    assert (inside == 0).any()
    assert (arr[0, :] == 255).all()


def test_render_multiline_vertical_pitch():
    _, words = render_text_image(["A", "B"], scale=2, margin=0)
    assert words[1].bbox.y0 - words[0].bbox.y0 == 20.0  # 10 rows * scale


def test_words_fit_inside_the_image():
    image, words = render_text_image(["TOTAL: $12.50", "THANK YOU"], scale=2)
    for w in words:
        assert 0 <= w.bbox.x0 < w.bbox.x1 <= image.width
        assert 0 <= w.bbox.y0 < w.bbox.y1 <= image.height


def test_receipt_charset_renders():
    # every character the fixture corpus can emit has a glyph
    for ch in "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,:;$/-#()*&%+=!?'\"":
        if ch != " ":
            glyph_rows(ch)
