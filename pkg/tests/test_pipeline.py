"""Tests for per-file routing, scan preprocessing, and page assembly."""

from __future__ import annotations

import io
import zipfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from docmill.engines import EngineSpec
from docmill.errors import ConfigError
from docmill.fixtures import write_receipt_corpus
from docmill.images import BinaryImage, RasterImage, write_png
from docmill.model import BoundingBox, Word, flatten_text, words_from_json
from docmill.pdf import generate_pdf
from docmill.pipeline import (
    STATUS_FAILED,
    STATUS_NEEDS_SCAN,
    STATUS_OK,
    assemble_page,
    preprocess_scan,
    process_file,
    scan_to_document,
)

CLEAN_MOCK = EngineSpec(name="mock-clean", kind="mock", mock_char_error_rate=0.0, mock_seed=3)


def _word(text: str, x0: float, y0: float, x1: float, y1: float, conf: float = 1.0) -> Word:
    return Word(text, BoundingBox(x0, y0, x1, y1, "pixel"), conf)


# --- preprocessing chain --------------------------------------------------------


def test_preprocess_binarizes_a_grayscale_scan() -> None:
    arr = np.full((4, 10), 255, dtype=np.uint8)
    arr[1, 2:8] = 0  # a dark stroke
    result = preprocess_scan(RasterImage.from_array(arr), run_deskew=False, run_denoise=False)
    assert result.binary.to_array().tolist() == (arr == 0).astype(int).tolist()
    assert result.skew_angle == 0.0


def test_preprocess_passes_binary_images_through() -> None:
    binary = BinaryImage(4, 2, bytes([0, 1, 1, 0, 0, 0, 1, 0]))
    result = preprocess_scan(binary, run_deskew=False, run_denoise=False)
    assert result.binary == binary
    assert result.skew_angle == 0.0


def test_preprocess_skips_deskew_for_blank_pages() -> None:
    blank = BinaryImage(6, 6, bytes(36))
    result = preprocess_scan(blank, run_deskew=True, run_denoise=False)
    assert result.binary == blank
    assert result.skew_angle == 0.0


def test_preprocess_skips_denoise_for_tiny_images() -> None:
    tiny = BinaryImage(5, 2, bytes([0, 0, 1, 0, 0, 0, 0, 0, 0, 0]))
    result = preprocess_scan(tiny, run_deskew=False, run_denoise=True)
    assert result.binary == tiny


def test_preprocess_denoise_removes_isolated_speckles() -> None:
    arr = np.zeros((5, 5), dtype=np.uint8)
    arr[2, 2] = 1
    result = preprocess_scan(BinaryImage.from_array(arr), run_deskew=False, run_denoise=True)
    assert result.binary.foreground_count() == 0


# --- page assembly ----------------------------------------------------------------


def test_words_on_one_visual_row_form_a_line() -> None:
    words = [_word("one", 0, 0, 30, 10), _word("two", 40, 2, 70, 12)]
    page = assemble_page(words, 100, 40)
    assert len(page.blocks) == 1
    assert [line.text for line in page.blocks[0].lines] == ["one two"]
    assert page.blocks[0].lines[0].baseline_y == 12.0


def test_slight_overlap_is_not_enough_to_share_a_line() -> None:
    words = [_word("one", 0, 0, 30, 10), _word("two", 0, 8, 30, 18)]
    page = assemble_page(words, 100, 40)
    assert [line.text for block in page.blocks for line in block.lines] == ["one", "two"]


def test_line_words_come_out_in_reading_order() -> None:
    words = [_word("two", 40, 2, 70, 12), _word("one", 0, 0, 30, 10)]
    page = assemble_page(words, 100, 40)
    assert page.blocks[0].lines[0].text == "one two"


def test_blocks_split_where_the_line_gap_is_large() -> None:
    words = [
        _word("one", 0, 0, 30, 10),
        _word("two", 40, 2, 70, 12),
        _word("three", 0, 20, 50, 30),
        _word("four", 0, 60, 40, 70),
    ]
    # Line boxes are (0, 12), (20, 30), (60, 70): heights 12, 10, 10, so the
    # median is 10 and the split threshold 15. Only the 30-unit gap splits.
    page = assemble_page(words, 100, 80)
    block_texts = [[line.text for line in block.lines] for block in page.blocks]
    assert block_texts == [["one two", "three"], ["four"]]


def test_empty_pages_have_no_blocks() -> None:
    page = assemble_page([], 100, 50, index=2, unit="pixel")
    assert page.blocks == ()
    assert (page.index, page.width, page.height, page.unit) == (2, 100.0, 50.0, "pixel")


_BOX_TUPLES = st.lists(
    st.tuples(st.integers(0, 60), st.integers(0, 60), st.integers(1, 15), st.integers(1, 10)),
    max_size=10,
    unique_by=lambda t: t[0],
)


def _words_from(boxes: list[tuple[int, int, int, int]]) -> list[Word]:
    return [
        Word(f"w{i}", BoundingBox(x, y, x + w, y + h, "pixel"), 1.0)
        for i, (x, y, w, h) in enumerate(boxes)
    ]


@given(boxes=_BOX_TUPLES)
def test_assembly_preserves_every_word(boxes: list[tuple[int, int, int, int]]) -> None:
    words = _words_from(boxes)
    page = assemble_page(words, 100, 100)
    assert sorted(w.text for w in page.words) == sorted(w.text for w in words)
    for block in page.blocks:
        assert block.lines
        for line in block.lines:
            assert line.words


@given(boxes=_BOX_TUPLES, data=st.data())
def test_assembly_ignores_input_order(
    boxes: list[tuple[int, int, int, int]], data: st.DataObject
) -> None:
    words = _words_from(boxes)
    shuffled = data.draw(st.permutations(words))
    assert assemble_page(shuffled, 100, 100) == assemble_page(words, 100, 100)


def test_scan_to_document_wraps_one_scanned_page() -> None:
    doc = scan_to_document(
        [_word("hi", 0, 0, 10, 10)],
        200,
        100,
        doc_id="scan_1",
        source_path="scan_1.png",
        engine_name="mock-clean",
    )
    assert doc.provenance == "scanned"
    assert doc.engine_name == "mock-clean"
    assert doc.doc_id == "scan_1"
    assert len(doc.pages) == 1
    assert flatten_text(doc) == "hi"


# --- per-file routing -------------------------------------------------------------


def test_process_file_extracts_digital_pdfs(tmp_path: Path) -> None:
    path = tmp_path / "sample.pdf"
    path.write_bytes(generate_pdf([["alpha beta", "gamma"], ["delta"]]))
    outcome = process_file(path)
    assert outcome.status == STATUS_OK
    assert outcome.error is None
    assert outcome.doc is not None
    assert outcome.doc.provenance == "digital"
    assert outcome.doc.doc_id == "sample"
    assert flatten_text(outcome.doc) == "alpha beta\ngamma\n\ndelta"


def _pdf_without_text() -> bytes:
    bodies = {
        1: b"<< /Type /Catalog /Pages 2 0 R >>",
        2: b"<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
        3: b"<< /Type /Page /Parent 2 0 R /MediaBox [0 0 612 792] /Contents 4 0 R >>",
        4: b"<< /Length 5 >>\nstream\nBT ET\nendstream",
    }
    out = bytearray(b"%PDF-1.4\n")
    offsets: dict[int, int] = {}
    for num in sorted(bodies):
        offsets[num] = len(out)
        out += f"{num} 0 obj\n".encode() + bodies[num] + b"\nendobj\n"
    xref = len(out)
    out += b"xref\n0 5\n0000000000 65535 f \n"
    for num in range(1, 5):
        out += f"{offsets[num]:010d} 00000 n \n".encode()
    out += b"trailer\n<< /Size 5 /Root 1 0 R >>\nstartxref\n" + str(xref).encode() + b"\n%%EOF\n"
    return bytes(out)


def test_process_file_flags_textless_pdfs_for_scanning(tmp_path: Path) -> None:
    path = tmp_path / "image_only.pdf"
    path.write_bytes(_pdf_without_text())
    outcome = process_file(path)
    assert outcome.status == STATUS_NEEDS_SCAN
    assert outcome.doc is None
    assert "no text ops found" in (outcome.error or "")


_W = "http://schemas.openxmlformats.org/wordprocessingml/2006/main"


def _docx_bytes(paragraphs: list[str]) -> bytes:
    body = "".join(f"<w:p><w:r><w:t>{p}</w:t></w:r></w:p>" for p in paragraphs)
    xml = f'<w:document xmlns:w="{_W}"><w:body>{body}</w:body></w:document>'
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w") as zf:
        zf.writestr("word/document.xml", xml)
    return buf.getvalue()


def test_process_file_extracts_docx(tmp_path: Path) -> None:
    path = tmp_path / "memo.docx"
    path.write_bytes(_docx_bytes(["alpha beta", "gamma"]))
    outcome = process_file(path)
    assert outcome.status == STATUS_OK
    assert outcome.doc is not None
    assert outcome.doc.provenance == "digital"
    assert flatten_text(outcome.doc) == "alpha beta\n\ngamma"


def test_process_file_runs_scans_through_the_engine(tmp_path: Path) -> None:
    write_receipt_corpus(tmp_path, count=1, seed=11)
    png = tmp_path / "receipt_000.png"
    outcome = process_file(png, CLEAN_MOCK)
    assert outcome.status == STATUS_OK
    assert outcome.doc is not None
    assert outcome.doc.provenance == "scanned"
    assert outcome.doc.engine_name == "mock-clean"
    assert outcome.skew_angle == 0.0
    assert outcome.elapsed_ms is not None

    gold = words_from_json((tmp_path / "receipt_000.words.json").read_bytes())
    assert [w.text for w in outcome.doc.pages[0].words] == [w.text for w in gold]
    transcript = (tmp_path / "receipt_000.txt").read_text("utf-8")
    assert flatten_text(outcome.doc).split() == transcript.split()


def test_process_file_requires_an_engine_for_images(tmp_path: Path) -> None:
    with pytest.raises(ConfigError):
        process_file(tmp_path / "page.png", None)


def test_mock_engine_without_ground_truth_fails_that_file(tmp_path: Path) -> None:
    arr = np.full((8, 8), 255, dtype=np.uint8)
    arr[3, 2:6] = 0
    path = tmp_path / "orphan.png"
    path.write_bytes(write_png(RasterImage.from_array(arr)))
    outcome = process_file(path, CLEAN_MOCK)
    assert outcome.status == STATUS_FAILED
    assert "MissingGroundTruth" in (outcome.error or "")


def test_process_file_rejects_unknown_extensions(tmp_path: Path) -> None:
    path = tmp_path / "notes.txt"
    path.write_text("hello")
    outcome = process_file(path)
    assert outcome.status == STATUS_FAILED
    assert "unsupported file type" in (outcome.error or "")
    assert "'.txt'" in (outcome.error or "")


def test_process_file_reports_missing_files(tmp_path: Path) -> None:
    outcome = process_file(tmp_path / "ghost.pdf")
    assert outcome.status == STATUS_FAILED
    assert "FileNotFoundError" in (outcome.error or "")


def test_process_file_reports_corrupt_pdfs(tmp_path: Path) -> None:
    path = tmp_path / "bad.pdf"
    path.write_bytes(b"this is not a pdf at all")
    outcome = process_file(path)
    assert outcome.status == STATUS_FAILED
    assert "NotAPdf" in (outcome.error or "")
