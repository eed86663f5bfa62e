"""Per-file processing: route by extension, preprocess scans, assemble pages.

Scanned rasters run grayscale -> threshold -> deskew -> denoise, then an
engine reads words off the page and the words are grouped geometrically into
lines and blocks. Digital formats skip all of that and keep their native
structure. PDFs without any text-showing operator are reported as needing a
scan pass rather than being rasterized here.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .docx import extract_docx_document
from .engines import EngineSpec, recognize
from .errors import ConfigError, DocmillError, UnsupportedFeature
from .images import (
    IMAGE_SUFFIXES,
    BinaryImage,
    RasterImage,
    read_image,
)
from .model import (
    Block,
    DocumentRecord,
    Line,
    Page,
    Word,
    words_from_json,
)
from .pdf import extract_pdf_document
from .preprocess import binarize, deskew, histogram, median_denoise, otsu_threshold, to_grayscale

# A word joins the current line when its vertical overlap with the line box
# covers at least half the smaller of the two heights.
LINE_OVERLAP_FACTOR = 0.5
# Consecutive lines start a new block when the vertical gap between their
# boxes exceeds this multiple of the median line height.
BLOCK_GAP_FACTOR = 1.5

PDF_SUFFIX = ".pdf"
DOCX_SUFFIX = ".docx"
STATUS_OK = "ok"
STATUS_NEEDS_SCAN = "needs-scan"
STATUS_FAILED = "failed"


@dataclass(frozen=True)
class PreprocessResult:
    binary: BinaryImage
    skew_angle: float


def preprocess_scan(
    image: RasterImage | BinaryImage, *, run_deskew: bool = True, run_denoise: bool = True
) -> PreprocessResult:
    """Standard scan cleanup chain; binary inputs skip thresholding."""
    if isinstance(image, BinaryImage):
        binary = image
    else:
        gray = to_grayscale(image)
        binary = binarize(gray, otsu_threshold(histogram(gray)))

    angle = 0.0
    if run_deskew and binary.foreground_count() > 0:
        binary, angle = deskew(binary)
    if run_denoise and binary.width >= 3 and binary.height >= 3:
        binary = median_denoise(binary)
    return PreprocessResult(binary, angle)


# --- geometric page assembly --------------------------------------------------


def _group_lines(words: Sequence[Word]) -> list[list[Word]]:
    ordered = sorted(words, key=lambda w: (w.bbox.y0, w.bbox.x0, w.bbox.x1))
    groups: list[list[Word]] = []
    y0 = y1 = 0.0
    for word in ordered:
        if groups:
            overlap = min(y1, word.bbox.y1) - max(y0, word.bbox.y0)
            height = min(y1 - y0, word.bbox.y1 - word.bbox.y0)
            if overlap >= LINE_OVERLAP_FACTOR * height and overlap > 0:
                groups[-1].append(word)
                y0 = min(y0, word.bbox.y0)
                y1 = max(y1, word.bbox.y1)
                continue
        groups.append([word])
        y0, y1 = word.bbox.y0, word.bbox.y1
    return groups


def assemble_page(
    words: Sequence[Word], width: float, height: float, *, index: int = 0, unit: str = "pixel"
) -> Page:
    """Group recognized words into lines by vertical overlap, then split
    blocks at unusually large line gaps. One block unless a gap says otherwise."""
    if not words:
        return Page(index, width, height, unit, ())

    groups = _group_lines(words)
    lines = [
        Line.from_words(group, baseline_y=max(w.bbox.y1 for w in group))
        for group in groups
    ]

    boxes = [
        (min(w.bbox.y0 for w in g), max(w.bbox.y1 for w in g)) for g in groups
    ]
    median_height = statistics.median(b[1] - b[0] for b in boxes)
    threshold = BLOCK_GAP_FACTOR * median_height

    blocks: list[Block] = []
    current: list[Line] = [lines[0]]
    for i in range(1, len(lines)):
        gap = boxes[i][0] - boxes[i - 1][1]
        if gap > threshold:
            blocks.append(Block(tuple(current)))
            current = []
        current.append(lines[i])
    blocks.append(Block(tuple(current)))

    return Page(index, width, height, unit, tuple(blocks))


def scan_to_document(
    words: Sequence[Word],
    width: float,
    height: float,
    *,
    doc_id: str,
    source_path: str,
    engine_name: str,
) -> DocumentRecord:
    page = assemble_page(words, width, height)
    return DocumentRecord(
        doc_id=doc_id,
        source_path=source_path,
        provenance="scanned",
        engine_name=engine_name,
        pages=(page,),
    )


# --- per-file routing -----------------------------------------------------------


@dataclass(frozen=True)
class FileOutcome:
    path: str
    status: str
    doc: DocumentRecord | None = None
    error: str | None = None
    skew_angle: float | None = None
    elapsed_ms: float | None = None


def _sidecar_words(path: Path) -> list[Word]:
    sidecar = path.with_suffix("").with_suffix(".words.json")
    if not sidecar.exists():
        # Mock engines transcribe ground truth; without it there is nothing
        # to transcribe and recognize() raises MissingGroundTruth.
        return []
    return words_from_json(sidecar.read_bytes())


def process_image(
    path: Path,
    engine: EngineSpec | None,
    *,
    run_deskew: bool = True,
    run_denoise: bool = True,
) -> FileOutcome:
    if engine is None:
        raise ConfigError("an engine must be configured to read scanned images")
    image = read_image(path)
    pre = preprocess_scan(image, run_deskew=run_deskew, run_denoise=run_denoise)
    gold = _sidecar_words(path) or None
    result = recognize(engine, pre.binary, gold_words=gold)
    doc = scan_to_document(
        result.words,
        float(pre.binary.width),
        float(pre.binary.height),
        doc_id=path.stem,
        source_path=path.name,
        engine_name=result.engine_name,
    )
    return FileOutcome(
        str(path),
        STATUS_OK,
        doc=doc,
        skew_angle=pre.skew_angle,
        elapsed_ms=result.elapsed_ms,
    )


def process_file(
    path: str | Path,
    engine: EngineSpec | None = None,
    *,
    run_deskew: bool = True,
    run_denoise: bool = True,
) -> FileOutcome:
    """Route one input file; returns an outcome instead of raising for
    per-file problems so batch runs keep going. Configuration problems
    (no engine for an image) still raise ConfigError."""
    path = Path(path)
    suffix = path.suffix.lower()
    try:
        if suffix in IMAGE_SUFFIXES:
            return process_image(
                path, engine, run_deskew=run_deskew, run_denoise=run_denoise
            )
        if suffix == PDF_SUFFIX:
            try:
                doc = extract_pdf_document(path.read_bytes(), doc_id=path.stem, source_path=path.name)
            except UnsupportedFeature as exc:
                if exc.feature == "no text ops found":
                    return FileOutcome(str(path), STATUS_NEEDS_SCAN, error=str(exc))
                raise
            return FileOutcome(str(path), STATUS_OK, doc=doc)
        if suffix == DOCX_SUFFIX:
            doc = extract_docx_document(path.read_bytes(), doc_id=path.stem, source_path=path.name)
            return FileOutcome(str(path), STATUS_OK, doc=doc)
        return FileOutcome(
            str(path), STATUS_FAILED, error=f"unsupported file type {suffix!r}"
        )
    except ConfigError:
        raise
    except (DocmillError, OSError) as exc:
        return FileOutcome(str(path), STATUS_FAILED, error=f"{type(exc).__name__}: {exc}")
