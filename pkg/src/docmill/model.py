"""Unified document model shared by the scanned and digital paths.

Values are immutable after construction; every pipeline stage returns new
values. Geometry uses a top-left origin with y growing downward regardless of
where the bytes came from. Serialization is canonical: sorted keys, minimal
whitespace, UTF-8, so value-equal documents produce byte-equal JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .errors import InvariantViolation, MalformedJson, SchemaViolation

PIPELINE_VERSION = "0.1.0"

UNITS = ("pixel", "point")
PROVENANCES = ("scanned", "digital")
BLOCK_KINDS = ("paragraph", "table", "header", "unknown")


def _as_float(value: Any, what: str) -> float:
    # bool is an int subclass; a confidence of True is a bug, not a number
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvariantViolation(f"{what} must be a number, got {type(value).__name__}")
    return float(value)


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box, top-left origin, y down. x1/y1 are exclusive edges."""

    x0: float
    y0: float
    x1: float
    y1: float
    unit: str = "pixel"

    def __post_init__(self):
        object.__setattr__(self, "x0", _as_float(self.x0, "x0"))
        object.__setattr__(self, "y0", _as_float(self.y0, "y0"))
        object.__setattr__(self, "x1", _as_float(self.x1, "x1"))
        object.__setattr__(self, "y1", _as_float(self.y1, "y1"))
        if self.unit not in UNITS:
            raise InvariantViolation(f"unknown unit {self.unit!r}")
        if self.x0 < 0 or self.y0 < 0:
            raise InvariantViolation("bounding box coordinates must be non-negative")
        if self.x1 < self.x0 or self.y1 < self.y0:
            raise InvariantViolation("bounding box must have x1 >= x0 and y1 >= y0")

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0


@dataclass(frozen=True)
class Word:
    text: str
    bbox: BoundingBox
    confidence: float = 1.0

    def __post_init__(self):
        if not isinstance(self.text, str) or not self.text:
            raise InvariantViolation("word text must be a non-empty string")
        if "\n" in self.text or "\r" in self.text:
            raise InvariantViolation("word text must not contain line breaks")
        object.__setattr__(self, "confidence", _as_float(self.confidence, "confidence"))
        if not (0.0 <= self.confidence <= 1.0):
            raise InvariantViolation(f"confidence {self.confidence} outside [0, 1]")
        if not isinstance(self.bbox, BoundingBox):
            raise InvariantViolation("bbox must be a BoundingBox")


@dataclass(frozen=True)
class Line:
    """One text line; words are kept in reading order (x0, then x1)."""

    words: tuple[Word, ...]
    baseline_y: float

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "baseline_y", _as_float(self.baseline_y, "baseline_y"))
        keys = [(w.bbox.x0, w.bbox.x1) for w in self.words]
        if keys != sorted(keys):
            raise InvariantViolation("line words must be sorted by (x0, x1)")

    @classmethod
    def from_words(cls, words: Iterable[Word], baseline_y: float) -> "Line":
        """Build a line, sorting the words into reading order first."""
        return cls(tuple(sort_words(words)), baseline_y)

    @property
    def text(self) -> str:
        return " ".join(w.text for w in self.words)


@dataclass(frozen=True)
class Block:
    lines: tuple[Line, ...]
    kind: str = "paragraph"

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        if self.kind not in BLOCK_KINDS:
            raise InvariantViolation(f"unknown block kind {self.kind!r}")

    @property
    def text(self) -> str:
        return "\n".join(line.text for line in self.lines)


@dataclass(frozen=True)
class Page:
    index: int
    width: float
    height: float
    unit: str
    blocks: tuple[Block, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if isinstance(self.index, bool) or not isinstance(self.index, int):
            raise InvariantViolation("page index must be an integer")
        if self.index < 0:
            raise InvariantViolation("page index must be >= 0")
        object.__setattr__(self, "width", _as_float(self.width, "width"))
        object.__setattr__(self, "height", _as_float(self.height, "height"))
        if self.width <= 0 or self.height <= 0:
            raise InvariantViolation("page extents must be positive")
        if self.unit not in UNITS:
            raise InvariantViolation(f"unknown unit {self.unit!r}")
        object.__setattr__(self, "blocks", tuple(self.blocks))
        for block in self.blocks:
            for line in block.lines:
                for word in line.words:
                    box = word.bbox
                    if box.unit != self.unit:
                        raise InvariantViolation(
                            f"bbox unit {box.unit!r} differs from page unit {self.unit!r}"
                        )
                    if box.x1 > self.width or box.y1 > self.height:
                        raise InvariantViolation(
                            f"bbox ({box.x0}, {box.y0}, {box.x1}, {box.y1}) "
                            f"exceeds page extent {self.width} x {self.height}"
                        )

    @property
    def words(self) -> list[Word]:
        return [w for b in self.blocks for ln in b.lines for w in ln.words]


@dataclass(frozen=True)
class DocumentRecord:
    doc_id: str
    source_path: str
    provenance: str
    engine_name: str | None
    pages: tuple[Page, ...]
    pipeline_version: str = PIPELINE_VERSION

    def __post_init__(self):
        if not isinstance(self.doc_id, str) or not self.doc_id:
            raise InvariantViolation("doc_id must be a non-empty string")
        if self.provenance not in PROVENANCES:
            raise InvariantViolation(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "pages", tuple(self.pages))
        indices = [p.index for p in self.pages]
        if indices != list(range(len(indices))):
            raise InvariantViolation("page indices must be contiguous from 0")
        if self.provenance == "digital":
            for page in self.pages:
                for word in page.words:
                    if word.confidence != 1.0:
                        raise InvariantViolation(
                            "digital documents must carry confidence 1.0 on every word"
                        )


def sort_words(words: Iterable[Word]) -> list[Word]:
    """Reading order within a line: ascending x0, ties by x1."""
    return sorted(words, key=lambda w: (w.bbox.x0, w.bbox.x1))


def flatten_text(doc: DocumentRecord) -> str:
    """Plain-text projection: words joined by single spaces, lines by newline,
    blocks by blank line; pages in index order, also separated by a blank line."""
    page_texts = []
    for page in sorted(doc.pages, key=lambda p: p.index):
        page_texts.append("\n\n".join(b.text for b in page.blocks))
    return "\n\n".join(page_texts)


# --- canonical JSON ----------------------------------------------------------


def _bbox_dict(b: BoundingBox) -> dict:
    return {"x0": b.x0, "y0": b.y0, "x1": b.x1, "y1": b.y1, "unit": b.unit}


def word_to_dict(w: Word) -> dict:
    return {"text": w.text, "bbox": _bbox_dict(w.bbox), "confidence": w.confidence}


def document_to_dict(doc: DocumentRecord) -> dict:
    return {
        "doc_id": doc.doc_id,
        "source_path": doc.source_path,
        "provenance": doc.provenance,
        "engine_name": doc.engine_name,
        "pipeline_version": doc.pipeline_version,
        "pages": [
            {
                "index": p.index,
                "width": p.width,
                "height": p.height,
                "unit": p.unit,
                "blocks": [
                    {
                        "kind": b.kind,
                        "lines": [
                            {
                                "baseline_y": ln.baseline_y,
                                "words": [word_to_dict(w) for w in ln.words],
                            }
                            for ln in b.lines
                        ],
                    }
                    for b in p.blocks
                ],
            }
            for p in doc.pages
        ],
    }


def canonical_json(obj: Any) -> bytes:
    """Sorted keys, no insignificant whitespace, UTF-8."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode(
        "utf-8"
    )


def serialize_document(doc: DocumentRecord) -> bytes:
    return canonical_json(document_to_dict(doc))


class _Walker:
    """Typed access into parsed JSON with path-qualified errors."""

    @staticmethod
    def dict(value: Any, path: str, keys: set[str]) -> dict:
        if not isinstance(value, dict):
            raise SchemaViolation(path, f"expected object, got {type(value).__name__}")
        extra = set(value) - keys
        if extra:
            raise SchemaViolation(path, f"unknown keys: {', '.join(sorted(extra))}")
        missing = keys - set(value)
        if missing:
            raise SchemaViolation(path, f"missing keys: {', '.join(sorted(missing))}")
        return value

    @staticmethod
    def list(value: Any, path: str) -> list:
        if not isinstance(value, list):
            raise SchemaViolation(path, f"expected array, got {type(value).__name__}")
        return value

    @staticmethod
    def str(value: Any, path: str) -> str:
        if not isinstance(value, str):
            raise SchemaViolation(path, f"expected string, got {type(value).__name__}")
        return value

    @staticmethod
    def number(value: Any, path: str) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaViolation(path, f"expected number, got {type(value).__name__}")
        return float(value)

    @staticmethod
    def int(value: Any, path: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaViolation(path, f"expected integer, got {type(value).__name__}")
        return value


def _parse_bbox(value: Any, path: str) -> BoundingBox:
    d = _Walker.dict(value, path, {"x0", "y0", "x1", "y1", "unit"})
    return BoundingBox(
        _Walker.number(d["x0"], f"{path}.x0"),
        _Walker.number(d["y0"], f"{path}.y0"),
        _Walker.number(d["x1"], f"{path}.x1"),
        _Walker.number(d["y1"], f"{path}.y1"),
        _Walker.str(d["unit"], f"{path}.unit"),
    )


def _parse_word(value: Any, path: str) -> Word:
    d = _Walker.dict(value, path, {"text", "bbox", "confidence"})
    return Word(
        _Walker.str(d["text"], f"{path}.text"),
        _parse_bbox(d["bbox"], f"{path}.bbox"),
        _Walker.number(d["confidence"], f"{path}.confidence"),
    )


def parse_document(data: bytes | str) -> DocumentRecord:
    """Inverse of serialize_document. Raises MalformedJson for bad bytes,
    SchemaViolation (with path) for shape problems, InvariantViolation for
    semantic ones."""
    try:
        raw = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedJson(str(exc)) from exc

    top = _Walker.dict(
        raw,
        "$",
        {"doc_id", "source_path", "provenance", "engine_name", "pipeline_version", "pages"},
    )
    engine_name = top["engine_name"]
    if engine_name is not None and not isinstance(engine_name, str):
        raise SchemaViolation("$.engine_name", "expected string or null")

    pages = []
    for i, page_raw in enumerate(_Walker.list(top["pages"], "$.pages")):
        ppath = f"$.pages[{i}]"
        pd = _Walker.dict(page_raw, ppath, {"index", "width", "height", "unit", "blocks"})
        blocks = []
        for j, block_raw in enumerate(_Walker.list(pd["blocks"], f"{ppath}.blocks")):
            bpath = f"{ppath}.blocks[{j}]"
            bd = _Walker.dict(block_raw, bpath, {"kind", "lines"})
            lines = []
            for k, line_raw in enumerate(_Walker.list(bd["lines"], f"{bpath}.lines")):
                lpath = f"{bpath}.lines[{k}]"
                ld = _Walker.dict(line_raw, lpath, {"baseline_y", "words"})
                words = [
                    _parse_word(w, f"{lpath}.words[{m}]")
                    for m, w in enumerate(_Walker.list(ld["words"], f"{lpath}.words"))
                ]
                lines.append(Line(tuple(words), _Walker.number(ld["baseline_y"], f"{lpath}.baseline_y")))
            blocks.append(Block(tuple(lines), _Walker.str(bd["kind"], f"{bpath}.kind")))
        pages.append(
            Page(
                _Walker.int(pd["index"], f"{ppath}.index"),
                _Walker.number(pd["width"], f"{ppath}.width"),
                _Walker.number(pd["height"], f"{ppath}.height"),
                _Walker.str(pd["unit"], f"{ppath}.unit"),
                tuple(blocks),
            )
        )

    return DocumentRecord(
        doc_id=_Walker.str(top["doc_id"], "$.doc_id"),
        source_path=_Walker.str(top["source_path"], "$.source_path"),
        provenance=_Walker.str(top["provenance"], "$.provenance"),
        engine_name=engine_name,
        pages=tuple(pages),
        pipeline_version=_Walker.str(top["pipeline_version"], "$.pipeline_version"),
    )


# --- word list sidecars ------------------------------------------------------


def words_to_json(words: Sequence[Word]) -> bytes:
    """Canonical JSON for a bare word list (ground-truth sidecars)."""
    return canonical_json([word_to_dict(w) for w in words])


def words_from_json(data: bytes | str) -> list[Word]:
    try:
        raw = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedJson(str(exc)) from exc
    items = _Walker.list(raw, "$")
    return [_parse_word(w, f"$[{i}]") for i, w in enumerate(items)]


# --- synthetic layout --------------------------------------------------------


def synthetic_document(
    paragraphs: Sequence[str],
    doc_id: str,
    source_path: str,
    *,
    font_size: float = 12.0,
) -> DocumentRecord:
    """Build a digital document from bare paragraph strings.

    Used for formats that carry no geometry (DOCX). Lays words out on a
    nominal grid: fixed-pitch glyphs 0.6 em wide, 1.2 em leading, one line per
    paragraph; the page grows to fit so every box stays inside it.
    """
    char_w = 0.6 * font_size
    leading = 1.2 * font_size
    margin = 2.0 * font_size

    blocks: list[Block] = []
    y = margin
    max_right = 0.0
    for para in paragraphs:
        tokens = para.split()
        words = []
        x = margin
        baseline = y + font_size
        for tok in tokens:
            w = len(tok) * char_w
            words.append(
                Word(
                    tok,
                    BoundingBox(x, baseline - font_size, x + w, baseline + 0.2 * font_size, "point"),
                    1.0,
                )
            )
            x += w + char_w
        max_right = max(max_right, x)
        lines = (Line(tuple(words), baseline),) if tokens else ()
        blocks.append(Block(lines, "paragraph"))
        y += leading

    width = max(max_right + margin, 8.5 * 72)
    height = max(y + margin + font_size, 11 * 72)
    page = Page(0, width, height, "point", tuple(blocks))
    return DocumentRecord(
        doc_id=doc_id,
        source_path=source_path,
        provenance="digital",
        engine_name=None,
        pages=(page,),
    )
