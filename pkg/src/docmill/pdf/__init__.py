"""Digital PDF text extraction: object layer, content interpreter, layout.

The top-level extract_pdf_document() goes from bytes to a DocumentRecord with
provenance "digital" and confidence 1.0 everywhere. A PDF whose pages contain
no text-show operators raises UnsupportedFeature("no text ops found") so the
caller can route the file to the scanned path instead of pretending.
"""

from __future__ import annotations

from typing import Any

from ..errors import UnsupportedFeature, XrefBroken
from ..model import DocumentRecord, Page
from .content import (
    ContentToken,
    FontTable,
    GlyphRun,
    count_show_operators,
    interpret_text,
    tokenize_content,
)
from .layout import reconstruct_layout
from .objects import PdfName, PdfObjectTable, PdfRef, PdfStream, parse_pdf
from .writer import generate_pdf

__all__ = [
    "ContentToken",
    "FontTable",
    "GlyphRun",
    "PdfName",
    "PdfObjectTable",
    "PdfRef",
    "PdfStream",
    "count_show_operators",
    "extract_pdf_document",
    "generate_pdf",
    "interpret_text",
    "parse_pdf",
    "pdf_debug_info",
    "reconstruct_layout",
    "tokenize_content",
]

_INHERITABLE = ("Resources", "MediaBox")


def _walk_pages(table: PdfObjectTable, node: dict, inherited: dict, out: list[dict]) -> None:
    node_type = table.resolve(node.get("Type"))
    attrs = dict(inherited)
    for key in _INHERITABLE:
        if node.get(key) is not None:
            attrs[key] = table.resolve(node[key])
    if node_type == "Page":
        page = dict(node)
        for key, value in attrs.items():
            page.setdefault(key, value)
        out.append(page)
        return
    kids = table.resolve(node.get("Kids"))
    if not isinstance(kids, list):
        raise XrefBroken("page tree node has no /Kids")
    for kid in kids:
        child = table.resolve(kid)
        if not isinstance(child, dict):
            raise XrefBroken("page tree kid is not a dictionary")
        _walk_pages(table, child, attrs, out)


def _font_table(table: PdfObjectTable, font_dict: Any) -> FontTable:
    font_dict = table.resolve(font_dict)
    if not isinstance(font_dict, dict):
        return FontTable()
    widths = table.resolve(font_dict.get("Widths"))
    first_char = table.resolve(font_dict.get("FirstChar"))
    if isinstance(widths, list) and isinstance(first_char, int):
        resolved = tuple(float(table.resolve(w)) for w in widths)
        return FontTable(widths=resolved, first_char=first_char)
    return FontTable()  # no metrics: every glyph defaults to 500/1000 em


def _page_fonts(table: PdfObjectTable, page: dict) -> dict[str, FontTable]:
    resources = table.resolve(page.get("Resources"))
    if not isinstance(resources, dict):
        return {}
    fonts = table.resolve(resources.get("Font"))
    if not isinstance(fonts, dict):
        return {}
    return {str(name): _font_table(table, obj) for name, obj in fonts.items()}


def _page_content_bytes(table: PdfObjectTable, page: dict) -> bytes:
    contents = table.resolve(page.get("Contents"))
    if contents is None:
        return b""
    if isinstance(contents, PdfStream):
        return table.stream_data(contents)
    if isinstance(contents, list):
        parts = []
        for item in contents:
            stream = table.resolve(item)
            if not isinstance(stream, PdfStream):
                raise XrefBroken("/Contents array holds a non-stream")
            parts.append(table.stream_data(stream))
        return b"\n".join(parts)
    raise XrefBroken("/Contents is neither a stream nor an array")


def _media_box(table: PdfObjectTable, page: dict) -> tuple[float, float, float, float]:
    box = table.resolve(page.get("MediaBox"))
    if not isinstance(box, list) or len(box) != 4:
        raise XrefBroken("page has no usable /MediaBox")
    x0, y0, x1, y1 = (float(table.resolve(v)) for v in box)
    return x0, y0, x1, y1


def extract_pdf_document(data: bytes, doc_id: str, source_path: str) -> DocumentRecord:
    """Parse, interpret, and lay out a digital PDF into a DocumentRecord."""
    table = parse_pdf(data)
    pages_raw: list[dict] = []
    pages_node = table.resolve(table.catalog.get("Pages"))
    if not isinstance(pages_node, dict):
        raise XrefBroken("catalog /Pages does not resolve to a dictionary")
    _walk_pages(table, pages_node, {}, pages_raw)

    pages: list[Page] = []
    total_shows = 0
    for index, page_dict in enumerate(pages_raw):
        x0, y0, x1, y1 = _media_box(table, page_dict)
        width, height = x1 - x0, y1 - y0
        tokens = tokenize_content(_page_content_bytes(table, page_dict))
        total_shows += count_show_operators(tokens)
        runs = interpret_text(tokens, _page_fonts(table, page_dict))
        if x0 or y0:
            runs = [
                GlyphRun(r.text, r.origin_x - x0, r.origin_y - y0, r.font_size, r.advance_width)
                for r in runs
            ]
        pages.append(reconstruct_layout(runs, width, height, index))

    if total_shows == 0:
        raise UnsupportedFeature("no text ops found")

    return DocumentRecord(
        doc_id=doc_id,
        source_path=source_path,
        provenance="digital",
        engine_name=None,
        pages=tuple(pages),
    )


def pdf_debug_info(data: bytes) -> dict:
    """Object table and glyph runs as plain JSON-ready data (debug dumps)."""

    def simplify(obj: Any) -> Any:
        if isinstance(obj, PdfStream):
            return {"stream_dict": simplify(obj.dict), "raw_length": len(obj.raw)}
        if isinstance(obj, PdfRef):
            return f"{obj.num} {obj.gen} R"
        if isinstance(obj, PdfName):
            return f"/{obj}"
        if isinstance(obj, dict):
            return {str(k): simplify(v) for k, v in obj.items()}
        if isinstance(obj, list):
            return [simplify(v) for v in obj]
        return obj

    table = parse_pdf(data)
    pages_raw: list[dict] = []
    pages_node = table.resolve(table.catalog.get("Pages"))
    if isinstance(pages_node, dict):
        _walk_pages(table, pages_node, {}, pages_raw)

    runs_out = []
    for index, page_dict in enumerate(pages_raw):
        tokens = tokenize_content(_page_content_bytes(table, page_dict))
        for run in interpret_text(tokens, _page_fonts(table, page_dict)):
            runs_out.append(
                {
                    "page": index,
                    "text": run.text,
                    "origin_x": run.origin_x,
                    "origin_y": run.origin_y,
                    "font_size": run.font_size,
                    "advance_width": run.advance_width,
                }
            )

    return {
        "trailer": simplify(table.trailer),
        "objects": {str(num): simplify(obj) for num, obj in sorted(table.objects.items())},
        "glyph_runs": runs_out,
    }
