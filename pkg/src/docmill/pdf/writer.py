"""Minimal deterministic PDF writer for synthetic digital documents.

Emits classic xref tables, one Type1 Helvetica-style font with explicit
uniform /Widths (500 each, so extraction math has no hidden metrics), and one
content stream per page built from Td/TL/T* line advances. Content streams are
raw or FlateDecode per the ``compress`` flag. Output bytes are a pure function
of the inputs: no timestamps, no ids.
"""

from __future__ import annotations

import zlib
from typing import Sequence

from ..errors import UnsupportedCharacter

PAGE_WIDTH = 612.0
PAGE_HEIGHT = 792.0
MARGIN = 72.0
LEADING_FACTOR = 1.2
GLYPH_WIDTH = 500  # thousandths of an em, every glyph

PRINTABLE_MIN = 0x20
PRINTABLE_MAX = 0x7E


def _check_text(lines: Sequence[str]) -> None:
    for line in lines:
        for ch in line:
            code = ord(ch)
            if code < PRINTABLE_MIN or code > PRINTABLE_MAX:
                raise UnsupportedCharacter(ch)


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("(", "\\(").replace(")", "\\)")


def _num(x: float) -> str:
    if x == int(x):
        return str(int(x))
    return f"{x:.4f}".rstrip("0").rstrip(".")


def max_lines_per_page(font_size: float) -> int:
    usable = PAGE_HEIGHT - 2 * MARGIN
    return int(usable / (LEADING_FACTOR * font_size)) + 1


def _page_content(lines: Sequence[str], font_size: float) -> bytes:
    leading = LEADING_FACTOR * font_size
    top_baseline = PAGE_HEIGHT - MARGIN
    parts = [
        "BT",
        f"/F1 {_num(font_size)} Tf",
        f"{_num(leading)} TL",
        f"{_num(MARGIN)} {_num(top_baseline)} Td",
    ]
    for i, line in enumerate(lines):
        if i > 0:
            parts.append("T*")
        parts.append(f"({_escape(line)}) Tj")
    parts.append("ET")
    return "\n".join(parts).encode("latin-1")


def generate_pdf(
    pages: Sequence[Sequence[str]], font_size: float = 12.0, compress: bool = False
) -> bytes:
    """Build a PDF with the given lines per page.

    Characters outside the printable WinAnsi/ASCII range 0x20-0x7E raise
    UnsupportedCharacter; pages with more lines than fit inside the margins
    raise ValueError.
    """
    if not pages:
        raise ValueError("at least one page required")
    if font_size <= 0:
        raise ValueError("font size must be positive")
    capacity = max_lines_per_page(font_size)
    for i, lines in enumerate(pages):
        _check_text(lines)
        if len(lines) > capacity:
            raise ValueError(
                f"page {i}: {len(lines)} lines exceed capacity {capacity} at size {font_size}"
            )

    n_pages = len(pages)
    font_obj = 3
    first_page_obj = 4
    # object numbering: 1 catalog, 2 pages root, 3 font, then (page, content) pairs
    page_obj = lambda i: first_page_obj + 2 * i  # noqa: E731
    content_obj = lambda i: first_page_obj + 2 * i + 1  # noqa: E731
    total_objects = 3 + 2 * n_pages

    widths = " ".join(str(GLYPH_WIDTH) for _ in range(PRINTABLE_MIN, PRINTABLE_MAX + 1))
    kids = " ".join(f"{page_obj(i)} 0 R" for i in range(n_pages))

    bodies: dict[int, bytes] = {
        1: b"<< /Type /Catalog /Pages 2 0 R >>",
        2: f"<< /Type /Pages /Kids [{kids}] /Count {n_pages} >>".encode("latin-1"),
        font_obj: (
            f"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica"
            f" /FirstChar {PRINTABLE_MIN} /LastChar {PRINTABLE_MAX}"
            f" /Widths [{widths}] /Encoding /WinAnsiEncoding >>"
        ).encode("latin-1"),
    }
    for i, lines in enumerate(pages):
        bodies[page_obj(i)] = (
            f"<< /Type /Page /Parent 2 0 R /MediaBox [0 0 {_num(PAGE_WIDTH)} {_num(PAGE_HEIGHT)}]"
            f" /Resources << /Font << /F1 {font_obj} 0 R >> >>"
            f" /Contents {content_obj(i)} 0 R >>"
        ).encode("latin-1")
        raw = _page_content(lines, font_size)
        if compress:
            data = zlib.compress(raw)
            bodies[content_obj(i)] = (
                f"<< /Length {len(data)} /Filter /FlateDecode >>\nstream\n".encode("latin-1")
                + data
                + b"\nendstream"
            )
        else:
            bodies[content_obj(i)] = (
                f"<< /Length {len(raw)} >>\nstream\n".encode("latin-1") + raw + b"\nendstream"
            )

    out = bytearray()
    out += b"%PDF-1.4\n%\xe2\xe3\xcf\xd3\n"
    offsets: dict[int, int] = {}
    for num in range(1, total_objects + 1):
        offsets[num] = len(out)
        out += f"{num} 0 obj\n".encode("latin-1")
        out += bodies[num]
        out += b"\nendobj\n"

    xref_offset = len(out)
    out += b"xref\n"
    out += f"0 {total_objects + 1}\n".encode("latin-1")
    out += b"0000000000 65535 f \n"
    for num in range(1, total_objects + 1):
        out += f"{offsets[num]:010d} 00000 n \n".encode("latin-1")
    out += b"trailer\n"
    out += f"<< /Size {total_objects + 1} /Root 1 0 R >>\n".encode("latin-1")
    out += b"startxref\n"
    out += f"{xref_offset}\n".encode("latin-1")
    out += b"%%EOF\n"
    return bytes(out)
