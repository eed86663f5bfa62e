"""Classic-PDF object layer: header, xref table chains, object grammar,
stream filters.

Supported subset: classic xref tables (with /Prev chains), uncompressed and
FlateDecode streams. Cross-reference streams, object streams, and encryption
fail loudly as UnsupportedFeature; structural damage fails as XrefBroken.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Any

from ..errors import (
    FilterUnsupported,
    NotAPdf,
    UnsupportedFeature,
    XrefBroken,
)
from ._lex import (
    looks_like_number,
    parse_number,
    read_hex_string,
    read_literal_string,
    read_regular_run,
    skip_ws,
)


class PdfName(str):
    """A /Name. Subclasses str so dict keys stay ergonomic."""

    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover - debugging nicety
        return f"/{str(self)}"


@dataclass(frozen=True)
class PdfRef:
    num: int
    gen: int


@dataclass(frozen=True)
class PdfStream:
    dict: dict
    raw: bytes


class PdfObjectTable:
    """All indirect objects of a document, keyed by object number."""

    def __init__(self, data: bytes):
        self._data = data
        self.entries: dict[int, tuple[int, int]] = {}  # num -> (offset, gen)
        self.trailer: dict = {}
        self.objects: dict[int, Any] = {}

    # -- access -----------------------------------------------------------

    def get(self, num: int, gen: int | None = None) -> Any:
        if num not in self.objects:
            raise XrefBroken(f"unresolved reference {num} {gen if gen is not None else 0} R")
        if gen is not None and self.entries[num][1] != gen:
            raise XrefBroken(
                f"reference {num} {gen} R does not match generation {self.entries[num][1]}"
            )
        return self.objects[num]

    def resolve(self, obj: Any, _depth: int = 0) -> Any:
        """Dereference (possibly chained) indirect references."""
        while isinstance(obj, PdfRef):
            if _depth > 32:
                raise XrefBroken("reference chain too deep")
            obj = self.get(obj.num, obj.gen)
            _depth += 1
        return obj

    @property
    def catalog(self) -> dict:
        root = self.resolve(self.trailer["Root"])
        if not isinstance(root, dict):
            raise XrefBroken("/Root does not resolve to a dictionary")
        return root

    def stream_data(self, stream: PdfStream) -> bytes:
        """Decode a stream body. Only no-filter and FlateDecode are supported."""
        filt = self.resolve(stream.dict.get("Filter"))
        if stream.dict.get("DecodeParms") is not None:
            raise FilterUnsupported("DecodeParms (predictors) not supported")
        if filt is None:
            return stream.raw
        if isinstance(filt, list):
            if len(filt) != 1:
                raise FilterUnsupported(f"filter chain {filt!r}")
            filt = self.resolve(filt[0])
        if filt == "FlateDecode":
            try:
                return zlib.decompress(stream.raw)
            except zlib.error as exc:
                raise XrefBroken(f"FlateDecode failed: {exc}") from exc
        raise FilterUnsupported(str(filt))


def parse_pdf(data: bytes) -> PdfObjectTable:
    """Parse the whole document structure eagerly.

    Every xref entry is loaded and every reference checked, so a table that
    parses is internally consistent. The trailer must carry /Root.
    """
    if not data.startswith(b"%PDF-1."):
        raise NotAPdf("missing %PDF-1.x header")

    table = PdfObjectTable(data)
    start = _find_startxref(data)
    _parse_xref_chain(table, start)

    if "Root" not in table.trailer:
        raise XrefBroken("trailer has no /Root")
    if table.trailer.get("Encrypt") is not None:
        raise UnsupportedFeature("encryption")

    for num in sorted(table.entries):
        _load_object(table, num, set())

    for num, obj in table.objects.items():
        if isinstance(obj, PdfStream):
            if table.resolve(obj.dict.get("Type")) == "ObjStm":
                raise UnsupportedFeature("object streams")
        _check_refs(table, obj, f"object {num}")
    _check_refs(table, table.trailer, "trailer")

    # force catalog resolution so a dangling /Root fails here, not later
    table.catalog
    return table


# --- xref chain ---------------------------------------------------------------


def _find_startxref(data: bytes) -> int:
    idx = data.rfind(b"startxref")
    if idx < 0:
        raise XrefBroken("startxref not found")
    pos = skip_ws(data, idx + len(b"startxref"))
    run, _ = read_regular_run(data, pos)
    if not run.isdigit():
        raise XrefBroken(f"startxref offset malformed at byte {pos}")
    return int(run)


def _parse_xref_chain(table: PdfObjectTable, offset: int) -> None:
    seen: set[int] = set()
    newest = True
    while True:
        if offset in seen:
            raise XrefBroken("xref /Prev chain loops")
        seen.add(offset)
        trailer = _parse_xref_section(table, offset)
        if newest:
            table.trailer = trailer
            newest = False
        if trailer.get("XRefStm") is not None:
            raise UnsupportedFeature("xref streams")
        prev = trailer.get("Prev")
        if prev is None:
            return
        if not isinstance(prev, int):
            raise XrefBroken("/Prev is not an integer")
        offset = prev


def _parse_xref_section(table: PdfObjectTable, offset: int) -> dict:
    data = table._data
    if offset < 0 or offset >= len(data):
        raise XrefBroken(f"xref offset {offset} outside file")
    pos = skip_ws(data, offset)
    run, after = read_regular_run(data, pos)
    if run != b"xref":
        # a cross-reference *stream* starts with "N G obj" at this offset
        if run.isdigit():
            sniff = _sniff_object_dict(data, pos)
            if sniff is not None and sniff.get("Type") == "XRef":
                raise UnsupportedFeature("xref streams")
        raise XrefBroken(f"expected xref table at byte {offset}")
    pos = after

    while True:
        pos = skip_ws(data, pos)
        run, after = read_regular_run(data, pos)
        if run == b"trailer":
            pos = after
            break
        if not run.isdigit():
            raise XrefBroken(f"malformed xref subsection header at byte {pos}")
        first = int(run)
        pos = skip_ws(data, after)
        run, pos = read_regular_run(data, pos)
        if not run.isdigit():
            raise XrefBroken(f"malformed xref subsection header at byte {pos}")
        count = int(run)
        for i in range(count):
            pos = skip_ws(data, pos)
            off_run, pos = read_regular_run(data, pos)
            pos = skip_ws(data, pos)
            gen_run, pos = read_regular_run(data, pos)
            pos = skip_ws(data, pos)
            flag_run, pos = read_regular_run(data, pos)
            if not off_run.isdigit() or not gen_run.isdigit() or flag_run not in (b"n", b"f"):
                raise XrefBroken(f"malformed xref entry for object {first + i}")
            num = first + i
            if flag_run == b"n" and num not in table.entries:
                table.entries[num] = (int(off_run), int(gen_run))

    pos = skip_ws(data, pos)
    trailer, _ = _parse_value(data, pos)
    if not isinstance(trailer, dict):
        raise XrefBroken("trailer is not a dictionary")
    return trailer


def _sniff_object_dict(data: bytes, pos: int) -> dict | None:
    """Best-effort peek at 'N G obj <<...>>' without reading any stream body."""
    try:
        _, pos = read_regular_run(data, pos)
        pos = skip_ws(data, pos)
        _, pos = read_regular_run(data, pos)
        pos = skip_ws(data, pos)
        kw, pos = read_regular_run(data, pos)
        if kw != b"obj":
            return None
        pos = skip_ws(data, pos)
        value, _ = _parse_value(data, pos)
        return value if isinstance(value, dict) else None
    except Exception:
        return None


# --- object loading -------------------------------------------------------------


def _load_object(table: PdfObjectTable, num: int, loading: set[int]) -> Any:
    if num in table.objects:
        return table.objects[num]
    if num in loading:
        raise XrefBroken(f"object {num} participates in a /Length reference cycle")
    if num not in table.entries:
        raise XrefBroken(f"unresolved reference {num} 0 R")
    loading.add(num)

    data = table._data
    offset, gen = table.entries[num]
    if offset < 0 or offset >= len(data):
        raise XrefBroken(f"object {num}: offset {offset} outside file")
    pos = skip_ws(data, offset)
    num_run, pos = read_regular_run(data, pos)
    pos = skip_ws(data, pos)
    gen_run, pos = read_regular_run(data, pos)
    pos = skip_ws(data, pos)
    kw, pos = read_regular_run(data, pos)
    if not num_run.isdigit() or not gen_run.isdigit() or kw != b"obj":
        raise XrefBroken(f"object {num}: malformed object header at byte {offset}")
    if int(num_run) != num:
        raise XrefBroken(
            f"object {num}: header says {int(num_run)} (xref table points at the wrong place)"
        )

    value, pos = _parse_value(data, pos)

    pos = skip_ws(data, pos)
    kw, after = read_regular_run(data, pos)
    if kw == b"stream":
        if not isinstance(value, dict):
            raise XrefBroken(f"object {num}: stream without a dictionary")
        pos = after
        if data[pos : pos + 2] == b"\r\n":
            pos += 2
        elif data[pos : pos + 1] == b"\n":
            pos += 1
        else:
            raise XrefBroken(f"object {num}: stream keyword not followed by EOL")
        length = value.get("Length")
        if isinstance(length, PdfRef):
            length = _load_object(table, length.num, loading)
        if not isinstance(length, int) or length < 0:
            raise XrefBroken(f"object {num}: bad /Length")
        raw = data[pos : pos + length]
        if len(raw) != length:
            raise XrefBroken(f"object {num}: stream truncated")
        pos += length
        pos = skip_ws(data, pos)
        kw, after = read_regular_run(data, pos)
        if kw != b"endstream":
            raise XrefBroken(f"object {num}: endstream not found where /Length points")
        pos = after
        value = PdfStream(value, raw)
        pos = skip_ws(data, pos)
        kw, after = read_regular_run(data, pos)

    if kw != b"endobj":
        raise XrefBroken(f"object {num}: endobj not found")

    loading.discard(num)
    table.objects[num] = value
    return value


def _parse_value(data: bytes, pos: int) -> tuple[Any, int]:
    pos = skip_ws(data, pos)
    if pos >= len(data):
        raise XrefBroken("unexpected end of file inside object")
    b = data[pos]

    if data.startswith(b"<<", pos):
        return _parse_dict(data, pos)
    if b == ord("<"):
        text, pos = read_hex_string(data, pos)
        return text, pos
    if b == ord("("):
        text, pos = read_literal_string(data, pos)
        return text, pos
    if b == ord("/"):
        run, pos = read_regular_run(data, pos + 1)
        return PdfName(run.decode("latin-1")), pos
    if b == ord("["):
        return _parse_array(data, pos)

    run, after = read_regular_run(data, pos)
    if not run:
        raise XrefBroken(f"unparseable token at byte {pos}")
    if run == b"true":
        return True, after
    if run == b"false":
        return False, after
    if run == b"null":
        return None, after
    if looks_like_number(run):
        value = parse_number(run, pos)
        if isinstance(value, int) and value >= 0:
            ref, ref_pos = _try_reference(data, value, after)
            if ref is not None:
                return ref, ref_pos
        return value, after
    raise XrefBroken(f"unexpected token {run[:20]!r} at byte {pos}")


def _try_reference(data: bytes, num: int, pos: int) -> tuple[PdfRef | None, int]:
    p = skip_ws(data, pos)
    gen_run, p2 = read_regular_run(data, p)
    if not gen_run.isdigit():
        return None, pos
    p3 = skip_ws(data, p2)
    r_run, p4 = read_regular_run(data, p3)
    if r_run != b"R":
        return None, pos
    return PdfRef(num, int(gen_run)), p4


def _parse_array(data: bytes, pos: int) -> tuple[list, int]:
    pos += 1  # [
    items: list = []
    while True:
        pos = skip_ws(data, pos)
        if pos >= len(data):
            raise XrefBroken("unterminated array")
        if data[pos] == ord("]"):
            return items, pos + 1
        value, pos = _parse_value(data, pos)
        items.append(value)


def _parse_dict(data: bytes, pos: int) -> tuple[dict, int]:
    pos += 2  # <<
    result: dict = {}
    while True:
        pos = skip_ws(data, pos)
        if data.startswith(b">>", pos):
            return result, pos + 2
        if pos >= len(data):
            raise XrefBroken("unterminated dictionary")
        if data[pos] != ord("/"):
            raise XrefBroken(f"dictionary key at byte {pos} is not a name")
        run, pos = read_regular_run(data, pos + 1)
        key = run.decode("latin-1")
        value, pos = _parse_value(data, pos)
        result[key] = value


def _check_refs(table: PdfObjectTable, obj: Any, where: str) -> None:
    stack = [obj]
    while stack:
        current = stack.pop()
        if isinstance(current, PdfRef):
            if current.num not in table.entries:
                raise XrefBroken(f"{where}: unresolved reference {current.num} {current.gen} R")
            _, gen = table.entries[current.num]
            if gen != current.gen:
                raise XrefBroken(
                    f"{where}: reference {current.num} {current.gen} R "
                    f"does not match generation {gen}"
                )
        elif isinstance(current, dict):
            stack.extend(current.values())
        elif isinstance(current, list):
            stack.extend(current)
        elif isinstance(current, PdfStream):
            stack.extend(current.dict.values())
