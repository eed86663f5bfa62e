"""Content stream tokenizer and text-operator interpreter.

The tokenizer lexes the full operand grammar (numbers, names, literal and hex
strings, arrays, inline dictionaries) plus operators. The interpreter executes
only the text machinery - BT/ET, Tf, Td, TD, TL, T*, Tm, Tj, TJ, ', " - and
skips every other operator; painting state is out of scope.

Glyph positions follow the standard text-space model: the pen advances by
((w0 / 1000) * Tfs + Tc + (Tw if the glyph is a space)) * Th per glyph, and a
number n inside a TJ array displaces the pen by (-n / 1000) * Tfs * Th.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from ..errors import FontMissing, LexError
from ._lex import (
    is_regular,
    looks_like_number,
    parse_number,
    read_hex_string,
    read_literal_string,
    read_regular_run,
    skip_ws,
)
from .objects import PdfName

TOKEN_KINDS = ("number", "name", "string", "array", "dict", "operator")


@dataclass(frozen=True)
class ContentToken:
    kind: str
    value: Any
    offset: int


@dataclass(frozen=True)
class FontTable:
    """Width and encoding data for one page font."""

    widths: tuple[float, ...] | None = None
    first_char: int = 0
    default_width: float = 500.0
    encoding: Mapping[int, str] | None = None  # None = printable-ASCII identity

    def glyph_width(self, code: int) -> float:
        if self.widths is not None:
            idx = code - self.first_char
            if 0 <= idx < len(self.widths):
                return self.widths[idx]
        return self.default_width

    def decode(self, code: int) -> str:
        if self.encoding is not None:
            return self.encoding.get(code, "?")
        return chr(code) if 0x20 <= code <= 0x7E else "?"


@dataclass(frozen=True)
class GlyphRun:
    """One shown string: decoded text, baseline origin in PDF user space
    (bottom-left origin, y up), nominal font size, and total pen advance."""

    text: str
    origin_x: float
    origin_y: float
    font_size: float
    advance_width: float


def tokenize_content(data: bytes) -> list[ContentToken]:
    """Lex a content stream into operand and operator tokens, in order."""
    tokens: list[ContentToken] = []
    pos = 0
    while True:
        pos = skip_ws(data, pos)
        if pos >= len(data):
            return tokens
        start = pos
        b = data[pos]
        if b == ord("("):
            text, pos = read_literal_string(data, pos)
            tokens.append(ContentToken("string", text, start))
        elif data.startswith(b"<<", pos):
            value, pos = _lex_dict(data, pos)
            tokens.append(ContentToken("dict", value, start))
        elif b == ord("<"):
            text, pos = read_hex_string(data, pos)
            tokens.append(ContentToken("string", text, start))
        elif b == ord("/"):
            run, pos = read_regular_run(data, pos + 1)
            tokens.append(ContentToken("name", PdfName(run.decode("latin-1")), start))
        elif b == ord("["):
            value, pos = _lex_array(data, pos)
            tokens.append(ContentToken("array", value, start))
        elif b in b")>]}{":
            raise LexError(pos, f"unexpected delimiter {chr(b)!r}")
        elif is_regular(b):
            run, pos = read_regular_run(data, pos)
            if looks_like_number(run):
                tokens.append(ContentToken("number", parse_number(run, start), start))
            elif run == b"true":
                tokens.append(ContentToken("number", True, start))
            elif run == b"false":
                tokens.append(ContentToken("number", False, start))
            elif run == b"null":
                tokens.append(ContentToken("number", None, start))
            else:
                tokens.append(ContentToken("operator", run.decode("latin-1"), start))
        else:
            raise LexError(pos, f"unexpected byte 0x{b:02x}")


def _lex_array(data: bytes, pos: int) -> tuple[list, int]:
    open_offset = pos
    pos += 1
    items: list = []
    while True:
        pos = skip_ws(data, pos)
        if pos >= len(data):
            raise LexError(open_offset, "unterminated array")
        b = data[pos]
        if b == ord("]"):
            return items, pos + 1
        if b == ord("("):
            value, pos = read_literal_string(data, pos)
        elif data.startswith(b"<<", pos):
            value, pos = _lex_dict(data, pos)
        elif b == ord("<"):
            value, pos = read_hex_string(data, pos)
        elif b == ord("/"):
            run, pos = read_regular_run(data, pos + 1)
            value = PdfName(run.decode("latin-1"))
        elif b == ord("["):
            value, pos = _lex_array(data, pos)
        elif is_regular(b):
            start = pos
            run, pos = read_regular_run(data, pos)
            if looks_like_number(run):
                value = parse_number(run, start)
            elif run in (b"true", b"false", b"null"):
                value = {b"true": True, b"false": False, b"null": None}[run]
            else:
                raise LexError(start, f"operator {run.decode('latin-1')!r} inside array")
        else:
            raise LexError(pos, f"unexpected byte 0x{b:02x} in array")
        items.append(value)


def _lex_dict(data: bytes, pos: int) -> tuple[dict, int]:
    open_offset = pos
    pos += 2
    result: dict = {}
    while True:
        pos = skip_ws(data, pos)
        if data.startswith(b">>", pos):
            return result, pos + 2
        if pos >= len(data):
            raise LexError(open_offset, "unterminated dictionary")
        if data[pos] != ord("/"):
            raise LexError(pos, "dictionary key is not a name")
        run, pos = read_regular_run(data, pos + 1)
        key = run.decode("latin-1")
        pos = skip_ws(data, pos)
        if pos >= len(data):
            raise LexError(open_offset, "unterminated dictionary")
        b = data[pos]
        if b == ord("("):
            value, pos = read_literal_string(data, pos)
        elif data.startswith(b"<<", pos):
            value, pos = _lex_dict(data, pos)
        elif b == ord("<"):
            value, pos = read_hex_string(data, pos)
        elif b == ord("/"):
            run2, pos = read_regular_run(data, pos + 1)
            value = PdfName(run2.decode("latin-1"))
        elif b == ord("["):
            value, pos = _lex_array(data, pos)
        else:
            start = pos
            run2, pos = read_regular_run(data, pos)
            if looks_like_number(run2):
                value = parse_number(run2, start)
            elif run2 in (b"true", b"false", b"null"):
                value = {b"true": True, b"false": False, b"null": None}[run2]
            else:
                raise LexError(start, f"bad dictionary value {run2[:20]!r}")
        result[key] = value


# --- interpreter ---------------------------------------------------------------


_MATRIX_IDENTITY = (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)


def _mat_mul(m1: tuple, m2: tuple) -> tuple:
    """Row-vector convention: result = m1 x m2 for [x y 1] * M."""
    a1, b1, c1, d1, e1, f1 = m1
    a2, b2, c2, d2, e2, f2 = m2
    return (
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
        e1 * a2 + f1 * c2 + e2,
        e1 * b2 + f1 * d2 + f2,
    )


def _translate(tx: float, ty: float) -> tuple:
    return (1.0, 0.0, 0.0, 1.0, tx, ty)


class _TextState:
    def __init__(self) -> None:
        self.tm = _MATRIX_IDENTITY
        self.tlm = _MATRIX_IDENTITY
        self.font_id: str | None = None
        self.font_size = 0.0
        self.char_spacing = 0.0
        self.word_spacing = 0.0
        self.leading = 0.0
        self.h_scale = 1.0
        self.in_text = False


# Operand arity for the text operators we execute.
_TEXT_OPERATORS: dict[str, int] = {
    "BT": 0,
    "ET": 0,
    "Tf": 2,
    "Td": 2,
    "TD": 2,
    "TL": 1,
    "T*": 0,
    "Tm": 6,
    "Tj": 1,
    "TJ": 1,
    "'": 1,
    '"': 3,
    "Tc": 1,
    "Tw": 1,
    "Tz": 1,
}


def interpret_text(
    tokens: Iterable[ContentToken], fonts: Mapping[str, FontTable]
) -> list[GlyphRun]:
    """Execute the text operators over a token stream and collect glyph runs.

    ``fonts`` maps resource font ids (e.g. "F1") to their width/encoding
    tables; selecting an id absent from it raises FontMissing. Operators
    outside the text set are skipped along with their operands.
    """
    runs: list[GlyphRun] = []
    state = _TextState()
    operands: list[ContentToken] = []

    for token in tokens:
        if token.kind != "operator":
            operands.append(token)
            continue
        op = token.value
        if op not in _TEXT_OPERATORS:
            operands.clear()  # painting, color, path, ... - not our business
            continue
        arity = _TEXT_OPERATORS[op]
        if len(operands) < arity:
            raise LexError(token.offset, f"{op} expects {arity} operands, got {len(operands)}")
        args = [t.value for t in operands[-arity:]] if arity else []
        operands.clear()
        _execute(op, args, token.offset, state, fonts, runs)
    return runs


def _num(args: Sequence, i: int, op: str, offset: int) -> float:
    v = args[i]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise LexError(offset, f"{op}: operand {i + 1} must be a number")
    return float(v)


def _execute(
    op: str,
    args: list,
    offset: int,
    state: _TextState,
    fonts: Mapping[str, FontTable],
    runs: list[GlyphRun],
) -> None:
    if op == "BT":
        state.in_text = True
        state.tm = state.tlm = _MATRIX_IDENTITY
    elif op == "ET":
        state.in_text = False
    elif op == "Tf":
        name, size = args
        font_id = str(name)
        if font_id not in fonts:
            raise FontMissing(f"font /{font_id} not in page resources")
        state.font_id = font_id
        state.font_size = float(size)
    elif op == "Td":
        tx, ty = (_num(args, 0, op, offset), _num(args, 1, op, offset))
        state.tlm = _mat_mul(_translate(tx, ty), state.tlm)
        state.tm = state.tlm
    elif op == "TD":
        tx, ty = (_num(args, 0, op, offset), _num(args, 1, op, offset))
        state.leading = -ty
        state.tlm = _mat_mul(_translate(tx, ty), state.tlm)
        state.tm = state.tlm
    elif op == "TL":
        state.leading = _num(args, 0, op, offset)
    elif op == "T*":
        state.tlm = _mat_mul(_translate(0.0, -state.leading), state.tlm)
        state.tm = state.tlm
    elif op == "Tm":
        state.tlm = tuple(_num(args, i, op, offset) for i in range(6))
        state.tm = state.tlm
    elif op == "Tc":
        state.char_spacing = _num(args, 0, op, offset)
    elif op == "Tw":
        state.word_spacing = _num(args, 0, op, offset)
    elif op == "Tz":
        state.h_scale = _num(args, 0, op, offset) / 100.0
    elif op == "Tj":
        _show(args[0], offset, state, fonts, runs)
    elif op == "'":
        state.tlm = _mat_mul(_translate(0.0, -state.leading), state.tlm)
        state.tm = state.tlm
        _show(args[0], offset, state, fonts, runs)
    elif op == '"':
        state.word_spacing = _num(args, 0, op, offset)
        state.char_spacing = _num(args, 1, op, offset)
        state.tlm = _mat_mul(_translate(0.0, -state.leading), state.tlm)
        state.tm = state.tlm
        _show(args[2], offset, state, fonts, runs)
    elif op == "TJ":
        if not isinstance(args[0], list):
            raise LexError(offset, "TJ expects an array")
        for element in args[0]:
            if isinstance(element, str):
                _show(element, offset, state, fonts, runs)
            elif isinstance(element, (int, float)) and not isinstance(element, bool):
                shift = (-float(element) / 1000.0) * state.font_size * state.h_scale
                state.tm = _mat_mul(_translate(shift, 0.0), state.tm)
            else:
                raise LexError(offset, f"TJ array holds {type(element).__name__}")


def _show(
    text: Any,
    offset: int,
    state: _TextState,
    fonts: Mapping[str, FontTable],
    runs: list[GlyphRun],
) -> None:
    if not isinstance(text, str):
        raise LexError(offset, "show operator expects a string operand")
    if not state.in_text:
        return  # stray show outside BT/ET: ignore, nothing sensible to anchor it to
    if state.font_id is None:
        raise FontMissing("text shown before any Tf font selection")
    if not text:
        return
    font = fonts[state.font_id]

    decoded = []
    advance = 0.0
    for ch in text:
        code = ord(ch)
        decoded.append(font.decode(code))
        glyph_adv = (font.glyph_width(code) / 1000.0) * state.font_size + state.char_spacing
        if code == 0x20:
            glyph_adv += state.word_spacing
        advance += glyph_adv * state.h_scale

    runs.append(
        GlyphRun(
            text="".join(decoded),
            origin_x=state.tm[4],
            origin_y=state.tm[5],
            font_size=state.font_size,
            advance_width=advance,
        )
    )
    state.tm = _mat_mul(_translate(advance, 0.0), state.tm)


def count_show_operators(tokens: Iterable[ContentToken]) -> int:
    """Number of text-show operators (Tj, TJ, ', \") in a token stream."""
    shows = {"Tj", "TJ", "'", '"'}
    return sum(1 for t in tokens if t.kind == "operator" and t.value in shows)
