"""Byte-level lexing primitives shared by the object parser and the content
stream tokenizer. PDF strings are byte strings; this subset decodes them as
latin-1, which is the identity on the supported WinAnsi printable range."""

from __future__ import annotations

from ..errors import LexError

WHITESPACE = b"\x00\t\n\x0c\r "
DELIMITERS = b"()<>[]{}/%"


def is_whitespace(byte: int) -> bool:
    return byte in WHITESPACE


def is_delimiter(byte: int) -> bool:
    return byte in DELIMITERS


def is_regular(byte: int) -> bool:
    return not is_whitespace(byte) and not is_delimiter(byte)


def skip_ws(data: bytes, pos: int) -> int:
    """Advance past whitespace and % comments."""
    while pos < len(data):
        b = data[pos]
        if is_whitespace(b):
            pos += 1
        elif b == ord("%"):
            while pos < len(data) and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    return pos


def read_regular_run(data: bytes, pos: int) -> tuple[bytes, int]:
    start = pos
    while pos < len(data) and is_regular(data[pos]):
        pos += 1
    return data[start:pos], pos


_SIMPLE_ESCAPES = {
    ord("n"): "\n",
    ord("t"): "\t",
    ord("r"): "\r",
    ord("b"): "\b",
    ord("f"): "\f",
    ord("("): "(",
    ord(")"): ")",
    ord("\\"): "\\",
}


def read_literal_string(data: bytes, pos: int) -> tuple[str, int]:
    """Decode a ( ... ) literal string starting at the opening paren.

    Supports the standard escapes, 1-3 digit octal escapes, line
    continuations, and balanced unescaped parentheses.
    """
    if data[pos : pos + 1] != b"(":
        raise LexError(pos, "expected (")
    open_offset = pos
    pos += 1
    depth = 1
    out: list[str] = []
    while pos < len(data):
        b = data[pos]
        if b == ord("\\"):
            pos += 1
            if pos >= len(data):
                break
            e = data[pos]
            if e in _SIMPLE_ESCAPES:
                out.append(_SIMPLE_ESCAPES[e])
                pos += 1
            elif ord("0") <= e <= ord("7"):
                digits = 0
                value = 0
                while pos < len(data) and digits < 3 and ord("0") <= data[pos] <= ord("7"):
                    value = value * 8 + (data[pos] - ord("0"))
                    pos += 1
                    digits += 1
                out.append(chr(value & 0xFF))
            elif e in b"\r\n":
                # line continuation: swallow one EOL sequence
                pos += 1
                if e == ord("\r") and pos < len(data) and data[pos] == ord("\n"):
                    pos += 1
            else:
                out.append(chr(e))
                pos += 1
        elif b == ord("("):
            depth += 1
            out.append("(")
            pos += 1
        elif b == ord(")"):
            depth -= 1
            if depth == 0:
                return "".join(out), pos + 1
            out.append(")")
            pos += 1
        else:
            out.append(chr(b))
            pos += 1
    raise LexError(open_offset, "unterminated literal string")


def read_hex_string(data: bytes, pos: int) -> tuple[str, int]:
    """Decode a < ... > hex string starting at the opening angle bracket.
    An odd final digit is padded with 0, per the format."""
    if data[pos : pos + 1] != b"<":
        raise LexError(pos, "expected <")
    open_offset = pos
    pos += 1
    digits: list[str] = []
    while pos < len(data):
        b = data[pos]
        if b == ord(">"):
            if len(digits) % 2:
                digits.append("0")
            text = "".join(
                chr(int(digits[i] + digits[i + 1], 16)) for i in range(0, len(digits), 2)
            )
            return text, pos + 1
        if is_whitespace(b):
            pos += 1
            continue
        ch = chr(b)
        if ch not in "0123456789abcdefABCDEF":
            raise LexError(pos, f"invalid hex digit {ch!r}")
        digits.append(ch)
        pos += 1
    raise LexError(open_offset, "unterminated hex string")


def parse_number(token: bytes, offset: int) -> int | float:
    text = token.decode("ascii", "replace")
    try:
        if b"." in token:
            return float(text)
        return int(text)
    except ValueError as exc:
        raise LexError(offset, f"malformed number {text!r}") from exc


def looks_like_number(token: bytes) -> bool:
    if not token:
        return False
    body = token.lstrip(b"+-")
    return bool(body) and all(c in b"0123456789." for c in body) and body.count(b".") <= 1
