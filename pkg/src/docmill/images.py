"""Image value types and file I/O.

Two in-memory forms: RasterImage (8-bit, 1 or 3 channels, row-major bytes)
and BinaryImage (one byte per pixel, values 0/1, 1 = foreground ink). Both are
immutable; operations return new values.

On disk: PNG (via Pillow), and binary Netpbm (P5 grayscale, P4 bitmap)
implemented here so the bytes are exactly what the format says.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import UnsupportedImage


@dataclass(frozen=True)
class RasterImage:
    width: int
    height: int
    channels: int
    pixels: bytes  # row-major, interleaved channels

    def __post_init__(self):
        if self.channels not in (1, 3):
            raise UnsupportedImage(f"{self.channels} channels (want 1 or 3)")
        if self.width <= 0 or self.height <= 0:
            raise UnsupportedImage("image extents must be positive")
        expected = self.width * self.height * self.channels
        if len(self.pixels) != expected:
            raise UnsupportedImage(
                f"pixel buffer holds {len(self.pixels)} bytes, expected {expected}"
            )

    def to_array(self) -> np.ndarray:
        arr = np.frombuffer(self.pixels, dtype=np.uint8)
        if self.channels == 1:
            return arr.reshape(self.height, self.width)
        return arr.reshape(self.height, self.width, self.channels)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "RasterImage":
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        if arr.ndim == 2:
            h, w = arr.shape
            return cls(w, h, 1, arr.tobytes())
        if arr.ndim == 3 and arr.shape[2] == 3:
            h, w, _ = arr.shape
            return cls(w, h, 3, arr.tobytes())
        raise UnsupportedImage(f"array shape {arr.shape}")


@dataclass(frozen=True)
class BinaryImage:
    width: int
    height: int
    pixels: bytes  # one byte per pixel, 0 or 1

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise UnsupportedImage("image extents must be positive")
        if len(self.pixels) != self.width * self.height:
            raise UnsupportedImage(
                f"pixel buffer holds {len(self.pixels)} bytes, "
                f"expected {self.width * self.height}"
            )
        if self.pixels.translate(None, b"\x00\x01"):
            raise UnsupportedImage("binary pixels must be 0 or 1")

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(self.height, self.width)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "BinaryImage":
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        if arr.ndim != 2:
            raise UnsupportedImage(f"array shape {arr.shape}")
        h, w = arr.shape
        return cls(w, h, arr.tobytes())

    def foreground_count(self) -> int:
        return self.pixels.count(1)


# --- Netpbm (binary variants only) -------------------------------------------


def _read_pnm_header(data: bytes, magic: bytes, fields: int) -> tuple[list[int], int]:
    """Parse 'P4'/'P5' headers: magic, then `fields` decimal values separated
    by whitespace/comments, then exactly one whitespace byte before the raster."""
    if not data.startswith(magic):
        raise UnsupportedImage(f"not a {magic.decode()} file")
    pos = len(magic)
    values: list[int] = []
    while len(values) < fields:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos] == ord("#"):
            nl = data.find(b"\n", pos)
            if nl < 0:
                raise UnsupportedImage("truncated netpbm comment")
            pos = nl + 1
            continue
        start = pos
        while pos < len(data) and data[pos : pos + 1].isdigit():
            pos += 1
        if start == pos:
            raise UnsupportedImage("malformed netpbm header")
        values.append(int(data[start:pos]))
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise UnsupportedImage("netpbm header must end with a whitespace byte")
    return values, pos + 1


def read_pgm(data: bytes) -> RasterImage:
    (w, h, maxval), pos = _read_pnm_header(data, b"P5", 3)
    if maxval != 255:
        raise UnsupportedImage(f"PGM maxval {maxval} (only 255 supported)")
    need = w * h
    raster = data[pos : pos + need]
    if len(raster) != need:
        raise UnsupportedImage("PGM raster truncated")
    return RasterImage(w, h, 1, raster)


def write_pgm(img: RasterImage) -> bytes:
    if img.channels != 1:
        raise UnsupportedImage("PGM stores single-channel images")
    return b"P5\n%d %d\n255\n" % (img.width, img.height) + img.pixels


def read_pbm(data: bytes) -> BinaryImage:
    (w, h), pos = _read_pnm_header(data, b"P4", 2)
    row_bytes = (w + 7) // 8
    need = row_bytes * h
    raster = data[pos : pos + need]
    if len(raster) != need:
        raise UnsupportedImage("PBM raster truncated")
    rows = np.frombuffer(raster, dtype=np.uint8).reshape(h, row_bytes)
    bits = np.unpackbits(rows, axis=1)[:, :w]  # MSB-first, 1 = black = ink
    return BinaryImage.from_array(bits)


def write_pbm(img: BinaryImage) -> bytes:
    arr = img.to_array()
    packed = np.packbits(arr, axis=1)  # pads each row to a byte boundary
    return b"P4\n%d %d\n" % (img.width, img.height) + packed.tobytes()


# --- PNG (Pillow) -------------------------------------------------------------


def read_png(data: bytes) -> RasterImage:
    try:
        im = Image.open(io.BytesIO(data))
        im.load()
    except UnidentifiedImageError as exc:
        raise UnsupportedImage(f"not a readable image: {exc}") from exc
    if im.mode in ("1", "L", "LA", "I;16"):
        im = im.convert("L")
        return RasterImage(im.width, im.height, 1, im.tobytes())
    if im.mode in ("RGB", "RGBA", "P"):
        im = im.convert("RGB")
        return RasterImage(im.width, im.height, 3, im.tobytes())
    raise UnsupportedImage(f"PNG mode {im.mode}")


def write_png(img: RasterImage) -> bytes:
    mode = "L" if img.channels == 1 else "RGB"
    im = Image.frombytes(mode, (img.width, img.height), img.pixels)
    buf = io.BytesIO()
    im.save(buf, format="PNG")
    return buf.getvalue()


# --- path-level helpers -------------------------------------------------------

IMAGE_SUFFIXES = (".png", ".pgm", ".pbm")


def read_image(path: str | Path) -> RasterImage | BinaryImage:
    """Load by extension: .png/.pgm give RasterImage, .pbm gives BinaryImage."""
    path = Path(path)
    data = path.read_bytes()
    suffix = path.suffix.lower()
    if suffix == ".png":
        return read_png(data)
    if suffix == ".pgm":
        return read_pgm(data)
    if suffix == ".pbm":
        return read_pbm(data)
    raise UnsupportedImage(f"unknown image extension {suffix!r}")


def binary_to_raster(img: BinaryImage) -> RasterImage:
    """Ink (1) becomes black (0), background becomes white (255)."""
    arr = img.to_array()
    return RasterImage.from_array(np.where(arr > 0, 0, 255).astype(np.uint8))
