"""Scanned-page preprocessing: grayscale, binarization, deskew, denoise,
line segmentation.

All operations are deterministic and take/return immutable image values.
Rotation convention: positive angles turn image content counterclockwise as
displayed (x right, y down); estimate_skew is defined against the same
rotate_image, so correcting a page means rotating by minus the estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import AngleOutOfRange, ImageTooSmall, NoContent
from .images import BinaryImage, RasterImage

MAX_ROTATE_DEG = 45.0
SKEW_RANGE_DEG = 15.0
SKEW_COARSE_STEP = 1.0
SKEW_FINE_STEP = 0.25


@dataclass(frozen=True)
class LineBand:
    """Half-open row interval [row_start, row_end) containing one text line."""

    row_start: int
    row_end: int


def to_grayscale(img: RasterImage) -> RasterImage:
    """Rec. 601 luma, computed in integer arithmetic so that
    luma = round(0.299 R + 0.587 G + 0.114 B) with halves rounding up,
    and gray inputs pass through unchanged."""
    if img.channels == 1:
        return img
    arr = img.to_array().astype(np.uint32)
    luma = (299 * arr[:, :, 0] + 587 * arr[:, :, 1] + 114 * arr[:, :, 2] + 500) // 1000
    return RasterImage.from_array(luma.astype(np.uint8))


def histogram(img: RasterImage) -> list[int]:
    if img.channels != 1:
        raise ValueError("histogram expects a grayscale image")
    counts = np.bincount(np.frombuffer(img.pixels, dtype=np.uint8), minlength=256)
    return counts.tolist()


def otsu_threshold(hist: Sequence[int]) -> int:
    """Threshold t in [0, 255] maximizing between-class variance
    w0 * w1 * (mu0 - mu1)^2 over classes [0..t] and [t+1..255].

    Comparisons are exact (integer cross-multiplication), ties break to the
    smallest t. A histogram with all mass in one bin returns that bin.
    """
    if len(hist) != 256:
        raise ValueError("histogram must have 256 bins")
    counts = [int(c) for c in hist]
    if any(c < 0 for c in counts):
        raise ValueError("histogram counts must be non-negative")
    total = sum(counts)
    if total == 0:
        raise NoContent("empty histogram")

    nonzero = [i for i, c in enumerate(counts) if c]
    if len(nonzero) == 1:
        return nonzero[0]

    total_sum = sum(i * c for i, c in enumerate(counts))
    # score(t) = (s0*c1 - s1*c0)^2 / (c0*c1), a positive rational; the shared
    # 1/N^2 factor is constant and dropped. Exact integer comparison avoids
    # float-tie ambiguity between candidates.
    best_t = 0
    best_num = -1
    best_den = 1
    c0 = 0
    s0 = 0
    for t in range(256):
        c0 += counts[t]
        s0 += t * counts[t]
        c1 = total - c0
        s1 = total_sum - s0
        if c0 == 0 or c1 == 0:
            num, den = 0, 1
        else:
            num = (s0 * c1 - s1 * c0) ** 2
            den = c0 * c1
        if num * best_den > best_num * den:
            best_num, best_den, best_t = num, den, t
    return best_t


def otsu_score(hist: Sequence[int], t: int) -> Fraction:
    """Exact between-class variance at candidate t (without the 1/N^2 factor).
    Exposed for verification against independent maximizers."""
    counts = [int(c) for c in hist]
    c0 = sum(counts[: t + 1])
    c1 = sum(counts[t + 1 :])
    if c0 == 0 or c1 == 0:
        return Fraction(0)
    s0 = sum(i * c for i, c in enumerate(counts[: t + 1]))
    s1 = sum(i * c for i, c in enumerate(counts)) - s0
    return Fraction((s0 * c1 - s1 * c0) ** 2, c0 * c1)


def binarize(img: RasterImage, threshold: int) -> BinaryImage:
    """Foreground (ink) = pixels with luminance <= threshold."""
    if img.channels != 1:
        raise ValueError("binarize expects a grayscale image")
    arr = img.to_array()
    return BinaryImage.from_array((arr <= threshold).astype(np.uint8))


@lru_cache(maxsize=4)
def _centered_grid(w: int, h: int) -> tuple[np.ndarray, np.ndarray]:
    """Center-relative pixel coordinates, cached because skew estimation
    rotates the same frame dozens of times."""
    ys, xs = np.mgrid[0:h, 0:w]
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    return xs - cx, ys - cy


def rotate_image(img: RasterImage | BinaryImage, angle_deg: float):
    """Rotate about the image center, keeping dimensions.

    Raster images resample bilinearly and fill uncovered pixels with 255;
    binary images use nearest-neighbor and fill with 0. |angle| <= 45.
    """
    if abs(angle_deg) > MAX_ROTATE_DEG:
        raise AngleOutOfRange(f"|{angle_deg}| > {MAX_ROTATE_DEG}")
    theta = math.radians(angle_deg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    h, w = img.height, img.width
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0

    dx, dy = _centered_grid(w, h)
    # inverse map: dest pixel samples source at R(theta) * (dest - center)
    src_x = cos_t * dx - sin_t * dy + cx
    src_y = sin_t * dx + cos_t * dy + cy

    if isinstance(img, BinaryImage):
        nx = np.rint(src_x).astype(np.int64)
        ny = np.rint(src_y).astype(np.int64)
        inside = (nx >= 0) & (nx < w) & (ny >= 0) & (ny < h)
        arr = img.to_array()
        out = np.zeros((h, w), dtype=np.uint8)
        out[inside] = arr[ny[inside], nx[inside]]
        return BinaryImage.from_array(out)

    arr = img.to_array().astype(np.float64)
    if img.channels == 1:
        arr = arr[:, :, np.newaxis]
    x0 = np.floor(src_x).astype(np.int64)
    y0 = np.floor(src_y).astype(np.int64)
    fx = src_x - x0
    fy = src_y - y0

    out = np.empty((h, w, arr.shape[2]), dtype=np.float64)
    out[:] = 255.0
    inside = (src_x >= 0) & (src_x <= w - 1) & (src_y >= 0) & (src_y <= h - 1)
    x0c = np.clip(x0, 0, w - 1)
    y0c = np.clip(y0, 0, h - 1)
    x1c = np.clip(x0 + 1, 0, w - 1)
    y1c = np.clip(y0 + 1, 0, h - 1)
    for ch in range(arr.shape[2]):
        plane = arr[:, :, ch]
        top = plane[y0c, x0c] * (1 - fx) + plane[y0c, x1c] * fx
        bottom = plane[y1c, x0c] * (1 - fx) + plane[y1c, x1c] * fx
        value = top * (1 - fy) + bottom * fy
        out[:, :, ch] = np.where(inside, value, 255.0)

    result = np.clip(np.rint(out), 0, 255).astype(np.uint8)
    if img.channels == 1:
        result = result[:, :, 0]
    return RasterImage.from_array(result)


def _profile_variance(img: BinaryImage) -> float:
    profile = img.to_array().sum(axis=1, dtype=np.int64)
    return float(np.var(profile))


def estimate_skew(img: BinaryImage) -> float:
    """Skew estimate in degrees, within +/-15.

    Sweeps candidate angles, scoring each by the variance of the horizontal
    projection profile of the image rotated by minus the candidate; text lines
    snap into sharp profile peaks when counter-rotated correctly. Coarse
    1-degree sweep, then a +/-1 degree refinement at 0.25-degree steps.
    """
    if img.foreground_count() == 0:
        raise NoContent("blank image has no skew")

    def score(angle: float) -> float:
        return _profile_variance(rotate_image(img, -angle))

    best_angle = -SKEW_RANGE_DEG
    best_score = -1.0
    angle = -SKEW_RANGE_DEG
    while angle <= SKEW_RANGE_DEG + 1e-9:
        s = score(angle)
        if s > best_score:
            best_score, best_angle = s, angle
        angle += SKEW_COARSE_STEP

    coarse = best_angle
    angle = max(-SKEW_RANGE_DEG, coarse - SKEW_COARSE_STEP)
    stop = min(SKEW_RANGE_DEG, coarse + SKEW_COARSE_STEP)
    while angle <= stop + 1e-9:
        s = score(angle)
        if s > best_score:
            best_score, best_angle = s, angle
        angle += SKEW_FINE_STEP

    return float(best_angle)


def deskew(img: BinaryImage) -> tuple[BinaryImage, float]:
    """Estimate skew and return (counter-rotated image, estimated angle)."""
    angle = estimate_skew(img)
    if angle == 0.0:
        return img, 0.0
    return rotate_image(img, -angle), angle


def median_denoise(img: BinaryImage) -> BinaryImage:
    """3x3 majority filter: a pixel stays foreground iff at least 5 of the 9
    cells in its neighborhood (background-padded at borders) are foreground."""
    if img.width < 3 or img.height < 3:
        raise ImageTooSmall(f"{img.width}x{img.height} (minimum 3x3)")
    arr = img.to_array().astype(np.uint8)
    padded = np.pad(arr, 1, mode="constant", constant_values=0)
    acc = np.zeros(arr.shape, dtype=np.uint8)
    h, w = arr.shape
    for dy in range(3):
        for dx in range(3):
            acc = acc + padded[dy : dy + h, dx : dx + w]
    return BinaryImage.from_array((acc >= 5).astype(np.uint8))


def segment_lines(img: BinaryImage) -> list[LineBand]:
    """Maximal runs of rows whose foreground count exceeds the ink threshold
    max(1, 0.005 * width). Returns bands top to bottom; blank images give []."""
    arr = img.to_array()
    counts = arr.sum(axis=1, dtype=np.int64)
    threshold = max(1.0, 0.005 * img.width)
    ink = counts > threshold

    bands: list[LineBand] = []
    start = None
    for row, is_ink in enumerate(ink):
        if is_ink and start is None:
            start = row
        elif not is_ink and start is not None:
            bands.append(LineBand(start, row))
            start = None
    if start is not None:
        bands.append(LineBand(start, img.height))
    return bands
