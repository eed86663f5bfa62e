"""OCR engine adapters behind one recognize() front door.

Three kinds:
  - external_process: run a command template with {input}/{output} placeholders,
    read 12-column TSV from the output file.
  - http: POST the page as base64 JSON, parse an annotation-style response.
  - mock: corrupt known ground-truth words with a seeded, per-character
    substitution model; used for offline calibration and tests.

Word boxes always arrive in pixel units of the submitted image.
"""

from __future__ import annotations

import base64
import json
import os
import random
import shlex
import string
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import requests

from .errors import (
    ConfigError,
    EngineLaunchFailed,
    HttpError,
    InvariantViolation,
    JsonMalformed,
    MissingCredential,
    MissingField,
    MissingGroundTruth,
    Timeout,
    TsvMalformed,
)
from .images import BinaryImage, RasterImage, binary_to_raster, write_pgm
from .model import BoundingBox, Word

ENGINE_KINDS = ("external_process", "http", "mock")

# Visually confusable pairs the mock swaps between; single characters only.
CONFUSABLE: dict[str, str] = {"O": "0", "0": "O", "l": "1", "1": "l", "S": "5", "5": "S", "B": "8", "8": "B"}
_FALLBACK_ALPHABET = string.ascii_lowercase + string.digits

# Cap on simultaneous HTTP engine calls across all worker threads.
DEFAULT_HTTP_INFLIGHT = 4
_http_slots = threading.BoundedSemaphore(DEFAULT_HTTP_INFLIGHT)


def set_http_inflight_limit(n: int) -> None:
    global _http_slots
    if n < 1:
        raise ValueError("in-flight limit must be >= 1")
    _http_slots = threading.BoundedSemaphore(n)


@dataclass(frozen=True)
class EngineSpec:
    name: str
    kind: str
    command_template: str | None = None
    endpoint_url: str | None = None
    credential_env_var: str | None = None
    mock_char_error_rate: float | None = None
    mock_seed: int | None = None
    timeout_s: float = 60.0

    def __post_init__(self):
        if not self.name:
            raise ConfigError("engine name must be non-empty")
        if self.kind not in ENGINE_KINDS:
            raise ConfigError(f"engine {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == "external_process" and not self.command_template:
            raise ConfigError(f"engine {self.name!r}: external_process needs command_template")
        if self.kind == "http" and not self.endpoint_url:
            raise ConfigError(f"engine {self.name!r}: http needs endpoint_url")
        if self.kind == "mock":
            if self.mock_char_error_rate is None or self.mock_seed is None:
                raise ConfigError(
                    f"engine {self.name!r}: mock needs mock_char_error_rate and mock_seed"
                )
            if not (0.0 <= self.mock_char_error_rate <= 1.0):
                raise ConfigError(f"engine {self.name!r}: error rate outside [0, 1]")
        if self.timeout_s <= 0:
            raise ConfigError(f"engine {self.name!r}: timeout must be positive")


@dataclass(frozen=True)
class RecognizedPage:
    words: tuple[Word, ...]
    engine_name: str
    elapsed_ms: float


# --- TSV ----------------------------------------------------------------------

TSV_COLUMNS = 12  # level page_num block_num par_num line_num word_num left top width height conf text


def parse_engine_tsv(text: str) -> list[Word]:
    """Parse 12-column engine TSV. Keeps rows with level 5 and conf >= 0;
    layout rows (negative conf) and non-word levels are skipped. An optional
    header row is detected by a non-numeric first field."""
    words: list[Word] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        fields = raw.split("\t")
        first = fields[0].strip()
        if lineno == 1 and first and not _is_number(first):
            continue  # header
        if len(fields) != TSV_COLUMNS:
            raise TsvMalformed(f"row {lineno}: expected {TSV_COLUMNS} fields, got {len(fields)}")
        try:
            level = int(fields[0])
            left, top = int(fields[6]), int(fields[7])
            width, height = int(fields[8]), int(fields[9])
            conf = float(fields[10])
        except ValueError as exc:
            raise TsvMalformed(f"row {lineno}: {exc}") from exc
        word_text = fields[11]
        if level != 5 or conf < 0 or not word_text:
            continue
        try:
            box = BoundingBox(left, top, left + width, top + height, "pixel")
            words.append(Word(word_text, box, min(conf / 100.0, 1.0)))
        except InvariantViolation as exc:
            raise TsvMalformed(f"row {lineno}: {exc}") from exc
    return words


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def render_engine_tsv(words: Sequence[Word], *, header: bool = False) -> str:
    """Render words back to the 12-column TSV shape (debugging and tests)."""
    lines = []
    if header:
        lines.append(
            "level\tpage_num\tblock_num\tpar_num\tline_num\tword_num\tleft\ttop\twidth\theight\tconf\ttext"
        )
    for i, w in enumerate(words, start=1):
        b = w.bbox
        lines.append(
            f"5\t1\t1\t1\t1\t{i}\t{int(round(b.x0))}\t{int(round(b.y0))}"
            f"\t{int(round(b.x1 - b.x0))}\t{int(round(b.y1 - b.y0))}\t{w.confidence * 100:g}\t{w.text}"
        )
    return "\n".join(lines) + ("\n" if lines else "")


# --- HTTP annotation JSON -----------------------------------------------------


def parse_http_ocr_json(data: bytes | str) -> list[Word]:
    """Parse an annotation-style OCR response:

        {"annotations": [{"text": "Hello",
                          "vertices": [{"x": 1, "y": 2}, ...],
                          "confidence": 0.97}, ...]}

    The box is the axis-aligned hull of the polygon vertices; a missing
    confidence defaults to 1.0.
    """
    try:
        raw = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise JsonMalformed(str(exc)) from exc
    if not isinstance(raw, dict) or "annotations" not in raw:
        raise MissingField("annotations")
    annotations = raw["annotations"]
    if not isinstance(annotations, list):
        raise MissingField("annotations", "annotations must be an array")

    words: list[Word] = []
    for i, ann in enumerate(annotations):
        path = f"annotations[{i}]"
        if not isinstance(ann, dict):
            raise MissingField(path, f"{path} must be an object")
        if "text" not in ann or not isinstance(ann["text"], str) or not ann["text"]:
            raise MissingField(f"{path}.text")
        vertices = ann.get("vertices")
        if not isinstance(vertices, list) or not vertices:
            raise MissingField(f"{path}.vertices")
        xs: list[float] = []
        ys: list[float] = []
        for j, v in enumerate(vertices):
            if isinstance(v, dict) and "x" in v and "y" in v:
                xs.append(float(v["x"]))
                ys.append(float(v["y"]))
            elif isinstance(v, (list, tuple)) and len(v) == 2:
                xs.append(float(v[0]))
                ys.append(float(v[1]))
            else:
                raise MissingField(f"{path}.vertices[{j}]")
        conf = ann.get("confidence", 1.0)
        if isinstance(conf, bool) or not isinstance(conf, (int, float)):
            raise MissingField(f"{path}.confidence", "confidence must be a number")
        words.append(
            Word(
                ann["text"],
                BoundingBox(min(xs), min(ys), max(xs), max(ys), "pixel"),
                float(conf),
            )
        )
    return words


# --- mock engine --------------------------------------------------------------


def mock_recognize(spec: EngineSpec, gold_words: Sequence[Word]) -> RecognizedPage:
    """Corrupt ground-truth words with per-character substitutions.

    Each character is substituted with probability mock_char_error_rate, drawn
    from a stream seeded by the engine seed plus the page text (deterministic
    per (seed, input), decorrelated across pages). Substitutions stay inside
    the confusable table when the character has a pair, otherwise draw a
    different character from [a-z0-9]. Word confidence is
    0.99 - 0.5 * (fraction of substituted characters), clamped to [0, 1].
    """
    if spec.kind != "mock":
        raise ConfigError(f"engine {spec.name!r} is not a mock engine")
    start = time.perf_counter()
    rate = float(spec.mock_char_error_rate or 0.0)
    page_text = " ".join(w.text for w in gold_words)
    rng = random.Random(f"{spec.mock_seed}|{page_text}")

    out: list[Word] = []
    for word in gold_words:
        chars = list(word.text)
        substituted = 0
        for i, ch in enumerate(chars):
            if rng.random() >= rate:
                continue
            if ch in CONFUSABLE:
                chars[i] = CONFUSABLE[ch]
            else:
                pool = _FALLBACK_ALPHABET.replace(ch, "") if ch in _FALLBACK_ALPHABET else _FALLBACK_ALPHABET
                chars[i] = rng.choice(pool)
            substituted += 1
        confidence = min(1.0, max(0.0, 0.99 - 0.5 * substituted / len(chars)))
        out.append(Word("".join(chars), word.bbox, confidence))

    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return RecognizedPage(tuple(out), spec.name, elapsed_ms)


# --- external process engine --------------------------------------------------


def _image_to_pgm_bytes(image: RasterImage | BinaryImage) -> bytes:
    if isinstance(image, BinaryImage):
        return write_pgm(binary_to_raster(image))
    if image.channels == 3:
        from .preprocess import to_grayscale

        return write_pgm(to_grayscale(image))
    return write_pgm(image)


def _run_external(spec: EngineSpec, image: RasterImage | BinaryImage) -> list[Word]:
    with tempfile.TemporaryDirectory(prefix="docmill-ocr-") as tmp:
        input_path = Path(tmp) / "page.pgm"
        output_path = Path(tmp) / "page.tsv"
        input_path.write_bytes(_image_to_pgm_bytes(image))

        argv = [
            part.replace("{input}", str(input_path)).replace("{output}", str(output_path))
            for part in shlex.split(spec.command_template or "")
        ]
        if not argv:
            raise EngineLaunchFailed(f"engine {spec.name!r}: empty command template")
        try:
            proc = subprocess.run(argv, capture_output=True, timeout=spec.timeout_s)
        except subprocess.TimeoutExpired as exc:
            raise Timeout(f"engine {spec.name!r} exceeded {spec.timeout_s}s") from exc
        except OSError as exc:
            raise EngineLaunchFailed(f"engine {spec.name!r}: {exc}") from exc
        if proc.returncode != 0:
            stderr = proc.stderr.decode("utf-8", "replace")[:200]
            raise EngineLaunchFailed(
                f"engine {spec.name!r} exited with code {proc.returncode}: {stderr}"
            )
        if not output_path.exists():
            raise EngineLaunchFailed(f"engine {spec.name!r} produced no output file")
        return parse_engine_tsv(output_path.read_text("utf-8"))


# --- HTTP engine ----------------------------------------------------------------


def _run_http(spec: EngineSpec, image: RasterImage | BinaryImage) -> list[Word]:
    headers = {}
    if spec.credential_env_var:
        token = os.environ.get(spec.credential_env_var)
        if token is None:
            raise MissingCredential(
                f"engine {spec.name!r}: environment variable {spec.credential_env_var} is not set"
            )
        headers["Authorization"] = f"Bearer {token}"
    payload = {"image": {"content": base64.b64encode(_image_to_pgm_bytes(image)).decode("ascii")}}
    with _http_slots:
        try:
            resp = requests.post(
                spec.endpoint_url, json=payload, headers=headers, timeout=spec.timeout_s
            )
        except requests.Timeout as exc:
            raise Timeout(f"engine {spec.name!r} exceeded {spec.timeout_s}s") from exc
        except requests.RequestException as exc:
            raise HttpError(0, str(exc)) from exc
    if not (200 <= resp.status_code < 300):
        raise HttpError(resp.status_code, resp.text[:200])
    return parse_http_ocr_json(resp.content)


# --- front door ------------------------------------------------------------------


def recognize(
    spec: EngineSpec,
    image: RasterImage | BinaryImage,
    gold_words: Sequence[Word] | None = None,
) -> RecognizedPage:
    """Run one engine over one page image.

    Mock engines do not read pixels; they require the page's ground-truth
    words (callers resolve these from fixture sidecars).
    """
    start = time.perf_counter()
    if spec.kind == "mock":
        if gold_words is None:
            raise MissingGroundTruth(
                f"engine {spec.name!r} is a mock and needs ground-truth words"
            )
        return mock_recognize(spec, gold_words)
    if spec.kind == "external_process":
        words = _run_external(spec, image)
    else:
        words = _run_http(spec, image)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return RecognizedPage(tuple(words), spec.name, elapsed_ms)
