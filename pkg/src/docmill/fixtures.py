"""Seeded synthetic corpora for exercising the full pipeline offline.

Four corpora, all derived from one integer seed so repeated runs produce
byte-identical trees:

- receipts/: rendered receipt rasters (PNG) with per-word ground truth
  sidecars, plain-text transcripts, and flat gold key files.
- pdfs/: small generated text PDFs with transcripts, alternating raw and
  compressed content streams.
- calibration/: pages of single-character tokens (PGM). With one-character
  words, per-character substitution noise moves word accuracy one-for-one,
  which makes engine accuracy calibration directly observable.
- skewed/: one receipt rendered with a wide margin and rotated through a
  fixed set of angles, plus a manifest of the applied angle per file.

A schema file for the receipt fields and a sha256 manifest of everything
written round it out.
"""

from __future__ import annotations

import hashlib
import random
from pathlib import Path

from . import fonts
from .fsio import atomic_write_bytes, atomic_write_text
from .images import write_pgm, write_png
from .model import canonical_json, words_to_json
from .pdf import generate_pdf
from .preprocess import rotate_image

SKEW_ANGLES = (-10.0, -5.0, -2.0, 0.0, 2.0, 5.0, 10.0)

COMPANY_FIRST = ("ACME", "NORTH", "GOLDEN", "RIVER", "SUMMIT", "BLUE", "CEDAR", "PRIME")
COMPANY_SECOND = (
    "TRADING", "SUPPLIES", "MARKET", "GOODS", "DEPOT", "STORES", "HARDWARE", "GROCERS",
)
STREETS = ("ELM ST", "OAK AVE", "MAIN ST", "HARBOR RD", "MILL LANE", "BAKER ST", "HIGH ST", "PARK AVE")
CITIES = ("SPRINGFIELD", "RIVERTON", "LAKEVIEW", "HILLCREST", "FAIRVIEW", "BRIGHTON", "ASHFORD", "WINFIELD")
# Item names must not collide with the money keyword list.
ITEM_NAMES = (
    "WIDGET", "GADGET", "SPROCKET", "BRACKET", "GRINDER", "KETTLE",
    "LANTERN", "CANDLE", "NOTEBOOK", "PENCIL", "HAMMER", "WRENCH",
)

PDF_WORDS = (
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel",
    "india", "juliet", "kilo", "lima", "mike", "november", "oscar", "papa",
    "quebec", "romeo", "sierra", "tango", "uniform", "victor", "whiskey",
    "xray", "yankee", "zulu", "ledger", "invoice", "packet", "margin",
)

CALIBRATION_ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"

RECEIPT_SCHEMA = {
    "schema_name": "receipt",
    "fields": [
        {"name": "company", "type": "string", "required": True,
         "description": "issuing business name"},
        {"name": "date", "type": "date", "required": True,
         "description": "purchase date"},
        {"name": "address", "type": "address", "required": False,
         "description": "business street address"},
        {"name": "total", "type": "money", "required": True,
         "description": "grand total charged"},
    ],
}


def make_receipt(rng: random.Random) -> tuple[list[str], dict[str, str]]:
    """One receipt as printable lines plus its flat gold values."""
    company = f"{rng.choice(COMPANY_FIRST)} {rng.choice(COMPANY_SECOND)}"
    address = f"{rng.randint(1, 999)} {rng.choice(STREETS)}, {rng.choice(CITIES)}"
    day, month, year = rng.randint(1, 28), rng.randint(1, 12), rng.randint(2019, 2024)
    date_text = f"{day:02d}/{month:02d}/{year}"

    lines = [
        company,
        f"COMPANY: {company}",
        f"ADDRESS: {address}",
        f"DATE: {date_text}",
    ]
    total_cents = 0
    for _ in range(rng.randint(2, 5)):
        qty = rng.randint(1, 9)
        name = rng.choice(ITEM_NAMES)
        cents = rng.randint(100, 9999)
        total_cents += qty * cents
        lines.append(f"{qty} X {name} {cents // 100}.{cents % 100:02d}")
    total_text = f"{total_cents // 100}.{total_cents % 100:02d}"
    lines.append(f"TOTAL: ${total_text}")
    lines.append("THANK YOU")

    gold = {
        "company": company,
        "date": date_text,
        "address": address,
        "total": total_text,
    }
    return lines, gold


def write_receipt_corpus(out_dir: Path, count: int, seed: int) -> list[Path]:
    """PNG + word sidecar + transcript + gold file per receipt."""
    written: list[Path] = []
    for i in range(count):
        rng = random.Random(f"{seed}|receipt|{i}")
        lines, gold = make_receipt(rng)
        stem = f"receipt_{i:03d}"
        image, words = fonts.render_text_image(lines, scale=2)
        png = out_dir / f"{stem}.png"
        atomic_write_bytes(png, write_png(image))
        atomic_write_bytes(out_dir / f"{stem}.words.json", words_to_json(words))
        atomic_write_text(out_dir / f"{stem}.txt", "\n".join(lines))
        atomic_write_bytes(out_dir / f"{stem}.gold.json", canonical_json(gold))
        written += [
            png,
            out_dir / f"{stem}.words.json",
            out_dir / f"{stem}.txt",
            out_dir / f"{stem}.gold.json",
        ]
    return written


def make_pdf_pages(rng: random.Random) -> list[list[str]]:
    pages = []
    for _ in range(rng.randint(1, 3)):
        lines = []
        for _ in range(rng.randint(5, 20)):
            n_words = rng.randint(3, 8)
            lines.append(" ".join(rng.choice(PDF_WORDS) for _ in range(n_words)))
        pages.append(lines)
    return pages


def write_pdf_corpus(out_dir: Path, count: int, seed: int) -> list[Path]:
    """Generated PDF + transcript per document; odd indexes are compressed."""
    written: list[Path] = []
    for i in range(count):
        rng = random.Random(f"{seed}|pdf|{i}")
        pages = make_pdf_pages(rng)
        stem = f"pdf_{i:03d}"
        pdf_path = out_dir / f"{stem}.pdf"
        atomic_write_bytes(pdf_path, generate_pdf(pages, compress=bool(i % 2)))
        transcript = "\n\n".join("\n".join(page) for page in pages)
        atomic_write_text(out_dir / f"{stem}.txt", transcript)
        written += [pdf_path, out_dir / f"{stem}.txt"]
    return written


def make_calibration_lines(rng: random.Random, chars: int, tokens_per_line: int = 20) -> list[str]:
    """Lines of space-separated single-character tokens, ``chars`` total."""
    tokens = [rng.choice(CALIBRATION_ALPHABET) for _ in range(chars)]
    return [
        " ".join(tokens[i : i + tokens_per_line])
        for i in range(0, len(tokens), tokens_per_line)
    ]


def write_calibration_corpus(
    out_dir: Path, pages: int, seed: int, chars_per_page: int = 500
) -> list[Path]:
    """PGM + word sidecar + transcript per calibration page."""
    written: list[Path] = []
    for i in range(pages):
        rng = random.Random(f"{seed}|calibration|{i}")
        lines = make_calibration_lines(rng, chars_per_page)
        stem = f"calib_{i:03d}"
        image, words = fonts.render_text_image(lines, scale=2)
        pgm = out_dir / f"{stem}.pgm"
        atomic_write_bytes(pgm, write_pgm(image))
        atomic_write_bytes(out_dir / f"{stem}.words.json", words_to_json(words))
        atomic_write_text(out_dir / f"{stem}.txt", "\n".join(lines))
        written += [pgm, out_dir / f"{stem}.words.json", out_dir / f"{stem}.txt"]
    return written


def write_skewed_corpus(out_dir: Path, seed: int) -> list[Path]:
    """One receipt rotated through SKEW_ANGLES, plus an angle manifest.

    The wide margin keeps rotated content inside the frame so angle recovery
    sees the full line structure.
    """
    rng = random.Random(f"{seed}|skew")
    lines, _ = make_receipt(rng)
    image, _ = fonts.render_text_image(lines, scale=2, margin=80)

    written: list[Path] = []
    manifest: dict[str, float] = {}
    for angle in SKEW_ANGLES:
        tag = ("m" if angle < 0 else "p") + f"{abs(angle):04.1f}".replace(".", "_")
        name = f"skew_{tag}.png"
        rotated = rotate_image(image, angle)
        atomic_write_bytes(out_dir / name, write_png(rotated))
        manifest[name] = float(angle)
        written.append(out_dir / name)
    manifest_path = out_dir / "angles.json"
    atomic_write_bytes(manifest_path, canonical_json(manifest))
    written.append(manifest_path)
    return written


def generate_fixtures(
    out_dir: str | Path,
    seed: int = 7,
    *,
    receipts: int = 20,
    pdfs: int = 12,
    calibration_pages: int = 21,
    calibration_chars: int = 500,
) -> dict[str, str]:
    """Write every corpus under out_dir; returns {relative path: sha256}.

    Deterministic in (seed, counts): re-running over an existing tree
    rewrites the same bytes.
    """
    out = Path(out_dir)
    written: list[Path] = []
    written += write_receipt_corpus(out / "receipts", receipts, seed)
    written += write_pdf_corpus(out / "pdfs", pdfs, seed)
    written += write_calibration_corpus(
        out / "calibration", calibration_pages, seed, calibration_chars
    )
    written += write_skewed_corpus(out / "skewed", seed)

    schema_path = out / "schema.json"
    atomic_write_bytes(schema_path, canonical_json(RECEIPT_SCHEMA))
    written.append(schema_path)

    digest: dict[str, str] = {}
    for path in written:
        rel = path.relative_to(out).as_posix()
        digest[rel] = hashlib.sha256(path.read_bytes()).hexdigest()
    atomic_write_bytes(out / "fixtures_manifest.json", canonical_json(digest))
    return digest
