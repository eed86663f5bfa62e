"""Command line front door.

    docmill extract      inputs -> .doc.json (+ .kv.json when a schema is set)
    docmill evaluate     predictions vs gold -> report tables + figures
    docmill compare      run several engines over scans, rank by accuracy
    docmill gen-fixtures write the seeded synthetic corpora

Exit codes: 0 success, 1 at least one document failed (or nothing to score),
2 unusable configuration or arguments.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Iterable, Sequence

from .config import PipelineConfig, load_config
from .engines import EngineSpec, recognize
from .errors import ConfigError, DocmillError, MissingCredential
from .fixtures import generate_fixtures
from .fsio import atomic_write_bytes, atomic_write_text
from .gold import FLAT_KEY_TYPES, load_funsd_like, load_sroie_like
from .images import IMAGE_SUFFIXES, read_image
from .kv import (
    FieldSchema,
    extract_kv,
    extraction_from_json,
    extraction_to_json,
    load_field_schema,
    normalize_field,
    normalize_string,
)
from .metrics import FieldCounts, levenshtein, match_fields, merge_counts
from .model import flatten_text, parse_document, serialize_document, words_from_json
from .pipeline import (
    STATUS_FAILED,
    STATUS_NEEDS_SCAN,
    STATUS_OK,
    preprocess_scan,
    process_file,
    scan_to_document,
)
from .report import (
    EngineRow,
    EvalReport,
    build_field_rows,
    emit_report,
    render_accuracy_figure,
    render_confidence_figure,
)

logger = logging.getLogger(__name__)

KNOWN_SUFFIXES = IMAGE_SUFFIXES + (".pdf", ".docx")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="docmill",
        description="Batch document digitization and field extraction.",
    )
    parser.add_argument("--config", help="TOML configuration file")
    parser.add_argument("--jobs", type=int, help="worker threads (default: CPU count)")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="convert inputs to structured documents")
    p.add_argument("inputs", nargs="+", help="files or directories")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--engine", help="engine name for scanned images (default: first configured)")
    p.add_argument("--schema", help="field schema JSON (overrides config)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("evaluate", help="score predictions against gold files")
    p.add_argument("--pred", required=True, help="directory of .doc.json/.kv.json files")
    p.add_argument("--gold", required=True, help="directory of .txt/.gold.json/.funsd.json files")
    p.add_argument("--out", required=True, help="output directory for report and figures")
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.add_argument("--schema", help="field schema JSON (overrides config)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="run several engines over the same scans")
    p.add_argument("inputs", nargs="+", help="image files or directories")
    p.add_argument("--out", required=True, help="output directory for table and figure")
    p.add_argument("--engines", help="comma-separated engine names (default: all configured)")
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gen-fixtures", help="write the seeded synthetic corpora")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--count", type=int, default=20, help="number of receipts")
    p.add_argument("--pdfs", type=int, default=12, help="number of generated PDFs")
    p.add_argument(
        "--calibration-chars",
        type=int,
        default=10_500,
        help="total characters across the calibration corpus",
    )
    p.set_defaults(func=cmd_gen_fixtures)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_config(args.config) if args.config else PipelineConfig()
        return args.func(args, config)
    except (ConfigError, MissingCredential) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


# --- input collection -------------------------------------------------------------


def _collect_inputs(raw: Iterable[str], suffixes: tuple[str, ...]) -> list[Path]:
    paths: list[Path] = []
    for item in raw:
        path = Path(item)
        if path.is_dir():
            paths.extend(
                p for p in sorted(path.iterdir()) if p.suffix.lower() in suffixes
            )
        else:
            paths.append(path)
    return sorted(set(paths))


def _load_schema(args, config: PipelineConfig) -> FieldSchema | None:
    schema_path = getattr(args, "schema", None) or config.schema_path
    if not schema_path:
        return None
    try:
        return load_field_schema(Path(schema_path).read_bytes())
    except (OSError, DocmillError) as exc:
        raise ConfigError(f"cannot load schema {schema_path}: {exc}") from exc


def _pick_engine(args, config: PipelineConfig) -> EngineSpec | None:
    name = getattr(args, "engine", None)
    if name:
        return config.engine_by_name(name)
    return config.engines[0] if config.engines else None


def _jobs(args, config: PipelineConfig) -> int:
    return args.jobs or config.jobs or os.cpu_count() or 1


# --- extract ---------------------------------------------------------------------


def cmd_extract(args, config: PipelineConfig) -> int:
    inputs = _collect_inputs(args.inputs, KNOWN_SUFFIXES)
    if not inputs:
        print("error: no input files", file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    engine = _pick_engine(args, config)
    schema = _load_schema(args, config)

    with ThreadPoolExecutor(max_workers=_jobs(args, config)) as pool:
        outcomes = list(
            pool.map(
                lambda p: process_file(
                    p, engine, run_deskew=config.deskew, run_denoise=config.denoise
                ),
                inputs,
            )
        )

    failed = 0
    extracted = 0
    needs_scan = 0
    for outcome in sorted(outcomes, key=lambda o: o.path):
        if outcome.status == STATUS_OK:
            doc = outcome.doc
            atomic_write_bytes(out_dir / f"{doc.doc_id}.doc.json", serialize_document(doc))
            if schema is not None:
                result = extract_kv(schema, doc, config.model)
                atomic_write_bytes(
                    out_dir / f"{doc.doc_id}.kv.json", extraction_to_json(result)
                )
            extracted += 1
        elif outcome.status == STATUS_NEEDS_SCAN:
            needs_scan += 1
            print(f"needs-scan: {outcome.path} ({outcome.error})")
        else:
            failed += 1
            print(f"failed: {outcome.path}: {outcome.error}", file=sys.stderr)

    print(f"extracted {extracted}, needs-scan {needs_scan}, failed {failed}")
    return 1 if failed else 0


# --- evaluate ---------------------------------------------------------------------


def _stems(directory: Path, suffix: str) -> dict[str, Path]:
    return {
        p.name[: -len(suffix)]: p
        for p in sorted(directory.glob(f"*{suffix}"))
    }


def _gold_types(schema: FieldSchema | None) -> dict[str, str]:
    types = dict(FLAT_KEY_TYPES)
    if schema is not None:
        types.update({f.name: f.semantic_type for f in schema.fields})
    return types


def _normalize_gold(value: str, semantic_type: str) -> str:
    try:
        return normalize_field(value, semantic_type)
    except DocmillError:
        return value.casefold()


def cmd_evaluate(args, config: PipelineConfig) -> int:
    pred_dir, gold_dir, out_dir = Path(args.pred), Path(args.gold), Path(args.out)
    if not pred_dir.is_dir() or not gold_dir.is_dir():
        print("error: --pred and --gold must be directories", file=sys.stderr)
        return 2
    out_dir.mkdir(parents=True, exist_ok=True)
    schema = _load_schema(args, config)

    docs = _stems(pred_dir, ".doc.json")
    kvs = _stems(pred_dir, ".kv.json")
    texts = _stems(gold_dir, ".txt")
    flats = _stems(gold_dir, ".gold.json")
    forms = _stems(gold_dir, ".funsd.json")

    text_pairs = sorted(set(docs) & set(texts))
    kv_pairs = sorted(set(kvs) & (set(flats) | set(forms)))
    for stem in sorted(set(docs) ^ set(texts)):
        side = docs.get(stem) or texts.get(stem)
        print(f"warning: unpaired: {side.name}")
    for stem in sorted(set(kvs) - set(flats) - set(forms)):
        print(f"warning: unpaired: {kvs[stem].name}")
    for stem in sorted((set(flats) | set(forms)) - set(kvs)):
        side = flats.get(stem) or forms.get(stem)
        print(f"warning: unpaired: {side.name}")
    if not text_pairs and not kv_pairs:
        print("error: nothing to score", file=sys.stderr)
        return 1

    # Text recognition, micro-aggregated per engine label.
    per_engine: dict[str, dict[str, float]] = {}
    provenance_by_stem: dict[str, str] = {}
    for stem in text_pairs:
        doc = parse_document(docs[stem].read_bytes())
        provenance_by_stem[stem] = doc.provenance
        ref = texts[stem].read_text(encoding="utf-8")
        hyp = flatten_text(doc)
        if not ref.strip():
            print(f"warning: empty reference: {texts[stem].name}")
            continue
        label = doc.engine_name or "digital"
        agg = per_engine.setdefault(
            label, {"docs": 0, "char_dist": 0, "char_len": 0, "word_dist": 0, "word_len": 0}
        )
        agg["docs"] += 1
        char = levenshtein(ref, hyp)
        word = levenshtein(ref.split(), hyp.split())
        agg["char_dist"] += char.distance
        agg["char_len"] += char.ref_len
        agg["word_dist"] += word.distance
        agg["word_len"] += word.ref_len

    engine_rows = []
    for label in sorted(per_engine):
        agg = per_engine[label]
        cer_value = agg["char_dist"] / agg["char_len"] if agg["char_len"] else 0.0
        wer_value = agg["word_dist"] / agg["word_len"] if agg["word_len"] else 0.0
        engine_rows.append(
            EngineRow(
                engine=label,
                docs=int(agg["docs"]),
                words=int(agg["word_len"]),
                cer=cer_value,
                wer=wer_value,
                word_accuracy=max(0.0, 1.0 - wer_value),
            )
        )

    # Field extraction, pooled across documents.
    gold_types = _gold_types(schema)
    pooled: dict[str, FieldCounts] = {}
    confidence_sums: dict[str, list[float]] = {}
    for stem in kv_pairs:
        result = extraction_from_json(kvs[stem].read_bytes())
        if stem in flats:
            gold_raw = load_sroie_like(flats[stem].read_bytes())
            gold_norm = {
                k: _normalize_gold(v, gold_types.get(k, "string"))
                for k, v in gold_raw.items()
            }
        else:
            gold_raw, _ = load_funsd_like(forms[stem].read_bytes())
            gold_norm = {k: normalize_string(v) for k, v in gold_raw.items()}
        pred_norm = result.normalized_map()
        keys = sorted(set(pred_norm) | set(gold_norm))
        aligned_pred = {k: pred_norm.get(k) for k in keys}
        aligned_gold = {k: gold_norm.get(k) for k in keys}
        merge_counts(pooled, match_fields(aligned_pred, aligned_gold))

        provenance = provenance_by_stem.get(stem)
        if provenance:
            aligned = [
                fe.confidence
                for fe in result.fields.values()
                if fe.source != "absent"
            ]
            if aligned:
                confidence_sums.setdefault(provenance, []).extend(aligned)

    field_rows, micro = build_field_rows(pooled)
    report = EvalReport(tuple(engine_rows), field_rows, micro)

    suffix = "md" if args.format == "markdown" else "csv"
    report_path = out_dir / f"report.{suffix}"
    atomic_write_text(report_path, emit_report(report, fmt=args.format, engine_sort="name"))
    written = [report_path.name]

    if engine_rows:
        figure = out_dir / "engine_accuracy.png"
        render_accuracy_figure(engine_rows, figure)
        written.append(figure.name)
    if confidence_sums:
        means = {
            prov: sum(values) / len(values)
            for prov, values in confidence_sums.items()
        }
        figure = out_dir / "confidence_by_provenance.png"
        render_confidence_figure(means, figure)
        written.append(figure.name)

    print(
        f"scored {len(text_pairs)} transcripts and {len(kv_pairs)} field files; "
        f"wrote {', '.join(written)}"
    )
    return 0


# --- compare ----------------------------------------------------------------------


def cmd_compare(args, config: PipelineConfig) -> int:
    inputs = _collect_inputs(args.inputs, IMAGE_SUFFIXES)
    if not inputs:
        print("error: no input images", file=sys.stderr)
        return 2
    if args.engines:
        names = [n.strip() for n in args.engines.split(",") if n.strip()]
        specs = [config.engine_by_name(n) for n in names]
    else:
        specs = list(config.engines)
    if not specs:
        raise ConfigError("no engines configured to compare")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    per_engine = {
        spec.name: {"docs": 0, "char_dist": 0, "char_len": 0, "word_dist": 0, "word_len": 0}
        for spec in specs
    }
    scored_images = 0
    for path in inputs:
        ref_path = path.with_suffix(".txt")
        if not ref_path.exists():
            print(f"warning: no transcript for {path.name}, skipped")
            continue
        ref = ref_path.read_text(encoding="utf-8")
        if not ref.strip():
            print(f"warning: empty transcript for {path.name}, skipped")
            continue
        sidecar = path.with_suffix(".words.json")
        gold_words = words_from_json(sidecar.read_bytes()) if sidecar.exists() else None

        image = read_image(path)
        pre = preprocess_scan(image, run_deskew=config.deskew, run_denoise=config.denoise)
        scored_images += 1
        for spec in specs:
            recognized = recognize(spec, pre.binary, gold_words=gold_words)
            doc = scan_to_document(
                recognized.words,
                float(pre.binary.width),
                float(pre.binary.height),
                doc_id=path.stem,
                source_path=path.name,
                engine_name=spec.name,
            )
            hyp = flatten_text(doc)
            agg = per_engine[spec.name]
            char = levenshtein(ref, hyp)
            word = levenshtein(ref.split(), hyp.split())
            agg["docs"] += 1
            agg["char_dist"] += char.distance
            agg["char_len"] += char.ref_len
            agg["word_dist"] += word.distance
            agg["word_len"] += word.ref_len

    if not scored_images:
        print("error: nothing to score", file=sys.stderr)
        return 1

    rows = []
    for spec in specs:
        agg = per_engine[spec.name]
        cer_value = agg["char_dist"] / agg["char_len"] if agg["char_len"] else 0.0
        wer_value = agg["word_dist"] / agg["word_len"] if agg["word_len"] else 0.0
        rows.append(
            EngineRow(
                engine=spec.name,
                docs=int(agg["docs"]),
                words=int(agg["word_len"]),
                cer=cer_value,
                wer=wer_value,
                word_accuracy=max(0.0, 1.0 - wer_value),
            )
        )

    report = EvalReport(tuple(rows), (), None)
    suffix = "md" if args.format == "markdown" else "csv"
    table_path = out_dir / f"comparison.{suffix}"
    atomic_write_text(
        table_path, emit_report(report, fmt=args.format, engine_sort="accuracy")
    )
    figure_path = out_dir / "engine_accuracy.png"
    render_accuracy_figure(rows, figure_path)
    print(
        f"compared {len(specs)} engines over {scored_images} images; "
        f"wrote {table_path.name}, {figure_path.name}"
    )
    return 0


# --- gen-fixtures -----------------------------------------------------------------


def cmd_gen_fixtures(args, config: PipelineConfig) -> int:
    chars_per_page = 500
    pages = max(1, -(-args.calibration_chars // chars_per_page))
    digest = generate_fixtures(
        args.out,
        seed=args.seed,
        receipts=args.count,
        pdfs=args.pdfs,
        calibration_pages=pages,
        calibration_chars=chars_per_page,
    )
    print(f"wrote {len(digest)} fixture files under {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
