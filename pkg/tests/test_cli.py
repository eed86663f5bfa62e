"""End-to-end tests for the command line interface."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from docmill.cli import main
from docmill.fixtures import RECEIPT_SCHEMA, write_receipt_corpus
from docmill.kv import extraction_from_json, normalize_money, normalize_string
from docmill.pdf import generate_pdf

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _write_config(tmp_path: Path, body: str) -> Path:
    path = tmp_path / "pipeline.toml"
    path.write_text(body, encoding="utf-8")
    return path


def _write_schema(tmp_path: Path) -> Path:
    path = tmp_path / "receipt_schema.json"
    path.write_text(json.dumps(RECEIPT_SCHEMA), encoding="utf-8")
    return path


_CLEAN_ENGINE = """
[[engines]]
name = "clean"
kind = "mock"
mock_char_error_rate = 0.0
mock_seed = 3
"""

_TWO_ENGINES = """
[[engines]]
name = "rough"
kind = "mock"
mock_char_error_rate = 0.3
mock_seed = 5

[[engines]]
name = "clean"
kind = "mock"
mock_char_error_rate = 0.0
mock_seed = 3
"""


# --- gen-fixtures -----------------------------------------------------------------


def test_gen_fixtures_writes_the_corpora(tmp_path: Path, capsys) -> None:
    out = tmp_path / "fixtures"
    rc = main(
        [
            "gen-fixtures",
            "--out",
            str(out),
            "--count",
            "2",
            "--pdfs",
            "1",
            "--calibration-chars",
            "500",
        ]
    )
    assert rc == 0
    assert (out / "receipts" / "receipt_000.png").exists()
    assert (out / "pdfs" / "pdf_000.pdf").exists()
    assert (out / "calibration" / "calib_000.pgm").exists()
    assert (out / "skewed" / "angles.json").exists()
    assert (out / "fixtures_manifest.json").exists()
    assert "wrote" in capsys.readouterr().out


# --- extract ----------------------------------------------------------------------


def test_extract_writes_documents_and_fields(tmp_path: Path, capsys) -> None:
    src = tmp_path / "src"
    src.mkdir()
    write_receipt_corpus(src, count=2, seed=5)
    schema = _write_schema(tmp_path)
    config = _write_config(tmp_path, _CLEAN_ENGINE + f'\n[schema]\npath = "{schema.name}"\n')
    out = tmp_path / "out"

    rc = main(["--config", str(config), "extract", str(src), "--out", str(out)])
    assert rc == 0
    for stem in ("receipt_000", "receipt_001"):
        assert (out / f"{stem}.doc.json").exists()
        assert (out / f"{stem}.kv.json").exists()
    assert "extracted 2, needs-scan 0, failed 0" in capsys.readouterr().out

    gold = json.loads((src / "receipt_000.gold.json").read_text("utf-8"))
    result = extraction_from_json((out / "receipt_000.kv.json").read_bytes())
    normalized = result.normalized_map()
    assert normalized["total"] == str(normalize_money(gold["total"]))
    assert normalized["company"] == normalize_string(gold["company"])
    assert set(normalized) == {"company", "date", "address", "total"}


def test_extract_handles_pdfs_without_any_config(tmp_path: Path, capsys) -> None:
    path = tmp_path / "letter.pdf"
    path.write_bytes(generate_pdf([["dear committee", "regards"]]))
    out = tmp_path / "out"
    rc = main(["extract", str(path), "--out", str(out)])
    assert rc == 0
    assert (out / "letter.doc.json").exists()
    assert not (out / "letter.kv.json").exists()  # no schema configured
    assert "extracted 1" in capsys.readouterr().out


def test_extract_keeps_going_past_broken_files(tmp_path: Path, capsys) -> None:
    good = tmp_path / "good.pdf"
    good.write_bytes(generate_pdf([["fine"]]))
    bad = tmp_path / "bad.pdf"
    bad.write_bytes(b"not remotely a pdf")
    out = tmp_path / "out"

    rc = main(["extract", str(bad), str(good), "--out", str(out)])
    assert rc == 1
    assert (out / "good.doc.json").exists()
    captured = capsys.readouterr()
    assert "failed:" in captured.err
    assert "extracted 1, needs-scan 0, failed 1" in captured.out


def test_extract_without_inputs_is_a_usage_error(tmp_path: Path, capsys) -> None:
    empty = tmp_path / "empty"
    empty.mkdir()
    rc = main(["extract", str(empty), "--out", str(tmp_path / "out")])
    assert rc == 2
    assert "no input files" in capsys.readouterr().err


def test_extract_with_an_unknown_engine_is_a_usage_error(tmp_path: Path, capsys) -> None:
    config = _write_config(tmp_path, _CLEAN_ENGINE)
    page = tmp_path / "page.png"
    page.write_bytes(PNG_MAGIC)  # never read; engine lookup fails first
    rc = main(
        ["--config", str(config), "extract", str(page), "--engine", "slow", "--out", str(tmp_path / "o")]
    )
    assert rc == 2
    assert "slow" in capsys.readouterr().err


def test_a_missing_config_file_is_a_usage_error(tmp_path: Path, capsys) -> None:
    rc = main(
        ["--config", str(tmp_path / "absent.toml"), "extract", "x.pdf", "--out", str(tmp_path)]
    )
    assert rc == 2
    assert "error:" in capsys.readouterr().err


# --- evaluate ---------------------------------------------------------------------


def _extract_receipts(tmp_path: Path) -> tuple[Path, Path, Path]:
    """Corpus + config + predictions shared by the evaluate tests."""
    src = tmp_path / "src"
    src.mkdir()
    write_receipt_corpus(src, count=2, seed=9)
    schema = _write_schema(tmp_path)
    config = _write_config(tmp_path, _CLEAN_ENGINE + f'\n[schema]\npath = "{schema.name}"\n')
    pred = tmp_path / "pred"
    rc = main(["--config", str(config), "extract", str(src), "--out", str(pred)])
    assert rc == 0
    return src, config, pred


def test_evaluate_writes_report_and_figures(tmp_path: Path, capsys) -> None:
    src, config, pred = _extract_receipts(tmp_path)
    out = tmp_path / "report"
    rc = main(
        [
            "--config",
            str(config),
            "evaluate",
            "--pred",
            str(pred),
            "--gold",
            str(src),
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    report = (out / "report.csv").read_text("utf-8")
    lines = report.splitlines()
    assert lines[0] == "engine,docs,words,cer,wer,word_accuracy"
    assert lines[1].startswith("clean,2,")
    assert "field,precision,recall,f1,support" in lines
    assert (out / "engine_accuracy.png").read_bytes()[:8] == PNG_MAGIC
    assert (out / "confidence_by_provenance.png").read_bytes()[:8] == PNG_MAGIC
    assert "scored 2 transcripts and 2 field files" in capsys.readouterr().out


def test_evaluate_emits_markdown_when_asked(tmp_path: Path) -> None:
    src, config, pred = _extract_receipts(tmp_path)
    out = tmp_path / "report"
    rc = main(
        [
            "--config",
            str(config),
            "evaluate",
            "--pred",
            str(pred),
            "--gold",
            str(src),
            "--out",
            str(out),
            "--format",
            "markdown",
        ]
    )
    assert rc == 0
    text = (out / "report.md").read_text("utf-8")
    assert text.startswith("| engine |")
    assert "| --- |" in text


def test_evaluate_warns_about_unpaired_files(tmp_path: Path, capsys) -> None:
    src, config, pred = _extract_receipts(tmp_path)
    (src / "receipt_001.txt").unlink()  # leaves receipt_001.doc.json unpaired
    out = tmp_path / "report"
    rc = main(
        ["--config", str(config), "evaluate", "--pred", str(pred), "--gold", str(src), "--out", str(out)]
    )
    assert rc == 0
    captured = capsys.readouterr()
    assert "warning: unpaired: receipt_001.doc.json" in captured.out
    assert "scored 1 transcripts and 2 field files" in captured.out


def test_evaluate_with_nothing_to_score_fails(tmp_path: Path, capsys) -> None:
    pred = tmp_path / "pred"
    gold = tmp_path / "gold"
    pred.mkdir()
    gold.mkdir()
    rc = main(["evaluate", "--pred", str(pred), "--gold", str(gold), "--out", str(tmp_path / "o")])
    assert rc == 1
    assert "nothing to score" in capsys.readouterr().err


def test_evaluate_requires_real_directories(tmp_path: Path, capsys) -> None:
    rc = main(
        [
            "evaluate",
            "--pred",
            str(tmp_path / "nope"),
            "--gold",
            str(tmp_path / "nope"),
            "--out",
            str(tmp_path / "o"),
        ]
    )
    assert rc == 2
    assert "must be directories" in capsys.readouterr().err


# --- compare ----------------------------------------------------------------------


def test_compare_ranks_engines_by_accuracy(tmp_path: Path, capsys) -> None:
    src = tmp_path / "scans"
    src.mkdir()
    write_receipt_corpus(src, count=2, seed=13)
    config = _write_config(tmp_path, _TWO_ENGINES)
    out = tmp_path / "cmp"

    rc = main(["--config", str(config), "compare", str(src), "--out", str(out)])
    assert rc == 0
    lines = (out / "comparison.csv").read_text("utf-8").splitlines()
    assert lines[0] == "engine,docs,words,cer,wer,word_accuracy"
    assert lines[1].split(",")[0] == "clean"  # most accurate first
    assert lines[2].split(",")[0] == "rough"
    assert (out / "engine_accuracy.png").read_bytes()[:8] == PNG_MAGIC
    assert "compared 2 engines over 2 images" in capsys.readouterr().out


def test_compare_honors_an_engine_subset(tmp_path: Path) -> None:
    src = tmp_path / "scans"
    src.mkdir()
    write_receipt_corpus(src, count=1, seed=13)
    config = _write_config(tmp_path, _TWO_ENGINES)
    out = tmp_path / "cmp"
    rc = main(
        ["--config", str(config), "compare", str(src), "--engines", "rough", "--out", str(out)]
    )
    assert rc == 0
    lines = (out / "comparison.csv").read_text("utf-8").splitlines()
    assert lines[1].split(",")[0] == "rough"
    assert lines[2] == ""  # only one engine row before the field table


def test_compare_without_engines_is_a_usage_error(tmp_path: Path, capsys) -> None:
    src = tmp_path / "scans"
    src.mkdir()
    write_receipt_corpus(src, count=1, seed=13)
    rc = main(["compare", str(src), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "no engines configured" in capsys.readouterr().err


def test_compare_without_images_is_a_usage_error(tmp_path: Path, capsys) -> None:
    empty = tmp_path / "empty"
    empty.mkdir()
    config = _write_config(tmp_path, _TWO_ENGINES)
    rc = main(["--config", str(config), "compare", str(empty), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "no input images" in capsys.readouterr().err


def test_compare_skips_images_without_transcripts(tmp_path: Path, capsys) -> None:
    src = tmp_path / "scans"
    src.mkdir()
    write_receipt_corpus(src, count=1, seed=13)
    (src / "receipt_000.txt").unlink()
    config = _write_config(tmp_path, _TWO_ENGINES)
    rc = main(["--config", str(config), "compare", str(src), "--out", str(tmp_path / "o")])
    assert rc == 1
    captured = capsys.readouterr()
    assert "no transcript for receipt_000.png" in captured.out
    assert "nothing to score" in captured.err


# --- determinism across invocations -------------------------------------------------


def test_extract_twice_produces_identical_bytes(tmp_path: Path) -> None:
    src = tmp_path / "src"
    src.mkdir()
    write_receipt_corpus(src, count=1, seed=21)
    schema = _write_schema(tmp_path)
    config = _write_config(tmp_path, _CLEAN_ENGINE + f'\n[schema]\npath = "{schema.name}"\n')

    outputs = []
    for run in ("a", "b"):
        out = tmp_path / run
        assert main(["--config", str(config), "extract", str(src), "--out", str(out)]) == 0
        outputs.append(
            {p.name: p.read_bytes() for p in sorted(out.iterdir())}
        )
    assert outputs[0] == outputs[1]
