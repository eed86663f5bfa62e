"""Tests for DOCX paragraph and table extraction."""

from __future__ import annotations

import io
import zipfile

import pytest

from docmill.docx import extract_docx, extract_docx_document
from docmill.errors import MissingDocumentPart, NotAZip, XmlMalformed
from docmill.model import flatten_text

_W = "http://schemas.openxmlformats.org/wordprocessingml/2006/main"


def _document_xml(body: str) -> str:
    return (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>'
        f'<w:document xmlns:w="{_W}"><w:body>{body}</w:body></w:document>'
    )


def _zip_with(parts: dict[str, str]) -> bytes:
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w") as archive:
        for name, content in parts.items():
            archive.writestr(name, content)
    return buffer.getvalue()


def _docx(body: str) -> bytes:
    return _zip_with({"word/document.xml": _document_xml(body)})


def _p(text: str) -> str:
    return f"<w:p><w:r><w:t>{text}</w:t></w:r></w:p>"


def test_paragraphs_in_document_order() -> None:
    data = _docx(_p("First paragraph.") + _p("Second paragraph."))
    assert extract_docx(data) == ["First paragraph.", "Second paragraph."]


def test_paragraph_concatenates_multiple_runs() -> None:
    body = "<w:p><w:r><w:t>Hel</w:t></w:r><w:r><w:t>lo</w:t></w:r></w:p>"
    assert extract_docx(_docx(body)) == ["Hello"]


def test_empty_paragraph_preserved_as_empty_string() -> None:
    assert extract_docx(_docx(_p("a") + "<w:p/>" + _p("b"))) == ["a", "", "b"]


def test_run_without_text_element_contributes_nothing() -> None:
    body = "<w:p><w:r><w:t>x</w:t></w:r><w:r><w:rPr/></w:r></w:p>"
    assert extract_docx(_docx(body)) == ["x"]


def test_empty_text_element_is_empty_string() -> None:
    assert extract_docx(_docx("<w:p><w:r><w:t/></w:r></w:p>")) == [""]


def test_table_rows_flatten_row_major_with_tab_joined_cells() -> None:
    table = (
        "<w:tbl>"
        f"<w:tr><w:tc>{_p('r1c1')}</w:tc><w:tc>{_p('r1c2')}</w:tc></w:tr>"
        f"<w:tr><w:tc>{_p('r2c1')}</w:tc><w:tc>{_p('r2c2')}</w:tc></w:tr>"
        "</w:tbl>"
    )
    data = _docx(_p("before") + table + _p("after"))
    assert extract_docx(data) == ["before", "r1c1\tr1c2", "r2c1\tr2c2", "after"]


def test_multi_paragraph_cell_joins_with_a_space() -> None:
    table = f"<w:tbl><w:tr><w:tc>{_p('top')}{_p('bottom')}</w:tc></w:tr></w:tbl>"
    assert extract_docx(_docx(table)) == ["top bottom"]


def test_empty_body_yields_no_paragraphs() -> None:
    assert extract_docx(_docx("")) == []


def test_not_a_zip() -> None:
    with pytest.raises(NotAZip):
        extract_docx(b"this is not a zip archive")


def test_missing_document_part() -> None:
    data = _zip_with({"word/styles.xml": "<x/>"})
    with pytest.raises(MissingDocumentPart):
        extract_docx(data)


def test_malformed_xml() -> None:
    data = _zip_with({"word/document.xml": "<w:document><unclosed"})
    with pytest.raises(XmlMalformed):
        extract_docx(data)


def test_document_assembly_uses_synthetic_geometry() -> None:
    data = _docx(_p("alpha beta") + _p("gamma"))
    doc = extract_docx_document(data, "memo-1", "memo-1.docx")
    assert doc.doc_id == "memo-1"
    assert doc.provenance == "digital"
    assert doc.engine_name is None
    assert flatten_text(doc) == "alpha beta\n\ngamma"
    words = [w for b in doc.pages[0].blocks for ln in b.lines for w in ln.words]
    assert all(w.confidence == 1.0 for w in words)
    assert all(w.bbox.unit == "point" for w in words)
    page = doc.pages[0]
    assert all(
        0 <= w.bbox.x0 < w.bbox.x1 <= page.width and 0 <= w.bbox.y0 < w.bbox.y1 <= page.height
        for w in words
    )


def test_document_assembly_turns_table_tabs_into_spaces() -> None:
    table = f"<w:tbl><w:tr><w:tc>{_p('k')}</w:tc><w:tc>{_p('v')}</w:tc></w:tr></w:tbl>"
    doc = extract_docx_document(_docx(table), "t", "t.docx")
    assert flatten_text(doc) == "k v"
