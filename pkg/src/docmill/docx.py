"""DOCX paragraph extraction: unzip, read word/document.xml, walk the body.

Paragraph text is the concatenation of its w:t runs; empty paragraphs are
preserved as empty strings. Tables are flattened row-major, one list entry per
row, cell texts joined by tabs (a cell's own paragraphs joined by a single
space). DOCX carries no page geometry, so document assembly goes through
model.synthetic_document.
"""

from __future__ import annotations

import io
import zipfile
import xml.etree.ElementTree as ET

from .errors import MissingDocumentPart, NotAZip, XmlMalformed
from .model import DocumentRecord, synthetic_document

W_NS = {"w": "http://schemas.openxmlformats.org/wordprocessingml/2006/main"}
DOCUMENT_PART = "word/document.xml"


def _paragraph_text(par: ET.Element) -> str:
    return "".join(t.text or "" for t in par.findall(".//w:t", W_NS))


def _cell_text(cell: ET.Element) -> str:
    return " ".join(_paragraph_text(p) for p in cell.findall("w:p", W_NS))


def extract_docx(data: bytes) -> list[str]:
    """Paragraph strings in document order; table rows flattened in place."""
    try:
        archive = zipfile.ZipFile(io.BytesIO(data))
    except zipfile.BadZipFile as exc:
        raise NotAZip(str(exc)) from exc

    try:
        xml_data = archive.read(DOCUMENT_PART)
    except KeyError as exc:
        raise MissingDocumentPart(f"{DOCUMENT_PART} not in archive") from exc

    try:
        root = ET.fromstring(xml_data)
    except ET.ParseError as exc:
        raise XmlMalformed(str(exc)) from exc

    body = root.find("w:body", W_NS)
    if body is None:
        return []

    paragraphs: list[str] = []
    for child in body:
        tag = child.tag.split("}")[-1]
        if tag == "p":
            paragraphs.append(_paragraph_text(child))
        elif tag == "tbl":
            for row in child.findall("w:tr", W_NS):
                cells = [_cell_text(c) for c in row.findall("w:tc", W_NS)]
                paragraphs.append("\t".join(cells))
    return paragraphs


def extract_docx_document(data: bytes, doc_id: str, source_path: str) -> DocumentRecord:
    """DOCX bytes to a digital DocumentRecord with synthetic geometry."""
    paragraphs = extract_docx(data)
    # tabs separate table cells in the flat text; geometry treats them as spaces
    flat = [p.replace("\t", " ") for p in paragraphs]
    return synthetic_document(flat, doc_id, source_path)
