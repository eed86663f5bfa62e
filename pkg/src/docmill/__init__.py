"""docmill: batch document digitization and schema-driven field extraction.

Turns scanned page images, digital PDFs, and DOCX files into one structured
document model, recognizes text on scans through pluggable engines, pulls
schema-defined key-value fields out of the text (model-assisted with a
deterministic rule fallback), and scores the results against gold data.
"""

from .model import (
    PIPELINE_VERSION,
    BoundingBox,
    Word,
    Line,
    Block,
    Page,
    DocumentRecord,
    flatten_text,
    parse_document,
    serialize_document,
)
from .engines import EngineSpec, RecognizedPage, recognize
from .kv import (
    ExtractionResult,
    FieldDef,
    FieldExtraction,
    FieldSchema,
    ModelClientSpec,
    extract_kv,
    load_field_schema,
)
from .metrics import cer, levenshtein, match_fields, micro_f1, wer, word_accuracy
from .pdf import extract_pdf_document, generate_pdf
from .docx import extract_docx_document
from .pipeline import preprocess_scan, process_file, scan_to_document
from .config import PipelineConfig, load_config

__version__ = PIPELINE_VERSION

__all__ = [
    "PIPELINE_VERSION",
    "__version__",
    "BoundingBox",
    "Word",
    "Line",
    "Block",
    "Page",
    "DocumentRecord",
    "flatten_text",
    "parse_document",
    "serialize_document",
    "EngineSpec",
    "RecognizedPage",
    "recognize",
    "ExtractionResult",
    "FieldDef",
    "FieldExtraction",
    "FieldSchema",
    "ModelClientSpec",
    "extract_kv",
    "load_field_schema",
    "cer",
    "levenshtein",
    "match_fields",
    "micro_f1",
    "wer",
    "word_accuracy",
    "extract_pdf_document",
    "generate_pdf",
    "extract_docx_document",
    "preprocess_scan",
    "process_file",
    "scan_to_document",
    "PipelineConfig",
    "load_config",
]
