"""Schema-driven key-value extraction.

Two routes fill fields: a prompted model endpoint (when configured) and
deterministic rules (always available, and the fallback for every field the
model leaves empty or garbles). Both routes land in the same ExtractionResult
shape, are normalized per semantic type, and get confidence annotated by
aligning extracted values back onto document words.

The model is never trusted blindly: its reply must contain one JSON object,
unknown keys are dropped with a warning, and one repair re-prompt is attempted
before falling back to rules. Only a missing credential propagates; transport
and parse failures degrade to the rule route.
"""

from __future__ import annotations

import json
import logging
import os
import re
import string as _string
import time
from dataclasses import dataclass, field, replace
from decimal import Decimal, InvalidOperation, ROUND_HALF_UP
from typing import Any, Callable, Mapping, Sequence

import requests

from .errors import (
    EmptyDocument,
    HttpError,
    InvariantViolation,
    JsonMalformed,
    MissingCredential,
    MissingField,
    NoJsonFound,
    RequiredFieldMissing,
    RetriesExhausted,
    Timeout,
    UnparseableValue,
)
from .model import DocumentRecord, canonical_json, flatten_text

logger = logging.getLogger(__name__)

SEMANTIC_TYPES = ("string", "date", "money", "address", "person_name")
SOURCES = ("model", "rule", "absent")

PROMPT_TEXT_BUDGET = 12_000
TRUNCATION_NOTE = "[document truncated after {n} characters]"
DOC_BEGIN = "-----BEGIN DOCUMENT-----"
DOC_END = "-----END DOCUMENT-----"

MONEY_KEYWORDS = ("total", "amount", "balance", "due")

_FIELD_NAME_RE = re.compile(r"^[a-z][a-z0-9_]*$")


@dataclass(frozen=True)
class FieldDef:
    name: str
    semantic_type: str
    required: bool = False
    description: str = ""

    def __post_init__(self):
        if not _FIELD_NAME_RE.match(self.name or ""):
            raise InvariantViolation(
                f"field name {self.name!r} must be lowercase snake case"
            )
        if self.semantic_type not in SEMANTIC_TYPES:
            raise InvariantViolation(
                f"field {self.name!r}: unknown semantic type {self.semantic_type!r}"
            )


@dataclass(frozen=True)
class FieldSchema:
    schema_name: str
    fields: tuple[FieldDef, ...]

    def __post_init__(self):
        if not self.schema_name:
            raise InvariantViolation("schema_name must be non-empty")
        object.__setattr__(self, "fields", tuple(self.fields))
        if not self.fields:
            raise InvariantViolation("schema needs at least one field")
        names = [f.name for f in self.fields]
        if len(set(names)) != len(names):
            raise InvariantViolation("field names must be unique")

    def field_names(self) -> list[str]:
        return [f.name for f in self.fields]

    def by_name(self, name: str) -> FieldDef:
        for f in self.fields:
            if f.name == name:
                return f
        raise KeyError(name)


def load_field_schema(data: bytes | str) -> FieldSchema:
    """Parse the schema file shape:

        {"schema_name": "...", "fields": [
            {"name": "...", "type": "...", "required": bool, "description": "..."}]}
    """
    try:
        raw = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise JsonMalformed(str(exc)) from exc
    if not isinstance(raw, dict):
        raise JsonMalformed("schema file must hold a JSON object")
    if "schema_name" not in raw:
        raise MissingField("schema_name")
    if "fields" not in raw or not isinstance(raw["fields"], list):
        raise MissingField("fields")
    defs = []
    for i, f in enumerate(raw["fields"]):
        if not isinstance(f, dict):
            raise MissingField(f"fields[{i}]")
        for key in ("name", "type"):
            if key not in f:
                raise MissingField(f"fields[{i}].{key}")
        defs.append(
            FieldDef(
                name=f["name"],
                semantic_type=f["type"],
                required=bool(f.get("required", False)),
                description=str(f.get("description", "")),
            )
        )
    return FieldSchema(raw["schema_name"], tuple(defs))


def schema_to_json(schema: FieldSchema) -> bytes:
    return canonical_json(
        {
            "schema_name": schema.schema_name,
            "fields": [
                {
                    "name": f.name,
                    "type": f.semantic_type,
                    "required": f.required,
                    "description": f.description,
                }
                for f in schema.fields
            ],
        }
    )


@dataclass(frozen=True)
class FieldExtraction:
    raw_value: str | None
    normalized_value: str | None
    confidence: float
    source: str
    source_spans: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.source not in SOURCES:
            raise InvariantViolation(f"unknown source {self.source!r}")
        if self.source == "absent" and self.raw_value is not None:
            raise InvariantViolation("absent fields must not carry a value")


@dataclass(frozen=True)
class ExtractionResult:
    doc_id: str
    schema_name: str
    fields: Mapping[str, FieldExtraction]
    warnings: tuple[str, ...] = ()

    def normalized_map(self) -> dict[str, str | None]:
        return {name: fe.normalized_value for name, fe in self.fields.items()}


@dataclass(frozen=True)
class ModelClientSpec:
    endpoint_url: str
    model_name: str
    api_key_env_var: str | None = None
    max_retries: int = 3
    timeout_s: float = 30.0
    deterministic_decode: bool = True

    def __post_init__(self):
        if not self.endpoint_url:
            raise InvariantViolation("endpoint_url must be non-empty")
        if not self.model_name:
            raise InvariantViolation("model_name must be non-empty")
        if not (0 <= self.max_retries <= 5):
            raise InvariantViolation("max_retries must be within [0, 5]")
        if self.timeout_s <= 0:
            raise InvariantViolation("timeout_s must be positive")


# --- prompt ---------------------------------------------------------------------


def build_prompt(schema: FieldSchema, raw_text: str) -> str:
    """Deterministic extraction prompt with a hard text budget.

    Document text beyond PROMPT_TEXT_BUDGET characters is cut from the tail
    and replaced with an explicit truncation note.
    """
    if not raw_text.strip():
        raise EmptyDocument("cannot build a prompt for an empty document")

    text = raw_text
    note = ""
    if len(text) > PROMPT_TEXT_BUDGET:
        text = text[:PROMPT_TEXT_BUDGET]
        note = "\n" + TRUNCATION_NOTE.format(n=PROMPT_TEXT_BUDGET)

    lines = [
        "You are an information extraction engine.",
        "Extract the following fields from the document text.",
        "",
        "Fields:",
    ]
    for f in schema.fields:
        requirement = "required" if f.required else "optional"
        desc = f" - {f.description}" if f.description else ""
        lines.append(f"- {f.name} ({f.semantic_type}, {requirement}){desc}")
    lines += [
        "",
        "Answer with a single JSON object whose keys are exactly the field names above.",
        "Use null for any field that does not appear in the document.",
        "Do not add keys, commentary, or markdown.",
        "",
        DOC_BEGIN,
        text + note,
        DOC_END,
    ]
    return "\n".join(lines)


# --- model client -----------------------------------------------------------------

RETRYABLE_STATUS = (429,)
BACKOFF_BASE_S = 1.0


def call_model(
    spec: ModelClientSpec,
    prompt: str,
    *,
    sleep: Callable[[float], None] = time.sleep,
) -> str:
    """POST a chat-completion request and return the reply text.

    Retries 429 and 5xx responses with exponential backoff (1s, 2s, 4s, ...)
    up to max_retries; a named-but-unset credential fails before any network
    traffic. ``sleep`` is injectable so tests can observe the schedule.
    """
    headers = {"Content-Type": "application/json"}
    if spec.api_key_env_var:
        token = os.environ.get(spec.api_key_env_var)
        if token is None:
            raise MissingCredential(
                f"environment variable {spec.api_key_env_var} is not set"
            )
        headers["Authorization"] = f"Bearer {token}"

    body: dict[str, Any] = {
        "model": spec.model_name,
        "messages": [{"role": "user", "content": prompt}],
    }
    if spec.deterministic_decode:
        body["temperature"] = 0

    last_status = None
    for attempt in range(spec.max_retries + 1):
        if attempt:
            sleep(BACKOFF_BASE_S * 2 ** (attempt - 1))
        try:
            resp = requests.post(
                spec.endpoint_url, json=body, headers=headers, timeout=spec.timeout_s
            )
        except requests.Timeout as exc:
            raise Timeout(f"model call exceeded {spec.timeout_s}s") from exc
        except requests.RequestException as exc:
            raise HttpError(0, str(exc)) from exc

        if resp.status_code in RETRYABLE_STATUS or 500 <= resp.status_code < 600:
            last_status = resp.status_code
            continue
        if not (200 <= resp.status_code < 300):
            raise HttpError(resp.status_code, resp.text[:200])

        try:
            payload = resp.json()
            content = payload["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise JsonMalformed(f"model response shape: {exc}") from exc
        if not isinstance(content, str):
            raise JsonMalformed("model reply content is not a string")
        return content

    raise RetriesExhausted(
        f"model endpoint kept failing (last status {last_status}) "
        f"after {spec.max_retries} retries"
    )


# --- model output parsing -----------------------------------------------------------


def _first_json_object(text: str) -> str:
    start = text.find("{")
    if start < 0:
        raise NoJsonFound("model reply contains no JSON object")
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return text[start : i + 1]
    raise JsonMalformed("unbalanced braces in model reply")


def _coerce_value(value: Any) -> str | None:
    if value is None:
        return None
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return json.dumps(value)
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def parse_model_output(response: str, schema: FieldSchema) -> dict[str, str | None]:
    """Extract the first balanced JSON object and map it onto the schema.

    Unknown keys are ignored with a warning; values are coerced to strings.
    Raises RequiredFieldMissing (recoverable, carries the partial mapping)
    when a required field is null or absent.
    """
    snippet = _first_json_object(response)
    try:
        raw = json.loads(snippet)
    except json.JSONDecodeError as exc:
        raise JsonMalformed(f"model JSON does not parse: {exc}") from exc
    if not isinstance(raw, dict):
        raise JsonMalformed("model JSON is not an object")

    names = set(schema.field_names())
    unknown = sorted(set(raw) - names)
    if unknown:
        logger.warning("model reply has unknown keys (ignored): %s", ", ".join(unknown))

    values: dict[str, str | None] = {}
    for name in schema.field_names():
        values[name] = _coerce_value(raw.get(name))

    missing = [
        f.name for f in schema.fields if f.required and values.get(f.name) is None
    ]
    if missing:
        raise RequiredFieldMissing(missing, partial=values)
    return values


# --- normalization -------------------------------------------------------------------

_EDGE_PUNCT = _string.punctuation + " \t\r\n"

_MONTHS = {
    name: i + 1
    for i, name in enumerate(
        [
            "january", "february", "march", "april", "may", "june",
            "july", "august", "september", "october", "november", "december",
        ]
    )
}
for _name, _num in list(_MONTHS.items()):
    _MONTHS[_name[:3]] = _num

_MONTH_ALT = "|".join(sorted(_MONTHS, key=len, reverse=True))

DATE_PATTERNS: tuple[re.Pattern, ...] = (
    re.compile(r"\b(\d{4})-(\d{1,2})-(\d{1,2})\b"),
    re.compile(r"\b(\d{1,2})([/-])(\d{1,2})\2(\d{4})\b"),
    re.compile(rf"\b(\d{{1,2}})(?:st|nd|rd|th)?\s+({_MONTH_ALT})\.?,?\s+(\d{{4}})\b", re.I),
    re.compile(rf"\b({_MONTH_ALT})\.?\s+(\d{{1,2}})(?:st|nd|rd|th)?\s*,\s*(\d{{4}})\b", re.I),
)

MONEY_RE = re.compile(r"[-+]?[$€£]?\d[\d,]*\.\d{1,2}")


def normalize_string(raw: str) -> str:
    collapsed = " ".join(raw.split())
    return collapsed.casefold().strip(_EDGE_PUNCT)


def normalize_money(raw: str) -> str:
    cleaned = raw.strip()
    for symbol in "$€£¥₹":
        cleaned = cleaned.replace(symbol, "")
    cleaned = cleaned.replace(",", "").replace(" ", "")
    if not cleaned:
        raise UnparseableValue(f"money value {raw!r} is empty after cleanup")
    try:
        value = Decimal(cleaned)
    except InvalidOperation as exc:
        raise UnparseableValue(f"money value {raw!r} does not parse") from exc
    return str(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _valid_date(year: int, month: int, day: int) -> bool:
    import datetime

    try:
        datetime.date(year, month, day)
        return True
    except ValueError:
        return False


def normalize_date(raw: str) -> str:
    """To ISO YYYY-MM-DD. Ambiguous all-numeric day/month reads day-first;
    an impossible day-first reading falls back to month-first when valid."""
    text = raw.strip()

    m = DATE_PATTERNS[0].search(text)
    if m:
        year, month, day = int(m.group(1)), int(m.group(2)), int(m.group(3))
        if _valid_date(year, month, day):
            return f"{year:04d}-{month:02d}-{day:02d}"
        raise UnparseableValue(f"date {raw!r} has impossible components")

    m = DATE_PATTERNS[1].search(text)
    if m:
        first, second, year = int(m.group(1)), int(m.group(3)), int(m.group(4))
        day, month = first, second
        if month > 12 and day <= 12:
            day, month = month, day
        if _valid_date(year, month, day):
            return f"{year:04d}-{month:02d}-{day:02d}"
        raise UnparseableValue(f"date {raw!r} has impossible components")

    m = DATE_PATTERNS[2].search(text)
    if m:
        day, month = int(m.group(1)), _MONTHS[m.group(2).lower()]
        year = int(m.group(3))
        if _valid_date(year, month, day):
            return f"{year:04d}-{month:02d}-{day:02d}"
        raise UnparseableValue(f"date {raw!r} has impossible components")

    m = DATE_PATTERNS[3].search(text)
    if m:
        month, day = _MONTHS[m.group(1).lower()], int(m.group(2))
        year = int(m.group(3))
        if _valid_date(year, month, day):
            return f"{year:04d}-{month:02d}-{day:02d}"
        raise UnparseableValue(f"date {raw!r} has impossible components")

    raise UnparseableValue(f"date {raw!r} matches no supported format")


def normalize_field(raw: str, semantic_type: str) -> str:
    """Normalize one raw value per its semantic type.

    string/person_name/address: casefold, collapse whitespace, strip edge
    punctuation. money: strip currency symbols and thousands separators,
    render with exactly two decimals. date: ISO YYYY-MM-DD.
    """
    if semantic_type in ("string", "person_name", "address"):
        return normalize_string(raw)
    if semantic_type == "money":
        return normalize_money(raw)
    if semantic_type == "date":
        return normalize_date(raw)
    raise InvariantViolation(f"unknown semantic type {semantic_type!r}")


# --- rule route -------------------------------------------------------------------


def _doc_lines(doc: DocumentRecord) -> list[str]:
    lines: list[str] = []
    for page in doc.pages:
        for block in page.blocks:
            for line in block.lines:
                lines.append(line.text)
    return lines


def _rule_date(text: str) -> str | None:
    best: tuple[int, str] | None = None
    for pattern in DATE_PATTERNS:
        m = pattern.search(text)
        if m and (best is None or m.start() < best[0]):
            best = (m.start(), m.group(0))
    return best[1] if best else None


def _rule_money(lines: Sequence[str]) -> str | None:
    keyword_re = re.compile(r"\b(" + "|".join(MONEY_KEYWORDS) + r")\b", re.I)
    for i in range(len(lines) - 1, -1, -1):
        kw = keyword_re.search(lines[i])
        if not kw:
            continue
        same = list(MONEY_RE.finditer(lines[i]))
        if same:
            nearest = min(same, key=lambda m: abs(m.start() - kw.start()))
            return nearest.group(0)
        if i + 1 < len(lines):
            below = list(MONEY_RE.finditer(lines[i + 1]))
            if below:
                nearest = min(below, key=lambda m: abs(m.start() - kw.start()))
                return nearest.group(0)
    return None


def _rule_label(lines: Sequence[str], field_name: str) -> str | None:
    label = field_name.replace("_", " ")
    pattern = re.compile(re.escape(label) + r"\s*:\s*(.+)$", re.I)
    for line in lines:
        m = pattern.search(line)
        if m:
            value = m.group(1).strip()
            if value:
                return value
    return None


def rule_based_extract(schema: FieldSchema, doc: DocumentRecord) -> dict[str, str | None]:
    """Deterministic per-type heuristics; returns raw values (None = absent).

    date: first date-pattern match in the flattened text. money: the decimal
    number nearest a total/amount/balance/due keyword, same line first then
    the line below, scanning bottom-up. Everything else: the text right of a
    "<field words>:" label.
    """
    text = flatten_text(doc)
    lines = _doc_lines(doc)
    values: dict[str, str | None] = {}
    for f in schema.fields:
        if f.semantic_type == "date":
            values[f.name] = _rule_date(text)
        elif f.semantic_type == "money":
            values[f.name] = _rule_money(lines)
        else:
            values[f.name] = _rule_label(lines, f.name)
    return values


# --- confidence annotation -----------------------------------------------------------


def _word_key(text: str) -> str:
    return text.casefold().strip(_EDGE_PUNCT)


def annotate_confidence(result: ExtractionResult, doc: DocumentRecord) -> ExtractionResult:
    """Align each extracted value onto document words.

    A value whose tokens appear as a contiguous word subsequence (compared
    after per-word normalization) gets the minimum confidence of the matched
    words and their spans; unaligned values get 0.5 (model) or 0.7 (rule);
    absent fields get 0.
    """
    page_keys: list[list[str]] = []
    page_words: list[list] = []
    for page in doc.pages:
        words = page.words
        page_words.append(words)
        page_keys.append([_word_key(w.text) for w in words])

    updated: dict[str, FieldExtraction] = {}
    for name, fe in result.fields.items():
        if fe.source == "absent" or fe.raw_value is None:
            updated[name] = replace(fe, confidence=0.0, source_spans=())
            continue
        tokens = [_word_key(t) for t in fe.raw_value.split()]
        tokens = [t for t in tokens if t]
        span = _find_span(tokens, page_keys) if tokens else None
        if span is None:
            fallback = 0.5 if fe.source == "model" else 0.7
            updated[name] = replace(fe, confidence=fallback, source_spans=())
        else:
            page_idx, start = span
            matched = page_words[page_idx][start : start + len(tokens)]
            confidence = min(w.confidence for w in matched)
            spans = tuple((page_idx, start + k) for k in range(len(tokens)))
            updated[name] = replace(fe, confidence=confidence, source_spans=spans)

    return ExtractionResult(result.doc_id, result.schema_name, updated, result.warnings)


def _find_span(tokens: list[str], page_keys: list[list[str]]) -> tuple[int, int] | None:
    n = len(tokens)
    for page_idx, keys in enumerate(page_keys):
        for start in range(0, len(keys) - n + 1):
            if keys[start : start + n] == tokens:
                return page_idx, start
    return None


# --- orchestration ---------------------------------------------------------------------


def extract_kv(
    schema: FieldSchema,
    doc: DocumentRecord,
    model_spec: ModelClientSpec | None = None,
    *,
    sleep: Callable[[float], None] = time.sleep,
) -> ExtractionResult:
    """Extract all schema fields from one document.

    With a model spec: prompt, call, parse; on a recoverable parse problem,
    one repair re-prompt with the error appended; any field still unfilled
    falls back to the rule route. Without a model spec: rules only. The result
    always covers every schema field. Only MissingCredential propagates.
    """
    raw_text = flatten_text(doc)
    warnings: list[str] = []
    values: dict[str, str | None] = {name: None for name in schema.field_names()}
    sources: dict[str, str] = {name: "absent" for name in schema.field_names()}

    if model_spec is not None and raw_text.strip():
        model_values = _model_route(schema, raw_text, model_spec, warnings, sleep)
        for name, value in model_values.items():
            if value is not None:
                values[name] = value
                sources[name] = "model"

    if any(v is None for v in values.values()):
        rule_values = rule_based_extract(schema, doc)
        for name, value in rule_values.items():
            if values[name] is None and value is not None:
                values[name] = value
                sources[name] = "rule"

    fields: dict[str, FieldExtraction] = {}
    for f in schema.fields:
        raw = values[f.name]
        if raw is None:
            fields[f.name] = FieldExtraction(None, None, 0.0, "absent")
            continue
        try:
            normalized = normalize_field(raw, f.semantic_type)
        except UnparseableValue as exc:
            warnings.append(f"{f.name}: {exc}")
            normalized = raw.casefold()
        fields[f.name] = FieldExtraction(raw, normalized, 0.0, sources[f.name])

    result = ExtractionResult(doc.doc_id, schema.schema_name, fields, tuple(warnings))
    return annotate_confidence(result, doc)


def _model_route(
    schema: FieldSchema,
    raw_text: str,
    spec: ModelClientSpec,
    warnings: list[str],
    sleep: Callable[[float], None],
) -> dict[str, str | None]:
    prompt = build_prompt(schema, raw_text)
    try:
        reply = call_model(spec, prompt, sleep=sleep)
    except MissingCredential:
        raise
    except (HttpError, Timeout, RetriesExhausted, JsonMalformed) as exc:
        warnings.append(f"model call failed, using rules: {exc}")
        return {}

    try:
        return parse_model_output(reply, schema)
    except (NoJsonFound, JsonMalformed, RequiredFieldMissing) as first_error:
        repair_prompt = (
            prompt
            + "\n\nYour previous reply could not be used: "
            + str(first_error)
            + "\nReply again with exactly one JSON object and nothing else."
        )
        try:
            reply = call_model(spec, repair_prompt, sleep=sleep)
        except MissingCredential:
            raise
        except (HttpError, Timeout, RetriesExhausted, JsonMalformed) as exc:
            warnings.append(f"repair call failed, using rules: {exc}")
            return _partial_of(first_error)
        try:
            return parse_model_output(reply, schema)
        except RequiredFieldMissing as second_error:
            warnings.append(f"repair attempt still missing fields: {second_error}")
            return second_error.partial
        except (NoJsonFound, JsonMalformed) as second_error:
            warnings.append(f"repair attempt failed ({second_error}), using rules")
            return _partial_of(first_error)


def _partial_of(error: Exception) -> dict[str, str | None]:
    if isinstance(error, RequiredFieldMissing):
        return error.partial
    return {}


# --- result serialization -----------------------------------------------------------------


def extraction_to_json(result: ExtractionResult) -> bytes:
    return canonical_json(
        {
            "doc_id": result.doc_id,
            "schema_name": result.schema_name,
            "fields": {
                name: {
                    "raw_value": fe.raw_value,
                    "normalized_value": fe.normalized_value,
                    "confidence": fe.confidence,
                    "source": fe.source,
                    "source_spans": [list(span) for span in fe.source_spans],
                }
                for name, fe in result.fields.items()
            },
            "warnings": list(result.warnings),
        }
    )


def extraction_from_json(data: bytes | str) -> ExtractionResult:
    try:
        raw = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise JsonMalformed(str(exc)) from exc
    if not isinstance(raw, dict):
        raise JsonMalformed("extraction file must hold a JSON object")
    for key in ("doc_id", "schema_name", "fields"):
        if key not in raw:
            raise MissingField(key)
    if not isinstance(raw["fields"], dict):
        raise MissingField("fields", "fields must be an object")

    fields: dict[str, FieldExtraction] = {}
    for name, fe in raw["fields"].items():
        if not isinstance(fe, dict):
            raise MissingField(f"fields.{name}")
        spans = fe.get("source_spans", [])
        if not isinstance(spans, list):
            raise MissingField(f"fields.{name}.source_spans")
        fields[name] = FieldExtraction(
            raw_value=fe.get("raw_value"),
            normalized_value=fe.get("normalized_value"),
            confidence=float(fe.get("confidence", 0.0)),
            source=fe.get("source", "absent"),
            source_spans=tuple((int(p), int(i)) for p, i in spans),
        )
    warnings = raw.get("warnings", [])
    if not isinstance(warnings, list):
        raise MissingField("warnings")
    return ExtractionResult(
        str(raw["doc_id"]), str(raw["schema_name"]), fields, tuple(str(w) for w in warnings)
    )
