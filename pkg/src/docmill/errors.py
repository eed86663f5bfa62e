"""Exception hierarchy for the whole pipeline.

Every failure mode that callers are expected to branch on gets its own class;
generic misuse (wrong argument types and the like) stays on ValueError/TypeError.
"""

from __future__ import annotations


class DocmillError(Exception):
    """Base class for all pipeline errors."""


# --- document model ---------------------------------------------------------


class MalformedJson(DocmillError):
    """Input bytes are not valid JSON."""


class SchemaViolation(DocmillError):
    """JSON structure does not match the canonical document schema.

    ``path`` names the offending location, e.g. ``pages[0].blocks[2].kind``.
    """

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class InvariantViolation(DocmillError):
    """Structurally valid data breaks a semantic invariant."""


# --- imaging / preprocessing ------------------------------------------------


class UnsupportedImage(DocmillError):
    """Image file uses a format or mode outside the supported set."""


class NoContent(DocmillError):
    """Operation needs foreground pixels but the image is blank."""


class AngleOutOfRange(DocmillError):
    """Rotation angle outside the supported band."""


class ImageTooSmall(DocmillError):
    """Image too small for the requested kernel."""


# --- OCR engine adapters ----------------------------------------------------


class EngineError(DocmillError):
    """Base for engine adapter failures."""


class EngineLaunchFailed(EngineError):
    """External engine process could not start or exited nonzero."""


class Timeout(EngineError):
    """Engine or model call exceeded its deadline."""


class HttpError(EngineError):
    """HTTP engine or model endpoint answered with a non-2xx status."""

    def __init__(self, status: int, body_excerpt: str):
        super().__init__(f"HTTP {status}: {body_excerpt}")
        self.status = status
        self.body_excerpt = body_excerpt


class TsvMalformed(EngineError):
    """Engine TSV output does not match the 12-column contract."""


class JsonMalformed(DocmillError):
    """JSON payload (engine response, model output, gold file) is invalid."""


class MissingField(DocmillError):
    """A required key is absent from a structured payload.

    ``path`` names the missing location.
    """

    def __init__(self, path: str, message: str | None = None):
        super().__init__(message or f"missing field: {path}")
        self.path = path


class MissingGroundTruth(EngineError):
    """Mock engine was invoked without sidecar ground-truth words."""


# --- PDF / DOCX extraction --------------------------------------------------


class NotAPdf(DocmillError):
    """Bytes do not begin with a %PDF-1.x header."""


class XrefBroken(DocmillError):
    """Cross-reference table or object structure is damaged."""


class UnsupportedFeature(DocmillError):
    """PDF uses a feature outside the supported subset.

    Known values of ``feature``: ``xref streams``, ``encryption``,
    ``object streams``, ``no text ops found``.
    """

    def __init__(self, feature: str):
        super().__init__(f"unsupported feature: {feature}")
        self.feature = feature


class FilterUnsupported(DocmillError):
    """Stream filter other than FlateDecode (or with predictors)."""


class LexError(DocmillError):
    """Content stream failed to tokenize; carries the byte offset."""

    def __init__(self, offset: int, message: str):
        super().__init__(f"offset {offset}: {message}")
        self.offset = offset


class FontMissing(DocmillError):
    """Text operator references a font absent from page resources."""


class UnsupportedCharacter(DocmillError):
    """Character outside the writable WinAnsi printable subset."""

    def __init__(self, char: str):
        super().__init__(f"unsupported character: {char!r} (U+{ord(char):04X})")
        self.char = char


class NotAZip(DocmillError):
    """DOCX input is not a ZIP archive."""


class MissingDocumentPart(DocmillError):
    """DOCX archive lacks word/document.xml."""


class XmlMalformed(DocmillError):
    """DOCX document part is not well-formed XML."""


# --- key-value extraction ---------------------------------------------------


class EmptyDocument(DocmillError):
    """Prompt construction needs non-empty document text."""


class MissingCredential(DocmillError):
    """Named credential environment variable is not set."""


class RetriesExhausted(DocmillError):
    """Model endpoint kept failing after the allowed retries."""


class NoJsonFound(DocmillError):
    """Model output contains no JSON object."""


class RequiredFieldMissing(DocmillError):
    """Model output lacks required schema fields.

    Recoverable: carries the partial per-field mapping so the caller can
    repair or fall back without losing the fields that did parse.
    """

    def __init__(self, missing: list[str], partial: dict | None = None):
        super().__init__(f"required fields missing: {', '.join(missing)}")
        self.missing = list(missing)
        self.partial = partial if partial is not None else {}


class UnparseableValue(DocmillError):
    """Value could not be normalized for its semantic type."""


# --- evaluation -------------------------------------------------------------


class EmptyReference(DocmillError):
    """Error rate against an empty reference is undefined."""


class SchemaMismatch(DocmillError):
    """Prediction and gold are keyed by different field sets."""


# --- CLI / configuration ----------------------------------------------------


class ConfigError(DocmillError):
    """Configuration file or CLI arguments are unusable (exit code 2)."""


class UnknownEngine(ConfigError):
    """Requested engine name is not configured."""
