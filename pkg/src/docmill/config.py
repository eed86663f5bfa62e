"""Pipeline configuration from a TOML file.

Shape:

    [pipeline]
    jobs = 4          # worker threads (default: CPU count)
    deskew = true     # rotate scans back to horizontal
    denoise = true    # 3x3 majority filter on binarized scans

    [[engines]]
    name = "fast"
    kind = "mock"     # mock | external_process | http
    mock_char_error_rate = 0.15
    mock_seed = 7

    [model]           # optional; omitting it selects the rule-only route
    endpoint_url = "https://..."
    model_name = "..."
    api_key_env_var = "EXTRACT_API_KEY"

    [schema]
    path = "schema.json"

Any structural problem raises ConfigError, which the command line maps to
exit code 2.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dataclass_fields
from pathlib import Path

try:
    import tomllib
except ImportError:
    import tomli as tomllib

from .errors import ConfigError, InvariantViolation, UnknownEngine
from .engines import EngineSpec
from .kv import ModelClientSpec


@dataclass(frozen=True)
class PipelineConfig:
    engines: tuple[EngineSpec, ...] = ()
    model: ModelClientSpec | None = None
    schema_path: str | None = None
    jobs: int | None = None
    deskew: bool = True
    denoise: bool = True

    def engine_by_name(self, name: str) -> EngineSpec:
        for spec in self.engines:
            if spec.name == name:
                return spec
        raise UnknownEngine(
            f"engine {name!r} is not configured "
            f"(known: {', '.join(s.name for s in self.engines) or 'none'})"
        )


def _build(cls, table: dict, where: str):
    allowed = {f.name for f in dataclass_fields(cls)}
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys: {', '.join(sorted(unknown))}")
    try:
        return cls(**table)
    except (InvariantViolation, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def parse_config(text: str, base_dir: str | Path = ".") -> PipelineConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config does not parse: {exc}") from exc

    known_sections = {"pipeline", "engines", "model", "schema"}
    unknown = set(raw) - known_sections
    if unknown:
        raise ConfigError(f"unknown config sections: {', '.join(sorted(unknown))}")

    pipeline = raw.get("pipeline", {})
    if not isinstance(pipeline, dict):
        raise ConfigError("[pipeline] must be a table")
    for key in set(pipeline) - {"jobs", "deskew", "denoise"}:
        raise ConfigError(f"[pipeline]: unknown key {key!r}")
    jobs = pipeline.get("jobs")
    if jobs is not None and (not isinstance(jobs, int) or jobs < 1):
        raise ConfigError("[pipeline].jobs must be a positive integer")

    engine_tables = raw.get("engines", [])
    if not isinstance(engine_tables, list):
        raise ConfigError("[[engines]] must be an array of tables")
    engines = []
    seen_names = set()
    for i, table in enumerate(engine_tables):
        if not isinstance(table, dict):
            raise ConfigError(f"[[engines]][{i}] must be a table")
        spec = _build(EngineSpec, table, f"[[engines]][{i}]")
        if spec.name in seen_names:
            raise ConfigError(f"duplicate engine name {spec.name!r}")
        seen_names.add(spec.name)
        engines.append(spec)

    model = None
    if "model" in raw:
        if not isinstance(raw["model"], dict):
            raise ConfigError("[model] must be a table")
        model = _build(ModelClientSpec, raw["model"], "[model]")

    schema_path = None
    if "schema" in raw:
        schema = raw["schema"]
        if not isinstance(schema, dict) or set(schema) - {"path"}:
            raise ConfigError("[schema] accepts only the 'path' key")
        if "path" in schema:
            if not isinstance(schema["path"], str) or not schema["path"]:
                raise ConfigError("[schema].path must be a non-empty string")
            schema_path = str((Path(base_dir) / schema["path"]).resolve())

    return PipelineConfig(
        engines=tuple(engines),
        model=model,
        schema_path=schema_path,
        jobs=jobs,
        deskew=bool(pipeline.get("deskew", True)),
        denoise=bool(pipeline.get("denoise", True)),
    )


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base_dir=path.parent)
