"""Gold annotation loaders for the two supported layouts.

Form-style files carry entity lists with question/answer links; flat files
carry a small fixed key set. Both loaders produce a plain key -> value map
suitable for field matching, plus whatever reference text the file holds.
"""

from __future__ import annotations

import json
import logging
import re

from .errors import JsonMalformed, MissingField

logger = logging.getLogger(__name__)

# Flat gold files may only use these keys; each has a fixed semantic type.
FLAT_KEY_TYPES = {
    "company": "string",
    "date": "date",
    "address": "address",
    "total": "money",
}

_LABEL_CLEAN_RE = re.compile(r"[^a-z0-9]+")


def _normalize_label(label: str) -> str:
    """Lower-case a question label and squeeze non-alphanumerics to underscores."""
    cleaned = _LABEL_CLEAN_RE.sub("_", label.casefold()).strip("_")
    return cleaned


def _load_json(data: bytes | str):
    try:
        return json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise JsonMalformed(str(exc)) from exc


def load_funsd_like(data: bytes | str) -> tuple[dict[str, str], str]:
    """Load a form-annotation file.

    Shape: {"form": [{"id", "text", "label", "linking": [[qid, aid], ...]}]}.
    Entities labeled "question" become keys (label-normalized text); their
    linked "answer" entities, joined with spaces in link order, become the
    value. Returns (key -> value, reference text of all entities "\n"-joined).
    """
    raw = _load_json(data)
    if not isinstance(raw, dict):
        raise JsonMalformed("form gold file must hold a JSON object")
    if "form" not in raw or not isinstance(raw["form"], list):
        raise MissingField("form")

    entities: dict[int, dict] = {}
    order: list[int] = []
    for i, ent in enumerate(raw["form"]):
        if not isinstance(ent, dict):
            raise MissingField(f"form[{i}]")
        for key in ("id", "text", "label"):
            if key not in ent:
                raise MissingField(f"form[{i}].{key}")
        ent_id = ent["id"]
        if not isinstance(ent_id, int):
            raise MissingField(f"form[{i}].id", "entity id must be an integer")
        entities[ent_id] = ent
        order.append(ent_id)

    gold: dict[str, str] = {}
    for ent_id in order:
        ent = entities[ent_id]
        if ent["label"] != "question":
            continue
        key = _normalize_label(str(ent["text"]))
        if not key:
            continue
        answers: list[str] = []
        for link in ent.get("linking", []):
            if not (isinstance(link, list) and len(link) == 2):
                continue
            qid, aid = link
            if qid != ent_id:
                continue
            answer = entities.get(aid)
            if answer is not None and answer["label"] == "answer":
                text = str(answer["text"]).strip()
                if text:
                    answers.append(text)
        if answers:
            if key in gold:
                logger.warning("duplicate question label %r, keeping first", key)
                continue
            gold[key] = " ".join(answers)

    reference = "\n".join(str(entities[i]["text"]) for i in order)
    return gold, reference


def load_sroie_like(data: bytes | str) -> dict[str, str]:
    """Load a flat key -> value gold file.

    Keys must come from FLAT_KEY_TYPES; unknown keys are dropped with a
    warning rather than failing the document.
    """
    raw = _load_json(data)
    if not isinstance(raw, dict):
        raise JsonMalformed("flat gold file must hold a JSON object")
    gold: dict[str, str] = {}
    for key, value in raw.items():
        if key not in FLAT_KEY_TYPES:
            logger.warning("unknown gold key %r (ignored)", key)
            continue
        gold[key] = str(value)
    return gold
