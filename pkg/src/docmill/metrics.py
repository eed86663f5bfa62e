"""Accuracy metrics: edit distance, character/word error rates, and
field-level precision/recall/F1.

Conventions: the first argument of each rate is always the reference; rates
use unit-cost insert/delete/substitute; a field prediction that is present but
wrong is punished on both sides (one false positive and one false negative).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import EmptyReference, SchemaMismatch


@dataclass(frozen=True)
class EditDistanceResult:
    distance: int
    ref_len: int
    hyp_len: int


def _token_ids(ref: Sequence, hyp: Sequence) -> tuple[np.ndarray, np.ndarray]:
    ids: dict = {}
    for tok in ref:
        ids.setdefault(tok, len(ids))
    for tok in hyp:
        ids.setdefault(tok, len(ids))
    return (
        np.fromiter((ids[t] for t in ref), dtype=np.int64, count=len(ref)),
        np.fromiter((ids[t] for t in hyp), dtype=np.int64, count=len(hyp)),
    )


def levenshtein(ref: Sequence, hyp: Sequence) -> EditDistanceResult:
    """Unit-cost edit distance between two token sequences (or strings).

    Row-by-row dynamic program over two rows:

        current[j] = min(previous[j] + 1,        delete from ref
                         current[j - 1] + 1,     insert into ref
                         previous[j - 1] + cost) substitute

    Each row is evaluated in vector form. The insert term chains along the
    row, but unrolling it gives current[j] = j + min over k <= j of
    (candidate[k] - k) where candidate[k] is the minimum of the other two
    terms (and candidate[0] = current[0] = i), so one cumulative minimum
    recovers the exact scalar recurrence.
    """
    n, m = len(ref), len(hyp)
    if n == 0 or m == 0:
        return EditDistanceResult(max(n, m), n, m)

    ref_ids, hyp_ids = _token_ids(ref, hyp)
    offsets = np.arange(m + 1, dtype=np.int64)
    previous = offsets.copy()
    candidate = np.empty(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        candidate[0] = i
        np.minimum(
            previous[1:] + 1,
            previous[:-1] + (hyp_ids != ref_ids[i - 1]),
            out=candidate[1:],
        )
        current = np.minimum.accumulate(candidate - offsets) + offsets
        previous = current
    return EditDistanceResult(int(previous[m]), n, m)


def cer(ref: str, hyp: str) -> float:
    """Character error rate: edit distance / reference length."""
    if len(ref) == 0:
        raise EmptyReference("character error rate needs a non-empty reference")
    return levenshtein(ref, hyp).distance / len(ref)


def wer(ref: str, hyp: str) -> float:
    """Word error rate over whitespace-delimited tokens."""
    ref_tokens = ref.split()
    if not ref_tokens:
        raise EmptyReference("word error rate needs at least one reference token")
    return levenshtein(ref_tokens, hyp.split()).distance / len(ref_tokens)


def word_accuracy(ref: str, hyp: str) -> float:
    """max(0, 1 - WER); clamped because WER can exceed 1 on insertions."""
    return max(0.0, 1.0 - wer(ref, hyp))


# --- field-level scoring ------------------------------------------------------


@dataclass
class FieldCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def add(self, other: "FieldCounts") -> None:
        self.tp += other.tp
        self.fp += other.fp
        self.fn += other.fn

    @property
    def support(self) -> int:
        """Number of gold-present instances."""
        return self.tp + self.fn


def match_fields(
    pred: Mapping[str, str | None], gold: Mapping[str, str | None]
) -> dict[str, FieldCounts]:
    """Count tp/fp/fn per field for one document.

    Both mappings must be keyed by the same schema; values are normalized
    strings, with None meaning absent. Semantics per field:
      - gold present, prediction equal         -> tp
      - prediction present, gold absent        -> fp
      - gold present, prediction absent        -> fn
      - both present but different             -> fp and fn
      - both absent                            -> nothing
    """
    if set(pred) != set(gold):
        only_pred = sorted(set(pred) - set(gold))
        only_gold = sorted(set(gold) - set(pred))
        raise SchemaMismatch(
            f"field sets differ (prediction only: {only_pred}, gold only: {only_gold})"
        )
    counts: dict[str, FieldCounts] = {}
    for name in pred:
        c = FieldCounts()
        p, g = pred[name], gold[name]
        if g is not None and p is not None:
            if p == g:
                c.tp = 1
            else:
                c.fp = 1
                c.fn = 1
        elif p is not None:
            c.fp = 1
        elif g is not None:
            c.fn = 1
        counts[name] = c
    return counts


def merge_counts(
    into: dict[str, FieldCounts], counts: Mapping[str, FieldCounts]
) -> dict[str, FieldCounts]:
    for name, c in counts.items():
        into.setdefault(name, FieldCounts()).add(c)
    return into


@dataclass(frozen=True)
class Score:
    precision: float
    recall: float
    f1: float
    support: int


def f1_score(counts: FieldCounts) -> Score:
    """Precision, recall, F1 from raw counts; zero denominators score 0."""
    p = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    r = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return Score(p, r, f, counts.support)


def micro_f1(per_field: Mapping[str, FieldCounts]) -> Score:
    """Pool counts across fields, then score once."""
    pooled = FieldCounts()
    for c in per_field.values():
        pooled.add(c)
    return f1_score(pooled)
