"""Translation error rate: edit distance extended with block shifts.

A shift moves a contiguous hypothesis span (up to ``max_shift_span`` tokens)
to a position where the span exactly matches the reference.  Each shift
counts as one edit.  The search repeatedly applies the shift giving the
largest reduction in remaining edit distance; when several shifts tie for
the largest reduction, each tied continuation is explored (memoized, with a
deterministic exploration budget) and the smallest final edit count wins.
Shifting stops when no shift reduces the edit distance.

Total edits = shifts taken + residual Levenshtein distance, which is never
more than the plain Levenshtein distance of the original pair.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import EmptyReference, LengthMismatch
from .base import ScoreReport
from .distance import levenshtein

MAX_SHIFT_SPAN = 10

#: Branch explorations allowed per sentence before the tie search degrades
#: to first-candidate-only (keeps pathological repetitive inputs polynomial).
_BRANCH_BUDGET = 4096

DEFAULT_CONFIG = {
    "tokenizer": "whitespace",
    "case_sensitive": True,
    "max_shift_span": MAX_SHIFT_SPAN,
}

STAT_SIZE = 2


@dataclass(frozen=True)
class TerStats:
    """Edit count (insertions + deletions + substitutions + shifts) and
    reference length for one sentence pair."""

    edits: int
    ref_length: int

    @property
    def rate(self) -> float:
        return 100.0 * self.edits / self.ref_length


def _shift_variants(cur: tuple, ref: tuple, max_span: int) -> list[tuple]:
    """Distinct sequences reachable from ``cur`` by one block shift, in a
    fixed enumeration order (span start, span length, target position)."""
    out: list[tuple] = []
    seen: set[tuple] = set()
    n, m = len(cur), len(ref)
    for i in range(n):
        for length in range(1, min(max_span, n - i) + 1):
            span = cur[i : i + length]
            for j in range(m - length + 1):
                if j == i or ref[j : j + length] != span:
                    continue
                reduced = cur[:i] + cur[i + length :]
                shifted = reduced[:j] + span + reduced[j:]
                if shifted != cur and shifted not in seen:
                    seen.add(shifted)
                    out.append(shifted)
    return out


def _min_edits(hyp: tuple, ref: tuple, max_span: int) -> int:
    budget = [_BRANCH_BUDGET]
    memo: dict[tuple, int] = {}

    def search(cur: tuple, ed: int) -> int:
        if ed == 0:
            return 0
        if cur in memo:
            return memo[cur]
        best_reduction = 0
        tied: list[tuple[tuple, int]] = []
        for variant in _shift_variants(cur, ref, max_span):
            reduction = ed - levenshtein(variant, ref)
            if reduction > best_reduction:
                best_reduction = reduction
                tied = [(variant, reduction)]
            elif reduction == best_reduction and reduction > 0:
                tied.append((variant, reduction))
        if best_reduction < 1:
            memo[cur] = ed
            return ed
        budget[0] -= len(tied)
        if budget[0] < 0:
            tied = tied[:1]
        total = min(ed, min(1 + search(v, ed - r) for v, r in tied))
        memo[cur] = total
        return total

    return search(hyp, levenshtein(hyp, ref))


def ter_sentence(hyp_tokens: Sequence[str], ref_tokens: Sequence[str],
                 max_shift_span: int = MAX_SHIFT_SPAN) -> TerStats:
    """Edit statistics for one tokenized sentence pair."""
    if not ref_tokens:
        raise EmptyReference("TER is undefined for an empty reference")
    # Intern tokens as ints: faster hashing and comparisons in the search.
    vocab: dict[str, int] = {}
    hyp = tuple(vocab.setdefault(t, len(vocab)) for t in hyp_tokens)
    ref = tuple(vocab.setdefault(t, len(vocab)) for t in ref_tokens)
    return TerStats(edits=_min_edits(hyp, ref, max_shift_span), ref_length=len(ref))


def _ter_tokens(text: str, case_sensitive: bool) -> list[str]:
    text = unicodedata.normalize("NFC", text)
    if not case_sensitive:
        text = text.lower()
    return text.split()


def score_from_stats(stats: "np.ndarray | Sequence[float]") -> "float | np.ndarray":
    """TER percentage from a summed (edits, ref_length) vector or batch."""
    arr = np.asarray(stats, dtype=np.float64)
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr[np.newaxis, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        score = 100.0 * np.where(arr[:, 1] > 0, arr[:, 0] / np.where(arr[:, 1] > 0, arr[:, 1], 1), 0.0)
    return float(score[0]) if squeeze else score


def corpus_ter(hyps: Sequence[str], refs: Sequence[str], config: dict | None = None,
               ids: Sequence[str] | None = None) -> ScoreReport:
    """Corpus TER: summed edits over summed reference lengths, as a percentage."""
    if len(hyps) != len(refs):
        raise LengthMismatch(f"{len(hyps)} hypotheses vs {len(refs)} references")
    if not hyps:
        raise LengthMismatch("cannot score an empty corpus")
    cfg = dict(DEFAULT_CONFIG)
    if config:
        cfg.update(config)

    stats = []
    for hyp, ref in zip(hyps, refs):
        ref_tokens = _ter_tokens(ref, cfg["case_sensitive"])
        if not ref_tokens:
            raise EmptyReference("reference is empty after tokenization")
        hyp_tokens = _ter_tokens(hyp, cfg["case_sensitive"])
        sentence = ter_sentence(hyp_tokens, ref_tokens, cfg["max_shift_span"])
        stats.append([float(sentence.edits), float(sentence.ref_length)])

    summed = np.sum(np.asarray(stats, dtype=np.float64), axis=0)
    return ScoreReport(
        metric_id="ter",
        corpus_score=float(score_from_stats(summed)),
        ids=list(ids) if ids is not None else [str(i) for i in range(len(hyps))],
        per_sentence_stats=stats,
        config=cfg,
        details={"total_edits": int(summed[0]), "total_ref_length": int(summed[1])},
    )
