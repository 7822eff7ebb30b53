"""Character n-gram F-score (chrF).

Per order n = 1..6, precision and recall are computed from corpus-summed
true-positive / hypothesis / reference n-gram counts over the
whitespace-stripped character stream; the score is the average over orders
of (1 + beta^2) P R / (beta^2 P + R), scaled to 0-100.  Orders where both
hypothesis and reference have no n-grams are excluded from the average.
"""

from __future__ import annotations

import re
from collections import Counter
from typing import Sequence

import numpy as np

from ..errors import LengthMismatch
from .base import ScoreReport

MAX_ORDER = 6

#: Stat vector layout: (hyp_count, ref_count, match_count) per order.
STAT_SIZE = 3 * MAX_ORDER

DEFAULT_CONFIG = {"max_order": MAX_ORDER, "beta": 2, "remove_whitespace": True}

_WS = re.compile(r"\s+")


def _char_ngrams(text: str, n: int) -> Counter:
    return Counter(text[i : i + n] for i in range(len(text) - n + 1))


def sentence_stats(hyp: str, ref: str, remove_whitespace: bool = True,
                   max_order: int = MAX_ORDER) -> list[int]:
    """Per-order (hyp, ref, match) character n-gram counts for one pair."""
    if remove_whitespace:
        hyp = _WS.sub("", hyp)
        ref = _WS.sub("", ref)
    stats: list[int] = []
    for n in range(1, max_order + 1):
        hyp_ngrams = _char_ngrams(hyp, n)
        ref_ngrams = _char_ngrams(ref, n)
        match = sum((hyp_ngrams & ref_ngrams).values())
        stats.extend((sum(hyp_ngrams.values()), sum(ref_ngrams.values()), match))
    return stats


def score_from_stats(stats: "np.ndarray | Sequence[float]", beta: float = 2.0) -> "float | np.ndarray":
    """chrF (0-100) from a summed stat vector, or batched over rows."""
    arr = np.asarray(stats, dtype=np.float64)
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr[np.newaxis, :]

    hyp = arr[:, 0::3]
    ref = arr[:, 1::3]
    match = arr[:, 2::3]

    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(hyp > 0, match / np.where(hyp > 0, hyp, 1), 0.0)
        recall = np.where(ref > 0, match / np.where(ref > 0, ref, 1), 0.0)
        beta_sq = beta * beta
        denom = beta_sq * precision + recall
        f = np.where(denom > 0, (1 + beta_sq) * precision * recall / np.where(denom > 0, denom, 1), 0.0)

    included = (hyp + ref) > 0
    n_included = included.sum(axis=1)
    f_sum = np.where(included, f, 0.0).sum(axis=1)
    score = 100.0 * np.where(n_included > 0, f_sum / np.where(n_included > 0, n_included, 1), 0.0)
    return float(score[0]) if squeeze else score


def corpus_chrf(hyps: Sequence[str], refs: Sequence[str], config: dict | None = None,
                ids: Sequence[str] | None = None) -> ScoreReport:
    """Corpus-level chrF with per-sentence sufficient statistics."""
    if len(hyps) != len(refs):
        raise LengthMismatch(f"{len(hyps)} hypotheses vs {len(refs)} references")
    if not hyps:
        raise LengthMismatch("cannot score an empty corpus")
    cfg = dict(DEFAULT_CONFIG)
    if config:
        cfg.update(config)

    stats = [sentence_stats(h, r, cfg["remove_whitespace"], cfg["max_order"])
             for h, r in zip(hyps, refs)]
    summed = np.sum(np.asarray(stats, dtype=np.float64), axis=0)
    score = score_from_stats(summed, beta=float(cfg["beta"]))

    return ScoreReport(
        metric_id="chrf",
        corpus_score=float(score),
        ids=list(ids) if ids is not None else [str(i) for i in range(len(hyps))],
        per_sentence_stats=[[float(v) for v in s] for s in stats],
        config=cfg,
        details={},
    )
