"""Corpus BLEU from scratch: clipped n-gram precisions, brevity penalty,
and exponential smoothing of zero precisions.

Defaults mirror the sacreBLEU reference configuration (13a tokenization,
max order 4, exponential smoothing, mixed case) so that scores are
comparable with the wider MT literature.

Per-sentence statistics are additive; the corpus score is a function of
their sum, which is what makes randomization testing over stored stats
exact.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Sequence

import numpy as np

from ..errors import LengthMismatch, ValidationError
from .base import ScoreReport
from .tokenizers import tokenize

MAX_N = 4

#: Stat vector layout: clipped matches per order, hyp n-gram totals per
#: order, then hypothesis and reference token lengths.
STAT_SIZE = 2 * MAX_N + 2

DEFAULT_CONFIG = {
    "tokenizer": "intl_13a",
    "max_n": MAX_N,
    "smoothing": "exponential-on-zero-precisions",
    "case": "mixed",
}


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def sentence_stats(hyp: str, ref: str, tokenizer: str = "intl_13a") -> list[int]:
    """Clipped-match / total / length statistics for one sentence pair."""
    hyp_tokens = tokenize(hyp, tokenizer).tokens
    ref_tokens = tokenize(ref, tokenizer).tokens
    matches = [0] * MAX_N
    totals = [0] * MAX_N
    for n in range(1, MAX_N + 1):
        hyp_ngrams = _ngram_counts(hyp_tokens, n)
        if not hyp_ngrams:
            continue
        ref_ngrams = _ngram_counts(ref_tokens, n)
        totals[n - 1] = sum(hyp_ngrams.values())
        matches[n - 1] = sum(
            min(count, ref_ngrams.get(ngram, 0)) for ngram, count in hyp_ngrams.items()
        )
    return matches + totals + [len(hyp_tokens), len(ref_tokens)]


def score_from_stats(stats: "np.ndarray | Sequence[float]") -> "float | np.ndarray":
    """BLEU (0-100) from a summed stat vector, or batched over rows.

    Accepts shape ``(STAT_SIZE,)`` or ``(batch, STAT_SIZE)``.  An order with
    zero matches gets the exponentially smoothed precision 1 / (2^k * total);
    an order with no hypothesis n-grams at all forces the score to zero, as
    does an empty hypothesis corpus (brevity penalty 0).
    """
    arr = np.asarray(stats, dtype=np.float64)
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr[np.newaxis, :]

    matches = arr[:, :MAX_N]
    totals = arr[:, MAX_N : 2 * MAX_N]
    hyp_len = arr[:, 2 * MAX_N]
    ref_len = arr[:, 2 * MAX_N + 1]

    with np.errstate(divide="ignore", invalid="ignore"):
        precisions = np.where(totals > 0, matches / np.where(totals > 0, totals, 1), 0.0)
        # Exponential smoothing: the k-th zero-match order (with a nonzero
        # total) is floored at 1 / (2^k * total).
        zero_match = (matches == 0) & (totals > 0)
        k = np.cumsum(zero_match, axis=1)
        smoothed = 1.0 / (np.exp2(k) * np.where(totals > 0, totals, 1))
        precisions = np.where(zero_match, smoothed, precisions)

        log_p = np.where(precisions > 0, np.log(np.where(precisions > 0, precisions, 1)), -np.inf)
        geo_mean = np.exp(np.mean(log_p, axis=1))

        bp = np.ones_like(hyp_len)
        short = (hyp_len < ref_len) & (hyp_len > 0)
        bp = np.where(short, np.exp(1.0 - ref_len / np.where(hyp_len > 0, hyp_len, 1)), bp)
        bp = np.where(hyp_len == 0, 0.0, bp)

    score = 100.0 * bp * geo_mean
    return float(score[0]) if squeeze else score


def corpus_bleu(hyps: Sequence[str], refs: Sequence[str], config: dict | None = None,
                ids: Sequence[str] | None = None) -> ScoreReport:
    """Corpus-level BLEU with per-sentence sufficient statistics.

    Raises :class:`LengthMismatch` unless ``len(hyps) == len(refs) > 0``.
    A corpus of entirely empty hypotheses scores 0 (with a detail flag)
    rather than raising.
    """
    if len(hyps) != len(refs):
        raise LengthMismatch(f"{len(hyps)} hypotheses vs {len(refs)} references")
    if not hyps:
        raise LengthMismatch("cannot score an empty corpus")
    cfg = dict(DEFAULT_CONFIG)
    if config:
        cfg.update(config)
    if cfg["max_n"] != MAX_N:
        raise ValidationError(f"only max_n={MAX_N} is supported, got {cfg['max_n']}")
    if cfg["smoothing"] != DEFAULT_CONFIG["smoothing"]:
        raise ValidationError(f"unsupported smoothing {cfg['smoothing']!r}")

    stats = [sentence_stats(h, r, cfg["tokenizer"]) for h, r in zip(hyps, refs)]
    summed = np.sum(np.asarray(stats, dtype=np.float64), axis=0)
    score = score_from_stats(summed)

    details: dict = {
        "sys_len": int(summed[2 * MAX_N]),
        "ref_len": int(summed[2 * MAX_N + 1]),
        "precisions": [
            float(summed[n] / summed[MAX_N + n]) if summed[MAX_N + n] > 0 else 0.0
            for n in range(MAX_N)
        ],
        "bp": float(
            math.exp(min(0.0, 1.0 - summed[2 * MAX_N + 1] / summed[2 * MAX_N]))
            if summed[2 * MAX_N] > 0
            else 0.0
        ),
    }
    if summed[2 * MAX_N] == 0:
        details["warning"] = "all hypotheses empty; score forced to 0"

    return ScoreReport(
        metric_id="bleu",
        corpus_score=float(score),
        ids=list(ids) if ids is not None else [str(i) for i in range(len(hyps))],
        per_sentence_stats=[[float(v) for v in s] for s in stats],
        config=cfg,
        details=details,
    )
