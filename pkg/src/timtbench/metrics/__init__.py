"""Metric suite: BLEU, chrF, TER for translation and WER/CER for OCR.

Each metric exposes per-sentence sufficient statistics that sum to the
corpus statistics; the corpus score is a pure function of that sum.  The
:func:`aggregate_stats` entry point recomputes a corpus score from stored
statistics, which is what the significance module permutes.
"""

from __future__ import annotations

from typing import Any, Callable, Sequence

import numpy as np

from . import bleu as _bleu
from . import chrf as _chrf
from . import error_rate as _error_rate
from . import ter as _ter
from .base import ScoreReport, config_fingerprint
from .distance import levenshtein
from .error_rate import cer, corpus_cer, corpus_wer, wer
from .tokenizers import TokenSequence, graphemes, tokenize
from .ter import TerStats, ter_sentence

__all__ = [
    "ScoreReport",
    "TokenSequence",
    "TerStats",
    "aggregate_stats",
    "batch_aggregator",
    "cer",
    "config_fingerprint",
    "corpus_bleu",
    "corpus_cer",
    "corpus_chrf",
    "corpus_ter",
    "corpus_wer",
    "graphemes",
    "higher_is_better",
    "levenshtein",
    "score_corpus",
    "ter_sentence",
    "tokenize",
    "wer",
]

corpus_bleu = _bleu.corpus_bleu
corpus_chrf = _chrf.corpus_chrf
corpus_ter = _ter.corpus_ter

#: metric id -> (corpus scorer, batched stat aggregator, direction)
_ASCENDING = True   # higher is better
_DESCENDING = False

_REGISTRY: dict[str, dict[str, Any]] = {
    "bleu": {"aggregate": _bleu.score_from_stats, "higher_better": _ASCENDING},
    "chrf": {"aggregate": _chrf.score_from_stats, "higher_better": _ASCENDING},
    "ter": {"aggregate": _ter.score_from_stats, "higher_better": _DESCENDING},
    "wer": {"aggregate": _error_rate.score_from_stats, "higher_better": _DESCENDING},
    "cer": {"aggregate": _error_rate.score_from_stats, "higher_better": _DESCENDING},
}

METRIC_IDS = tuple(_REGISTRY)


def higher_is_better(metric_id: str) -> bool:
    return _REGISTRY[metric_id]["higher_better"]


def batch_aggregator(metric_id: str, config: dict | None = None) -> Callable:
    """Aggregator mapping summed stat vectors (single or batched rows) to
    corpus scores; used by significance testing."""
    spec = _REGISTRY[metric_id]
    if metric_id == "chrf":
        beta = float((config or {}).get("beta", _chrf.DEFAULT_CONFIG["beta"]))
        return lambda stats: _chrf.score_from_stats(stats, beta=beta)
    return spec["aggregate"]


def aggregate_stats(metric_id: str, per_sentence_stats: Sequence[Sequence[float]],
                    config: dict | None = None) -> float:
    """Corpus score from per-sentence statistics alone."""
    summed = np.sum(np.asarray(per_sentence_stats, dtype=np.float64), axis=0)
    return float(batch_aggregator(metric_id, config)(summed))


def score_corpus(metric_id: str, hyps: Sequence[str], refs: Sequence[str],
                 config: dict | None = None, ids: Sequence[str] | None = None) -> ScoreReport:
    """Score a corpus with the named metric."""
    if metric_id == "bleu":
        return corpus_bleu(hyps, refs, config, ids)
    if metric_id == "chrf":
        return corpus_chrf(hyps, refs, config, ids)
    if metric_id == "ter":
        return corpus_ter(hyps, refs, config, ids)
    if metric_id == "wer":
        return corpus_wer(hyps, refs, ids)
    if metric_id == "cer":
        return corpus_cer(hyps, refs, ids)
    raise ValueError(f"unknown metric: {metric_id!r}")
