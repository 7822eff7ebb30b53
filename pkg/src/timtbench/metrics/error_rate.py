"""Word and character error rates for OCR evaluation.

Both are Levenshtein distance normalized by reference length, reported as a
percentage.  Text is NFC-normalized with whitespace runs collapsed and is
case-sensitive; WER operates on whitespace tokens, CER on extended grapheme
clusters (spaces included).
"""

from __future__ import annotations

import unicodedata
from typing import Sequence

import numpy as np

from ..errors import EmptyReference, LengthMismatch
from .base import ScoreReport
from .distance import levenshtein
from .tokenizers import graphemes

DEFAULT_CONFIG = {"normalize": "nfc-collapse-whitespace", "case_sensitive": True}

STAT_SIZE = 2


def _normalize(text: str) -> str:
    return " ".join(unicodedata.normalize("NFC", text).split())


def _tokens(text: str, level: str) -> list[str]:
    normalized = _normalize(text)
    if level == "word":
        return normalized.split(" ") if normalized else []
    return graphemes(normalized)


def _rate(hyp: str, ref: str, level: str) -> float:
    ref_tokens = _tokens(ref, level)
    if not ref_tokens:
        raise EmptyReference(f"reference is empty after {level} tokenization")
    return 100.0 * levenshtein(_tokens(hyp, level), ref_tokens) / len(ref_tokens)


def wer(hyp: str, ref: str) -> float:
    """Word error rate percentage; reference must tokenize non-empty."""
    return _rate(hyp, ref, "word")


def cer(hyp: str, ref: str) -> float:
    """Character (grapheme) error rate percentage."""
    return _rate(hyp, ref, "char")


def score_from_stats(stats: "np.ndarray | Sequence[float]") -> "float | np.ndarray":
    arr = np.asarray(stats, dtype=np.float64)
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr[np.newaxis, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        score = 100.0 * np.where(arr[:, 1] > 0, arr[:, 0] / np.where(arr[:, 1] > 0, arr[:, 1], 1), 0.0)
    return float(score[0]) if squeeze else score


def _corpus_rate(metric_id: str, level: str, hyps: Sequence[str], refs: Sequence[str],
                 ids: Sequence[str] | None) -> ScoreReport:
    if len(hyps) != len(refs):
        raise LengthMismatch(f"{len(hyps)} hypotheses vs {len(refs)} references")
    if not hyps:
        raise LengthMismatch("cannot score an empty corpus")
    stats = []
    for hyp, ref in zip(hyps, refs):
        ref_tokens = _tokens(ref, level)
        if not ref_tokens:
            raise EmptyReference(f"reference is empty after {level} tokenization")
        edits = levenshtein(_tokens(hyp, level), ref_tokens)
        stats.append([float(edits), float(len(ref_tokens))])
    summed = np.sum(np.asarray(stats, dtype=np.float64), axis=0)
    return ScoreReport(
        metric_id=metric_id,
        corpus_score=float(score_from_stats(summed)),
        ids=list(ids) if ids is not None else [str(i) for i in range(len(hyps))],
        per_sentence_stats=stats,
        config=dict(DEFAULT_CONFIG),
        details={"total_edits": int(summed[0]), "total_ref_length": int(summed[1])},
    )


def corpus_wer(hyps: Sequence[str], refs: Sequence[str], ids: Sequence[str] | None = None) -> ScoreReport:
    """Corpus WER: summed edits over summed reference token counts."""
    return _corpus_rate("wer", "word", hyps, refs, ids)


def corpus_cer(hyps: Sequence[str], refs: Sequence[str], ids: Sequence[str] | None = None) -> ScoreReport:
    """Corpus CER: summed edits over summed reference grapheme counts."""
    return _corpus_rate("cer", "char", hyps, refs, ids)
