"""Deterministic fixture shared by the report golden tests.

Three locally scored systems (two with identical outputs, so they tie) and
one externally sourced row, plus a two-engine OCR comparison.
"""

from __future__ import annotations

from timtbench.metrics import corpus_cer, corpus_wer, score_corpus
from timtbench.report import ExternalRow
from timtbench.significance import significance_groups

_REFS = [
    "The old garden keeps a quiet cat.",
    "A small child reads the heavy book.",
    "Every bright window shows the river.",
    "One lazy dog sleeps near the station.",
    "The quick fox follows the brown letter.",
    "A green train leaves the new market.",
    "That quiet road finds the old city.",
    "Every small house watches the bright tree.",
    "The heavy gate closes before the rain.",
    "A new friend paints the quiet wall.",
    "One bright lamp opens the dark room.",
    "The brown horse jumps over the gate.",
]

_MID = [
    "The old garden keeps a cat.",
    "A child reads the heavy book.",
    "Every bright window shows a river.",
    "One lazy dog sleeps near that station.",
    "The quick fox follows the letter.",
    "A green train leaves the market.",
    "That road finds the old city.",
    "Every small house watches the tree.",
    "The heavy gate closes before rain.",
    "A new friend paints the wall.",
    "One bright lamp opens a dark room.",
    "The brown horse jumps over a gate.",
]


def translation_systems():
    """(name, {metric: report}) rows: alpha/beta tie, gamma is perfect."""
    systems = []
    for name, hyps in (("alpha", _MID), ("beta", list(_MID)), ("gamma", list(_REFS))):
        reports = {m: score_corpus(m, hyps, _REFS) for m in ("bleu", "chrf", "ter")}
        systems.append((name, reports))
    return systems


def translation_sig():
    systems = translation_systems()
    return significance_groups(
        [(name, reports["bleu"]) for name, reports in systems],
        repetitions=2000,
        alpha=0.05,
        seed=3,
    )


def external_rows():
    return [ExternalRow("delta-external", {"bleu": 17.9},
                        "values provided by the system authors; not scored locally")]


def ocr_rows():
    refs = ["the quick brown fox", "a lazy dog sleeps", "river market garden"]
    clean = ["the quick brown fox", "a lazy dog sleeps", "river market garden"]
    noisy = ["the quick brwn fox", "a lazy dog sleps", "rivr market garden"]
    noisier = ["the qick brown fx", "a lzy dog sleeps", "river marke garden"]
    rows = {}
    for lang, engine_hyps in (("en", {"engine-a": noisy, "engine-b": clean}),
                              ("de", {"engine-a": noisier, "engine-b": noisy})):
        rows[lang] = {
            engine: {"wer": corpus_wer(hyps, refs), "cer": corpus_cer(hyps, refs)}
            for engine, hyps in engine_hyps.items()
        }
    return rows
