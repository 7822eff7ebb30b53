"""Paired approximate randomization testing between systems.

The test permutes stored per-sentence sufficient statistics: each
repetition independently swaps the two systems' stats per sample with
probability one half, recomputes the corpus-score difference from the
aggregated stats (text is never rescored), and counts permuted absolute
differences at least as large as the observed one.  The reported p-value is
smoothed: (count + 1) / (repetitions + 1).

An exact enumerator over all 2^n swap patterns serves as the oracle for
small sample counts, and a grouping helper turns all-pairs results into the
dagger-style tie labels used in result tables.  Labels are presentation
sugar over the p-matrix: connected components can join systems that are
pairwise different through an intermediary, so the p-matrix is always
emitted alongside.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import MismatchedRuns, TooManySamples, ValidationError
from .metrics import ScoreReport, batch_aggregator

DEFAULT_REPETITIONS = 10_000
DEFAULT_ALPHA = 0.05

_CHUNK = 2048
_MAX_EXHAUSTIVE = 16
_GROUP_SYMBOLS = ("†", "‡", "§", "¶", "‖", "‗")


@dataclass
class PairedRuns:
    """Per-sample statistics for two systems, aligned by sample id."""

    metric_id: str
    config: dict[str, Any]
    ids: list[str]
    stats_a: np.ndarray
    stats_b: np.ndarray

    @classmethod
    def from_reports(cls, a: ScoreReport, b: ScoreReport) -> "PairedRuns":
        if a.metric_id != b.metric_id or a.fingerprint != b.fingerprint:
            raise MismatchedRuns(
                f"config fingerprints differ: {a.metric_id}/{a.fingerprint} "
                f"vs {b.metric_id}/{b.fingerprint}"
            )
        if set(a.ids) != set(b.ids):
            raise MismatchedRuns("sample id sets differ between runs")
        if len(a.ids) != len(set(a.ids)):
            raise MismatchedRuns("duplicate sample ids")
        order = {sample_id: row for row, sample_id in enumerate(b.ids)}
        stats_a = np.asarray(a.per_sentence_stats, dtype=np.float64)
        stats_b_raw = np.asarray(b.per_sentence_stats, dtype=np.float64)
        stats_b = stats_b_raw[[order[sample_id] for sample_id in a.ids]]
        return cls(a.metric_id, dict(a.config), list(a.ids), stats_a, stats_b)

    @property
    def sample_count(self) -> int:
        return len(self.ids)


@dataclass
class SignificanceResult:
    metric_id: str
    observed_delta: float
    p_value: float
    repetitions: int
    alpha: float
    decision: str  # "different" | "not_different"
    seed: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "metric_id": self.metric_id,
            "observed_delta": self.observed_delta,
            "p_value": self.p_value,
            "repetitions": self.repetitions,
            "alpha": self.alpha,
            "decision": self.decision,
            "seed": self.seed,
        }


def _deltas_for_masks(runs: PairedRuns, masks: np.ndarray, aggregate) -> np.ndarray:
    """Corpus-score deltas for a batch of swap masks (rows of 0/1 floats)."""
    diff = runs.stats_b - runs.stats_a
    swapped = masks @ diff
    total_a = runs.stats_a.sum(axis=0)
    total_b = runs.stats_b.sum(axis=0)
    return np.asarray(aggregate(total_a + swapped)) - np.asarray(aggregate(total_b - swapped))


def observed_delta(runs: PairedRuns) -> float:
    aggregate = batch_aggregator(runs.metric_id, runs.config)
    return float(aggregate(runs.stats_a.sum(axis=0))) - float(aggregate(runs.stats_b.sum(axis=0)))


def art_paired(runs: PairedRuns, repetitions: int = DEFAULT_REPETITIONS,
               alpha: float = DEFAULT_ALPHA, seed: int = 0) -> SignificanceResult:
    """Two-sided paired approximate randomization test."""
    if runs.sample_count == 0:
        raise MismatchedRuns("cannot test runs with zero samples")
    if repetitions < 1:
        raise ValidationError("repetitions must be >= 1")

    aggregate = batch_aggregator(runs.metric_id, runs.config)
    delta_obs = observed_delta(runs)
    threshold = abs(delta_obs)

    rng = np.random.default_rng(seed)
    exceed = 0
    remaining = repetitions
    while remaining > 0:
        batch = min(_CHUNK, remaining)
        masks = (rng.random((batch, runs.sample_count)) < 0.5).astype(np.float64)
        deltas = _deltas_for_masks(runs, masks, aggregate)
        exceed += int(np.sum(np.abs(deltas) >= threshold))
        remaining -= batch

    p_value = (exceed + 1) / (repetitions + 1)
    return SignificanceResult(
        metric_id=runs.metric_id,
        observed_delta=delta_obs,
        p_value=p_value,
        repetitions=repetitions,
        alpha=alpha,
        decision="different" if p_value < alpha else "not_different",
        seed=seed,
    )


def exhaustive_permutation(runs: PairedRuns) -> float:
    """Exact two-sided tail probability over all 2^n swap patterns."""
    n = runs.sample_count
    if n == 0:
        raise MismatchedRuns("cannot test runs with zero samples")
    if n > _MAX_EXHAUSTIVE:
        raise TooManySamples(f"{n} samples; exhaustive enumeration is capped at {_MAX_EXHAUSTIVE}")

    aggregate = batch_aggregator(runs.metric_id, runs.config)
    threshold = abs(observed_delta(runs))

    total = 1 << n
    exceed = 0
    bits = np.arange(n)
    for start in range(0, total, 1 << 14):
        stop = min(start + (1 << 14), total)
        patterns = np.arange(start, stop, dtype=np.uint32)
        masks = ((patterns[:, None] >> bits) & 1).astype(np.float64)
        deltas = _deltas_for_masks(runs, masks, aggregate)
        exceed += int(np.sum(np.abs(deltas) >= threshold))
    return exceed / total


@dataclass
class SignificanceGroups:
    """All-pairs test results with tie-group labels in report order."""

    systems: list[str]
    metric_id: str
    alpha: float
    repetitions: int
    seed: int
    p_matrix: list[list[float | None]]
    labels: dict[str, str | None]
    results: dict[str, SignificanceResult] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "systems": self.systems,
            "metric_id": self.metric_id,
            "alpha": self.alpha,
            "repetitions": self.repetitions,
            "seed": self.seed,
            "p_matrix": self.p_matrix,
            "labels": self.labels,
            "pairs": {key: result.to_dict() for key, result in self.results.items()},
            "note": (
                "labels mark connected components of the not-different graph; "
                "the p-matrix is the authoritative output"
            ),
        }

    def dump_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True, indent=2)


def _pair_seed(seed: int, first: str, second: str) -> int:
    low, high = sorted((first, second))
    digest = hashlib.blake2b(f"{seed}\x1f{low}\x1f{high}".encode("utf-8"), digest_size=8)
    return int.from_bytes(digest.digest(), "big")


def significance_groups(reports: Sequence[tuple[str, ScoreReport]],
                        repetitions: int = DEFAULT_REPETITIONS,
                        alpha: float = DEFAULT_ALPHA, seed: int = 0) -> SignificanceGroups:
    """All-pairs randomization tests plus tie-group labels.

    Systems whose pairwise test cannot reject the null (p >= alpha) fall
    into the same group; groups of two or more are rendered with shared
    dagger-style symbols.
    """
    if len(reports) < 2:
        raise ValidationError("significance grouping needs at least two systems")
    names = [name for name, _ in reports]
    if len(names) != len(set(names)):
        raise ValidationError("system names must be unique")

    count = len(reports)
    p_matrix: list[list[float | None]] = [[None] * count for _ in range(count)]
    results: dict[str, SignificanceResult] = {}
    adjacency: dict[int, set[int]] = {i: set() for i in range(count)}

    for i in range(count):
        for j in range(i + 1, count):
            runs = PairedRuns.from_reports(reports[i][1], reports[j][1])
            result = art_paired(runs, repetitions, alpha, _pair_seed(seed, names[i], names[j]))
            results[f"{names[i]} vs {names[j]}"] = result
            p_matrix[i][j] = p_matrix[j][i] = result.p_value
            if result.decision == "not_different":
                adjacency[i].add(j)
                adjacency[j].add(i)

    # Connected components, discovered in report order.
    component_of: dict[int, int] = {}
    components: list[list[int]] = []
    for i in range(count):
        if i in component_of:
            continue
        stack, members = [i], []
        while stack:
            node = stack.pop()
            if node in component_of:
                continue
            component_of[node] = len(components)
            members.append(node)
            stack.extend(sorted(adjacency[node] - component_of.keys(), reverse=True))
        components.append(sorted(members))

    labels: dict[str, str | None] = {name: None for name in names}
    symbol_index = 0
    for members in components:
        if len(members) < 2:
            continue
        symbol = (
            _GROUP_SYMBOLS[symbol_index]
            if symbol_index < len(_GROUP_SYMBOLS)
            else f"#{symbol_index + 1}"
        )
        symbol_index += 1
        for member in members:
            labels[names[member]] = symbol

    return SignificanceGroups(
        systems=names,
        metric_id=reports[0][1].metric_id,
        alpha=alpha,
        repetitions=repetitions,
        seed=seed,
        p_matrix=p_matrix,
        labels=labels,
        results=results,
    )
