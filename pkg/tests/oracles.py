"""Independent oracle implementations used only by tests.

These are deliberately written as naive brute-force algorithms, separate
from the package implementations they check.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product


def levenshtein_bruteforce(a, b) -> int:
    """Textbook recursive edit distance (memoized)."""
    a = tuple(a)
    b = tuple(b)

    @lru_cache(maxsize=None)
    def go(i: int, j: int) -> int:
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        diagonal = go(i + 1, j + 1) + (a[i] != b[j])
        return min(diagonal, 1 + go(i + 1, j), 1 + go(i, j + 1))

    return go(0, 0)


def shift_variants(cur: tuple, ref: tuple, max_span: int = 10) -> list[tuple]:
    """All sequences reachable by one block shift whose span matches the
    reference at the destination."""
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


def ter_exhaustive(hyp, ref, max_shifts: int = 3) -> int:
    """Exhaustive minimum of (shifts taken + edit distance) over all shift
    sequences up to ``max_shifts`` deep."""
    start = tuple(hyp)
    ref = tuple(ref)
    best = levenshtein_bruteforce(start, ref)
    seen = {start}
    frontier = [start]
    for depth in range(1, max_shifts + 1):
        if depth >= best:
            break  # a deeper sequence costs at least `depth` edits
        next_frontier = []
        for seq in frontier:
            for variant in shift_variants(seq, ref):
                if variant in seen:
                    continue
                seen.add(variant)
                next_frontier.append(variant)
                cost = depth + levenshtein_bruteforce(variant, ref)
                if cost < best:
                    best = cost
        frontier = next_frontier
        if not frontier:
            break
    return best


def small_domain_pairs(alphabet: str = "abc", max_len: int = 5):
    """Canonical representatives of all (hyp, ref) pairs with len(hyp) <= max_len,
    1 <= len(ref) <= max_len over the alphabet.

    Edit distance and TER depend only on the equality pattern of tokens, so
    checking one representative per relabeling class covers every pair.
    A pair is canonical when its symbols, scanned ref-first, appear in
    alphabet order.
    """
    symbols = tuple(alphabet)

    def canonical(seq_pair: tuple[tuple, tuple]) -> bool:
        order: dict[str, int] = {}
        for token in seq_pair[1] + seq_pair[0]:
            if token not in order:
                order[token] = len(order)
                if token != symbols[order[token]]:
                    return False
        return True

    for ref_len in range(1, max_len + 1):
        for ref in product(symbols, repeat=ref_len):
            for hyp_len in range(0, max_len + 1):
                for hyp in product(symbols, repeat=hyp_len):
                    if canonical((hyp, ref)):
                        yield hyp, ref


def exact_permutation_p(stats_a, stats_b, aggregate) -> float:
    """Exact two-sided randomization p-value by full 2^n enumeration,
    computed pairwise in pure Python (no shared code with the package)."""
    import numpy as np

    stats_a = [list(map(float, row)) for row in stats_a]
    stats_b = [list(map(float, row)) for row in stats_b]
    n = len(stats_a)
    width = len(stats_a[0])

    def corpus_delta(assign) -> float:
        total_a = [0.0] * width
        total_b = [0.0] * width
        for index, swap in enumerate(assign):
            first, second = (stats_b, stats_a) if swap else (stats_a, stats_b)
            for k in range(width):
                total_a[k] += first[index][k]
                total_b[k] += second[index][k]
        return float(aggregate(np.asarray(total_a))) - float(aggregate(np.asarray(total_b)))

    observed = abs(corpus_delta([False] * n))
    exceed = 0
    for pattern in range(1 << n):
        assign = [(pattern >> bit) & 1 for bit in range(n)]
        if abs(corpus_delta(assign)) >= observed:
            exceed += 1
    return exceed / (1 << n)
