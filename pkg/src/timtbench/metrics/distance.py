"""Levenshtein distance over token sequences, the shared core of WER/CER/TER."""

from __future__ import annotations

from collections.abc import Sequence


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Minimum number of insertions, deletions, and substitutions turning
    ``a`` into ``b``.

    Symmetric, zero iff the sequences are equal element-wise.  Runs in
    O(len(a) * len(b)) time and O(min_len) space.
    """
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ai in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, bj in enumerate(b, start=1):
            cur[j] = min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (ai != bj),
            )
        prev = cur
    return prev[-1]
