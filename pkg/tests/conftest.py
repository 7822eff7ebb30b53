from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from timtbench.corpus import RenderSpec, generate_corpus

_NOUNS = "cat dog house tree river market train station letter garden road city book child window".split()
_VERBS = "runs jumps sleeps reads closes opens follows finds keeps leaves watches paints".split()
_ADJS = "quick brown lazy green old new quiet bright small heavy".split()


def make_sentence(rng: random.Random, min_len: int = 5, max_len: int = 11) -> str:
    length = rng.randrange(min_len, max_len + 1)
    words = [rng.choice(["The", "A", "Every", "One"]), rng.choice(_ADJS), rng.choice(_NOUNS),
             rng.choice(_VERBS)]
    while len(words) < length:
        words.append(rng.choice(_NOUNS + _ADJS + ["under", "over", "beside", "near"]))
    return " ".join(words) + rng.choice([".", "!", "?"])


def make_bitext(count: int, seed: int = 0) -> tuple[list[str], list[str], dict[str, str]]:
    """Aligned pseudo-bitext plus the exact translation table mapping
    source lines to target lines."""
    rng = random.Random(seed)
    src, tgt = [], []
    for _ in range(count):
        sentence = make_sentence(rng)
        src.append(sentence)
        tgt.append(" ".join(f"{w}-x" for w in sentence.split()))
    return src, tgt, dict(zip(src, tgt))


def write_bitext(directory: Path, src: list[str], tgt: list[str]) -> tuple[Path, Path]:
    src_path = directory / "src.txt"
    tgt_path = directory / "tgt.txt"
    src_path.write_text("\n".join(src) + "\n", encoding="utf-8")
    tgt_path.write_text("\n".join(tgt) + "\n", encoding="utf-8")
    return src_path, tgt_path


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory) -> Path:
    """A 12-sample rendered corpus shared across tests (read-only)."""
    root = tmp_path_factory.mktemp("corpus")
    src, tgt, _ = make_bitext(12, seed=101)
    src_path, tgt_path = write_bitext(root, src, tgt)
    spec = RenderSpec(seed=7)
    generate_corpus(src_path, tgt_path, spec, "en", "de", "test", root / "out")
    return root / "out"


GOLDEN_DIR = Path(__file__).parent / "golden"


def load_metrics_golden() -> dict:
    """Frozen scoring fixture: {hyp, ref} pair lines plus expected corpus
    scores and tokenizer golden cases."""
    import json

    pairs: list[dict[str, str]] = []
    expected: dict[str, float] = {}
    tokenize_cases: dict[str, list[str]] = {}
    with open(GOLDEN_DIR / "metrics_golden.jsonl", encoding="utf-8") as fh:
        for line in fh:
            record = json.loads(line)
            if record["type"] == "pair":
                pairs.append({"hyp": record["hyp"], "ref": record["ref"]})
            elif record["type"] == "corpus_scores":
                expected = record["expected_scores"]
            elif record["type"] == "tokenize_13a":
                tokenize_cases[record["text"]] = record["tokens"]
    return {"pairs": pairs, "expected": expected, "tokenize_13a": tokenize_cases}
