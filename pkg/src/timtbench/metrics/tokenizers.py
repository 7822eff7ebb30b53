"""Tokenizers underlying the metric suite.

Three granularities are supported:

* ``whitespace`` - split on Unicode whitespace runs.
* ``intl_13a``   - the mteval-v13a scheme used by WMT-style BLEU: punctuation
  is split from words, except that periods and commas stay attached when
  surrounded by digits (decimal/thousand separators).
* ``char``       - one token per extended grapheme cluster.

Scores are only comparable within a single tokenizer, so every
:class:`TokenSequence` records which one produced it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import regex as _regex

TOKENIZER_IDS = ("whitespace", "intl_13a", "char")

_13A_PUNCT = re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])")
_13A_PERIOD_COMMA_BEFORE = re.compile(r"([^0-9])([\.,])")
_13A_PERIOD_COMMA_AFTER = re.compile(r"([\.,])([^0-9])")
_13A_DIGIT_DASH = re.compile(r"([0-9])(-)")
_WS_RUN = re.compile(r"\s+")

_GRAPHEME = _regex.compile(r"\X")


@dataclass(frozen=True)
class TokenSequence:
    """An ordered list of tokens plus the id of the tokenizer that made it.

    Behaves as a read-only sequence, so it feeds directly into the distance
    and TER routines.
    """

    tokens: tuple[str, ...]
    tokenizer_id: str

    def __post_init__(self):
        if self.tokenizer_id not in TOKENIZER_IDS:
            raise ValueError(f"unknown tokenizer_id: {self.tokenizer_id!r}")
        if any(t == "" for t in self.tokens):
            raise ValueError("token sequences must not contain empty tokens")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, index):
        return self.tokens[index]


def _tokenize_13a(line: str) -> list[str]:
    norm = line.replace("<skipped>", "")
    norm = norm.replace("-\n", "").replace("\n", " ")
    norm = norm.replace("&quot;", '"').replace("&amp;", "&")
    norm = norm.replace("&lt;", "<").replace("&gt;", ">")

    norm = f" {norm} "
    norm = _13A_PUNCT.sub(r" \1 ", norm)
    norm = _13A_PERIOD_COMMA_BEFORE.sub(r"\1 \2 ", norm)
    norm = _13A_PERIOD_COMMA_AFTER.sub(r" \1 \2", norm)
    norm = _13A_DIGIT_DASH.sub(r"\1 \2 ", norm)
    norm = _WS_RUN.sub(" ", norm)
    return norm.strip().split(" ") if norm.strip() else []


def graphemes(text: str) -> list[str]:
    """Split ``text`` into extended grapheme clusters."""
    return _GRAPHEME.findall(text)


def tokenize(text: str, tokenizer_id: str) -> TokenSequence:
    """Tokenize ``text``; empty text yields an empty sequence."""
    if tokenizer_id == "whitespace":
        tokens = text.split()
    elif tokenizer_id == "intl_13a":
        tokens = _tokenize_13a(text)
    elif tokenizer_id == "char":
        tokens = graphemes(text)
    else:
        raise ValueError(f"unknown tokenizer_id: {tokenizer_id!r}")
    return TokenSequence(tuple(tokens), tokenizer_id)
