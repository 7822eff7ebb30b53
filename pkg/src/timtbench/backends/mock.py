"""Deterministic mock backends.

The OCR mock replays a sample's ground-truth source text corrupted
character-wise at a configurable rate, with line boxes synthesized from the
stored render meta - a ground-truth-backed test double that makes
controlled error-propagation studies possible without a real engine.  The
translation mock answers from an exact-match table, falling back to echoing
the source text it finds in the prompt.
"""

from __future__ import annotations

import hashlib
import random
import re
import string
import warnings
from dataclasses import dataclass

from ..errors import ProtocolError, ValidationError
from ..metrics import graphemes
from .protocol import OcrLine, OcrResult, error_response, ok_response, validate_request

_INSERT_POOL = string.ascii_letters


@dataclass(frozen=True)
class NoiseSpec:
    """Character-level corruption: rate plus substitution/deletion/insertion mix."""

    target_cer: float = 0.0
    mix: tuple[float, float, float] = (0.6, 0.2, 0.2)
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.target_cer <= 1.0):
            raise ValidationError("target_cer must be within [0, 1]")
        if len(self.mix) != 3 or any(p < 0 for p in self.mix) or abs(sum(self.mix) - 1.0) > 1e-9:
            raise ValidationError("operation mix must be three non-negative probabilities summing to 1")


def corrupt_text(text: str, noise: NoiseSpec, rng: random.Random) -> str:
    """Apply character-level noise at roughly ``target_cer`` edits per character."""
    if noise.target_cer == 0.0:
        return text
    sub_p, del_p, _ = noise.mix
    out: list[str] = []
    for ch in graphemes(text):
        if rng.random() >= noise.target_cer:
            out.append(ch)
            continue
        op = rng.random()
        if op < sub_p:
            replacement = rng.choice(_INSERT_POOL)
            while replacement == ch:
                replacement = rng.choice(_INSERT_POOL)
            out.append(replacement)
        elif op < sub_p + del_p:
            continue
        else:
            out.append(ch)
            out.append(rng.choice(_INSERT_POOL))
    return "".join(out)


def _sample_rng(noise: NoiseSpec, sample_id: str) -> random.Random:
    digest = hashlib.blake2b(f"{noise.seed}\x1f{sample_id}".encode("utf-8"), digest_size=8)
    return random.Random(int.from_bytes(digest.digest(), "big"))


def mock_ocr(sample, noise: NoiseSpec, side: str = "src") -> OcrResult:
    """Ground-truth OCR double: per-line text from the sample, corrupted at
    ``noise.target_cer``, with boxes taken from the stored render meta."""
    meta = (sample.render_meta or {}).get(side)
    if meta is None or "lines" not in meta:
        raise ValidationError(f"sample {sample.id} has no render meta for side {side!r}")
    rng = _sample_rng(noise, f"{sample.id}:{side}")
    lines = []
    for entry in meta["lines"]:
        corrupted = corrupt_text(entry["text"], noise, rng)
        confidence = max(0.0, min(1.0, 1.0 - noise.target_cer))
        lines.append(OcrLine(corrupted, tuple(entry["bbox"]), confidence))
    return OcrResult(tuple(lines))


_LABELED_LINE = re.compile(r"^([A-Z][A-Za-z]*)(?: \(JSON\))?: ?(.*)$", re.MULTILINE)


def extract_source_text(prompt: str) -> str | None:
    """Pull the source text out of a labeled prompt line ("English: ...")."""
    best: str | None = None
    for match in _LABELED_LINE.finditer(prompt):
        payload = match.group(2).strip()
        if payload:
            best = payload
    if best is None:
        return None
    if len(best) >= 2 and best[0] == '"' and best[-1] == '"':
        best = best[1:-1]
    return best


def mock_translate(prompt: str, table: dict[str, str] | None = None) -> str:
    """Table lookup on the prompt's source text; identity echo otherwise."""
    source = extract_source_text(prompt)
    if source is None:
        warnings.warn("mock_translate could not locate a source line in the prompt")
        return ""
    if table and source in table:
        return table[source]
    return source


class MockOcrBackend:
    """Protocol adapter over :func:`mock_ocr`; request ids must be sample ids."""

    def __init__(self, manifest, noise: NoiseSpec, side: str = "src"):
        self._samples = {sample.id: sample for sample in manifest.samples}
        self._noise = noise
        self._side = side

    def probe(self) -> None:
        return None

    def call(self, request: dict) -> dict:
        validate_request(request)
        if request["task"] != "ocr":
            return error_response(request["id"], "UnsupportedTask", request["task"])
        sample = self._samples.get(request["id"])
        if sample is None:
            return error_response(request["id"], "UnknownSample", request["id"])
        result = mock_ocr(sample, self._noise, self._side)
        return ok_response(request["id"], result.to_dict())

    def close(self) -> None:
        return None


class MockTranslateBackend:
    """Protocol adapter over :func:`mock_translate`."""

    def __init__(self, table: dict[str, str] | None = None):
        self._table = table or {}

    def probe(self) -> None:
        return None

    def call(self, request: dict) -> dict:
        validate_request(request)
        if request["task"] != "translate":
            return error_response(request["id"], "UnsupportedTask", request["task"])
        prompt = request["payload"].get("prompt")
        if not isinstance(prompt, str):
            raise ProtocolError("translate payload must carry a prompt string")
        return ok_response(request["id"], {"text": mock_translate(prompt, self._table)})

    def close(self) -> None:
        return None
