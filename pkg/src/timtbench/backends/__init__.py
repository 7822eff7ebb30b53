"""Pluggable OCR / translation backends behind one wire protocol.

Local mocks, subprocess shims, and remote HTTP services all exchange the
same JSON envelope, so heterogeneous systems slot into the pipeline without
pipeline changes.  Backend configs are small JSON files::

    {"type": "mock_ocr", "noise": {"target_cer": 0.1, "seed": 7}}
    {"type": "mock_translate", "table": {"hello": "hallo"}}
    {"type": "http", "url": "https://...", "auth_header": "Authorization",
     "auth_env": "TIMT_API_KEY"}
    {"type": "subprocess", "argv": ["node", "shim/dist/main.js"]}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from ..errors import ConfigInvalid
from .http import HttpBackend, HttpConfig
from .mock import MockOcrBackend, MockTranslateBackend, NoiseSpec, corrupt_text, mock_ocr, mock_translate
from .protocol import (
    TASKS,
    OcrLine,
    OcrResult,
    error_response,
    make_request,
    ok_response,
    validate_request,
    validate_response,
)
from .subproc import SubprocessBackend

__all__ = [
    "TASKS",
    "HttpBackend",
    "HttpConfig",
    "MockOcrBackend",
    "MockTranslateBackend",
    "NoiseSpec",
    "OcrLine",
    "OcrResult",
    "SubprocessBackend",
    "corrupt_text",
    "error_response",
    "load_backend",
    "make_request",
    "mock_ocr",
    "mock_translate",
    "ok_response",
    "validate_request",
    "validate_response",
]


def _noise_from_dict(obj: dict[str, Any]) -> NoiseSpec:
    return NoiseSpec(
        target_cer=float(obj.get("target_cer", 0.0)),
        mix=tuple(obj.get("mix", (0.6, 0.2, 0.2))),
        seed=int(obj.get("seed", 0)),
    )


def load_backend(config: dict[str, Any] | str | Path, manifest=None):
    """Instantiate a backend handle from a config dict or JSON file path."""
    if isinstance(config, (str, Path)):
        path = Path(config)
        if not path.exists():
            raise ConfigInvalid(f"backend config not found: {path}")
        config = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(config, dict) or "type" not in config:
        raise ConfigInvalid("backend config must be an object with a 'type' field")

    kind = config["type"]
    if kind == "mock_ocr":
        if manifest is None:
            raise ConfigInvalid("mock_ocr backend needs a manifest")
        return MockOcrBackend(
            manifest,
            _noise_from_dict(config.get("noise", {})),
            side=config.get("side", "src"),
        )
    if kind == "mock_translate":
        return MockTranslateBackend(table=config.get("table"))
    if kind == "http":
        return HttpBackend(HttpConfig.from_dict(config))
    if kind == "subprocess":
        argv = config.get("argv")
        if not argv:
            raise ConfigInvalid("subprocess backend needs an argv list")
        return SubprocessBackend(argv, timeout_s=float(config.get("timeout_s", 120.0)),
                                 cwd=config.get("cwd"))
    raise ConfigInvalid(f"unknown backend type {kind!r}")
