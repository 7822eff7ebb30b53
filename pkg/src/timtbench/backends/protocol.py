"""Wire protocol shared by every OCR / translation backend.

Requests and responses are single JSON objects (newline-delimited when
streamed over pipes):

    request  = {"id": str, "task": "ocr" | "translate" | "mm_translate",
                "payload": {...}}
    response = {"id": str, "ok": true,  "result": {...}}
             | {"id": str, "ok": false, "error": {"code": str, "message": str}}

Payloads by task:

* ``ocr``          - {"image_path": str} or {"image_b64": str}, optional "lang"
* ``translate``    - {"prompt": str}
* ``mm_translate`` - image field as for ocr, plus {"instruction": str}

Results by task:

* ``ocr``     - {"lines": [{"text": str, "bbox": [x, y, w, h],
                "confidence": float}, ...]}
* ``translate`` / ``mm_translate`` - {"text": str}

A response must echo the request id and carry exactly one of result/error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from ..errors import ProtocolError

TASKS = ("ocr", "translate", "mm_translate")


@dataclass(frozen=True)
class OcrLine:
    text: str
    bbox: tuple[int, int, int, int]  # x, y, w, h in pixels
    confidence: float

    def to_dict(self) -> dict[str, Any]:
        return {"text": self.text, "bbox": list(self.bbox), "confidence": self.confidence}


@dataclass(frozen=True)
class OcrResult:
    lines: tuple[OcrLine, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"lines": [line.to_dict() for line in self.lines]}

    @classmethod
    def from_dict(cls, obj: dict[str, Any], image_size: tuple[int, int] | None = None) -> "OcrResult":
        lines = []
        for index, raw in enumerate(obj.get("lines", [])):
            try:
                text = raw["text"]
                x, y, w, h = (int(v) for v in raw["bbox"])
                confidence = float(raw["confidence"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ProtocolError(f"ocr line {index} malformed: {exc}") from exc
            if not isinstance(text, str):
                raise ProtocolError(f"ocr line {index}: text must be a string")
            if not (0.0 <= confidence <= 1.0):
                raise ProtocolError(f"ocr line {index}: confidence {confidence} outside [0, 1]")
            if x < 0 or y < 0 or w < 0 or h < 0:
                raise ProtocolError(f"ocr line {index}: negative bbox {raw['bbox']}")
            if image_size is not None and (x + w > image_size[0] or y + h > image_size[1]):
                raise ProtocolError(f"ocr line {index}: bbox {raw['bbox']} exceeds image {image_size}")
            lines.append(OcrLine(text, (x, y, w, h), confidence))
        return cls(tuple(lines))


def make_request(task: str, payload: dict[str, Any], request_id: str) -> dict[str, Any]:
    if task not in TASKS:
        raise ProtocolError(f"unknown task {task!r}")
    return {"id": request_id, "task": task, "payload": payload}


def ok_response(request_id: str, result: dict[str, Any]) -> dict[str, Any]:
    return {"id": request_id, "ok": True, "result": result}


def error_response(request_id: str, code: str, message: str) -> dict[str, Any]:
    return {"id": request_id, "ok": False, "error": {"code": code, "message": message}}


def validate_request(obj: Any) -> dict[str, Any]:
    if not isinstance(obj, dict):
        raise ProtocolError("request must be a JSON object")
    if not isinstance(obj.get("id"), str):
        raise ProtocolError("request id must be a string")
    if obj.get("task") not in TASKS:
        raise ProtocolError(f"unknown task {obj.get('task')!r}")
    if not isinstance(obj.get("payload"), dict):
        raise ProtocolError("request payload must be an object")
    return obj


def validate_response(obj: Any, expect_id: str | None = None) -> dict[str, Any]:
    """Schema-check a response; raises :class:`ProtocolError` on any violation."""
    if not isinstance(obj, dict):
        raise ProtocolError("response must be a JSON object")
    if not isinstance(obj.get("id"), str):
        raise ProtocolError("response id must be a string")
    if expect_id is not None and obj["id"] != expect_id:
        raise ProtocolError(f"response id {obj['id']!r} does not echo request id {expect_id!r}")
    if not isinstance(obj.get("ok"), bool):
        raise ProtocolError("response ok flag must be a boolean")
    has_result = "result" in obj and obj["result"] is not None
    has_error = "error" in obj and obj["error"] is not None
    if has_result == has_error:
        raise ProtocolError("response must carry exactly one of result/error")
    if obj["ok"] != has_result:
        raise ProtocolError("response ok flag contradicts its body")
    if has_error:
        error = obj["error"]
        if not isinstance(error, dict) or not isinstance(error.get("code"), str) \
                or not isinstance(error.get("message"), str):
            raise ProtocolError("error body must carry string code and message")
    elif not isinstance(obj["result"], dict):
        raise ProtocolError("result must be an object")
    return obj
