"""HTTP transport adapter: POSTs protocol messages as JSON to a remote
backend service, with retries and exponential backoff for idempotent
requests.

Images referenced by local path are inlined as base64 before leaving the
machine, so remote calls are self-contained.  Credentials are never stored
in configs - the config names an environment variable and the adapter reads
it at startup.
"""

from __future__ import annotations

import base64
import json
import os
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from typing import Any

from ..errors import AuthMissing, BackendUnavailable, ProtocolError, Timeout
from .protocol import validate_request, validate_response


@dataclass
class HttpConfig:
    url: str
    auth_header: str | None = None
    auth_env: str | None = None
    timeout_s: float = 30.0
    retries: int = 2
    backoff_s: float = 0.5
    params: dict[str, Any] = field(default_factory=dict)  # opaque pass-through

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "HttpConfig":
        return cls(
            url=obj["url"],
            auth_header=obj.get("auth_header"),
            auth_env=obj.get("auth_env"),
            timeout_s=float(obj.get("timeout_s", 30.0)),
            retries=int(obj.get("retries", 2)),
            backoff_s=float(obj.get("backoff_s", 0.5)),
            params=dict(obj.get("params", {})),
        )


class HttpBackend:
    """Backend handle speaking the wire protocol over HTTP POST."""

    def __init__(self, config: HttpConfig):
        if not config.url.startswith(("http://", "https://")):
            raise ProtocolError(f"malformed backend url: {config.url!r}")
        self._config = config
        self._auth_value: str | None = None
        if config.auth_header:
            if not config.auth_env:
                raise AuthMissing("auth_header configured without auth_env")
            value = os.environ.get(config.auth_env)
            if not value:
                raise AuthMissing(f"environment variable {config.auth_env} is unset")
            self._auth_value = value

    def probe(self) -> None:
        """Reachability check; any HTTP response counts as reachable."""
        request = urllib.request.Request(self._config.url, method="GET")
        try:
            with urllib.request.urlopen(request, timeout=self._config.timeout_s):
                pass
        except urllib.error.HTTPError:
            return  # the server answered; status is irrelevant for a probe
        except (urllib.error.URLError, OSError) as exc:
            raise BackendUnavailable(f"{self._config.url}: {exc}") from exc

    def call(self, request: dict) -> dict:
        validate_request(request)
        payload = dict(request["payload"])
        if "image_path" in payload:  # local paths mean nothing to a remote service
            with open(payload.pop("image_path"), "rb") as fh:
                payload["image_b64"] = base64.b64encode(fh.read()).decode("ascii")
        if self._config.params:
            payload["params"] = self._config.params
        request = {**request, "payload": payload}
        body = json.dumps(request, ensure_ascii=False).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        if self._auth_value and self._config.auth_header:
            headers[self._config.auth_header] = self._auth_value

        last_error: Exception | None = None
        for attempt in range(self._config.retries + 1):
            if attempt:
                time.sleep(self._config.backoff_s * (2 ** (attempt - 1)))
            http_request = urllib.request.Request(
                self._config.url, data=body, headers=headers, method="POST"
            )
            try:
                with urllib.request.urlopen(http_request, timeout=self._config.timeout_s) as reply:
                    raw = reply.read()
                break
            except urllib.error.HTTPError as exc:
                raise ProtocolError(f"backend returned HTTP {exc.code}") from exc
            except (urllib.error.URLError, OSError, TimeoutError) as exc:
                last_error = exc
        else:
            raise Timeout(f"no answer from {self._config.url} "
                          f"after {self._config.retries + 1} attempts: {last_error}")

        try:
            obj = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ProtocolError(f"backend reply is not valid JSON: {exc}") from exc
        return validate_response(obj, expect_id=request["id"])

    def close(self) -> None:
        return None
