"""Subprocess transport adapter.

Hosts a child process that speaks newline-delimited protocol JSON over its
standard streams.  One request is in flight per child; a crash surfaces as
:class:`ChildExited` with the captured stderr tail.
"""

from __future__ import annotations

import json
import queue
import subprocess
import threading
from typing import Sequence

from ..errors import BackendUnavailable, ChildExited, ProtocolError, SpawnFailure, Timeout
from .protocol import validate_request, validate_response

_STDERR_TAIL = 40


class SubprocessBackend:
    """Backend handle around a line-oriented child process."""

    def __init__(self, argv: Sequence[str], timeout_s: float = 120.0, cwd: str | None = None):
        self._argv = list(argv)
        self._timeout_s = timeout_s
        self._lock = threading.Lock()
        try:
            self._child = subprocess.Popen(
                self._argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
                cwd=cwd,
            )
        except OSError as exc:
            raise SpawnFailure(f"cannot start {self._argv[0]!r}: {exc}") from exc
        self._stdout_queue: queue.Queue[str | None] = queue.Queue()
        self._stderr_tail: list[str] = []
        threading.Thread(target=self._pump_stdout, daemon=True).start()
        threading.Thread(target=self._pump_stderr, daemon=True).start()

    def _pump_stdout(self) -> None:
        assert self._child.stdout is not None
        for line in self._child.stdout:
            self._stdout_queue.put(line)
        self._stdout_queue.put(None)

    def _pump_stderr(self) -> None:
        assert self._child.stderr is not None
        for line in self._child.stderr:
            self._stderr_tail.append(line.rstrip("\n"))
            del self._stderr_tail[:-_STDERR_TAIL]

    def _diagnostics(self) -> str:
        tail = "\n".join(self._stderr_tail[-_STDERR_TAIL:])
        return f"exit code {self._child.poll()}; stderr tail:\n{tail}" if tail else \
            f"exit code {self._child.poll()}"

    def probe(self) -> None:
        if self._child.poll() is not None:
            raise BackendUnavailable(f"child exited before first request: {self._diagnostics()}")

    def call(self, request: dict) -> dict:
        validate_request(request)
        with self._lock:
            if self._child.poll() is not None:
                raise ChildExited(self._diagnostics())
            assert self._child.stdin is not None
            try:
                self._child.stdin.write(json.dumps(request, ensure_ascii=False) + "\n")
                self._child.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise ChildExited(self._diagnostics()) from exc
            try:
                line = self._stdout_queue.get(timeout=self._timeout_s)
            except queue.Empty:
                raise Timeout(f"no reply from child within {self._timeout_s}s") from None
            if line is None:
                raise ChildExited(self._diagnostics())
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"child reply is not valid JSON: {line!r}") from exc
        return validate_response(obj, expect_id=request["id"])

    def close(self) -> None:
        if self._child.poll() is None:
            if self._child.stdin is not None:
                try:
                    self._child.stdin.close()
                except OSError:
                    pass
            try:
                self._child.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._child.kill()
                self._child.wait()

    def __enter__(self) -> "SubprocessBackend":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()
