"""Misbehaving child: answers with an id that echoes nothing."""
import json
import sys

for line in sys.stdin:
    if not line.strip():
        continue
    print(json.dumps({"id": "out-of-order", "ok": True, "result": {"text": "x"}}), flush=True)
