"""Misbehaving child: dies as soon as the first request arrives."""
import sys

sys.stdin.readline()
print("boom", file=sys.stderr, flush=True)
sys.exit(3)
