"""Score reports: corpus-level metric values plus the per-sentence
sufficient statistics that make them recomputable and resamplable.

Every report carries a config fingerprint (metric id + all scoring
parameters).  Reports are only comparable - for tables and for significance
testing - when their fingerprints agree; silent parameter drift is the main
reproducibility hazard in MT scoring.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any


def config_fingerprint(metric_id: str, config: dict[str, Any]) -> str:
    """Stable short hash of a metric id and its scoring parameters."""
    canon = json.dumps({"metric": metric_id, **config}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


@dataclass
class ScoreReport:
    """Corpus score plus aligned per-sentence statistics for one metric."""

    metric_id: str
    corpus_score: float
    ids: list[str]
    per_sentence_stats: list[list[float]]
    config: dict[str, Any]
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def fingerprint(self) -> str:
        return config_fingerprint(self.metric_id, self.config)

    def recompute(self) -> float:
        """Corpus score recomputed from the stored per-sentence statistics.

        Must equal ``corpus_score`` exactly; used as a self-check and by the
        significance module, which never rescans text.
        """
        from . import aggregate_stats

        return aggregate_stats(self.metric_id, self.per_sentence_stats, self.config)

    def to_dict(self) -> dict[str, Any]:
        return {
            "metric_id": self.metric_id,
            "corpus_score": self.corpus_score,
            "fingerprint": self.fingerprint,
            "config": self.config,
            "ids": self.ids,
            "per_sentence_stats": self.per_sentence_stats,
            "details": self.details,
        }

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "ScoreReport":
        report = cls(
            metric_id=obj["metric_id"],
            corpus_score=obj["corpus_score"],
            ids=list(obj["ids"]),
            per_sentence_stats=[list(s) for s in obj["per_sentence_stats"]],
            config=dict(obj["config"]),
            details=dict(obj.get("details", {})),
        )
        stored = obj.get("fingerprint")
        if stored is not None and stored != report.fingerprint:
            raise ValueError(
                f"stored fingerprint {stored} does not match config ({report.fingerprint})"
            )
        return report

    def dump_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True)

    @classmethod
    def load_json(cls, text: str) -> "ScoreReport":
        return cls.from_dict(json.loads(text))
