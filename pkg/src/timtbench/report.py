"""Result tables: translation scores with significance marks, and OCR
engine comparisons, emitted as markdown or CSV.

Markdown values use one decimal place; CSV keeps full float precision so a
parsed CSV recovers the exact corpus scores.  Tables contain no timestamps
or other volatile metadata - identical inputs emit identical bytes - and
run metadata lives in a separate header block above the table.

Externally sourced rows (scores that were never produced by this harness)
come from a JSON sidecar and are always footnoted, never bolded, and never
part of significance grouping::

    [{"system": "...", "scores": {"bleu": 17.9}, "note": "private communication"}]
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

from .errors import FingerprintMismatch, ValidationError
from .metrics import ScoreReport, higher_is_better
from .significance import SignificanceGroups

_METRIC_ORDER = ("bleu", "chrf", "ter", "wer", "cer")
_METRIC_TITLES = {"bleu": "BLEU", "chrf": "chrF", "ter": "TER", "wer": "WER", "cer": "CER"}


def _arrow(metric_id: str) -> str:
    return "↑" if higher_is_better(metric_id) else "↓"


def _ordered_metrics(present: set[str]) -> list[str]:
    return [m for m in _METRIC_ORDER if m in present]


@dataclass
class ExternalRow:
    system: str
    scores: dict[str, float]
    note: str = ""


def load_external_scores(path: str | Path) -> list[ExternalRow]:
    rows = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(rows, list):
        raise ValidationError("external scores sidecar must be a JSON array")
    return [ExternalRow(r["system"], dict(r["scores"]), r.get("note", "")) for r in rows]


@dataclass
class ResultTable:
    """Rows of systems by columns of metrics, plus labels and footnotes."""

    caption: str
    metrics: list[str]
    rows: list[dict[str, Any]]  # {"system", "scores": {m: float}, "label", "external", "note"}
    fingerprints: dict[str, str]
    header_lines: list[str] = field(default_factory=list)

    def _best(self, metric_id: str) -> float | None:
        values = [row["scores"][metric_id] for row in self.rows
                  if not row["external"] and row["scores"].get(metric_id) is not None]
        if not values:
            return None
        return max(values) if higher_is_better(metric_id) else min(values)

    def to_markdown(self) -> str:
        out = [f"### {self.caption}", ""]
        out.extend(f"> {line}" for line in self.header_lines)
        if self.header_lines:
            out.append("")
        header = ["Model"] + [f"{_METRIC_TITLES[m]} {_arrow(m)}" for m in self.metrics]
        out.append("| " + " | ".join(header) + " |")
        out.append("|" + "---|" * len(header))
        notes: list[str] = []
        for row in self.rows:
            cells = [row["system"] + ("*" if row["external"] else "")]
            for metric_id in self.metrics:
                value = row["scores"].get(metric_id)
                if value is None:
                    cells.append("–")
                    continue
                text = f"{value:.1f}"
                if not row["external"] and value == self._best(metric_id):
                    text = f"**{text}**"
                if row["label"]:
                    text += row["label"]
                cells.append(text)
            out.append("| " + " | ".join(cells) + " |")
            if row["external"] and row["note"]:
                notes.append(f"\\* {row['system']}: {row['note']}")
        labeled = sorted({row["label"] for row in self.rows if row["label"]})
        if labeled:
            out.append("")
            out.append(
                "Systems sharing " + ", ".join(labeled) + " are not statistically different; "
                "all other pairs are. The p-matrix is authoritative; labels are presentation only."
            )
        if notes:
            out.append("")
            out.extend(notes)
        return "\n".join(out) + "\n"

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["system"] + list(self.metrics) + ["label", "external", "note"])
        for row in self.rows:
            record = [row["system"]]
            for metric_id in self.metrics:
                value = row["scores"].get(metric_id)
                record.append("" if value is None else repr(value))
            record.extend([row["label"] or "", "1" if row["external"] else "0", row["note"]])
            writer.writerow(record)
        return buffer.getvalue()

    def emit(self, fmt: str) -> str:
        if fmt == "markdown":
            return self.to_markdown()
        if fmt == "csv":
            return self.to_csv()
        raise ValidationError(f"unknown format {fmt!r}")


def build_table(systems: Sequence[tuple[str, Mapping[str, ScoreReport]]],
                sig: SignificanceGroups | None = None,
                caption: str = "Translation results",
                external: Sequence[ExternalRow] = ()) -> ResultTable:
    """Assemble a translation result table from per-system score reports."""
    if not systems:
        raise ValidationError("need at least one system")
    present: set[str] = set()
    for _name, reports in systems:
        present.update(reports.keys())
    metrics = _ordered_metrics(present)

    fingerprints: dict[str, str] = {}
    for name, reports in systems:
        for metric_id, report in reports.items():
            expected = fingerprints.setdefault(metric_id, report.fingerprint)
            if report.fingerprint != expected:
                raise FingerprintMismatch(
                    f"{name}/{metric_id}: fingerprint {report.fingerprint} != {expected}"
                )

    labels = sig.labels if sig is not None else {}
    rows = [
        {
            "system": name,
            "scores": {m: reports[m].corpus_score for m in metrics if m in reports},
            "label": labels.get(name),
            "external": False,
            "note": "",
        }
        for name, reports in systems
    ]
    rows.extend(
        {
            "system": ext.system,
            "scores": {m: ext.scores.get(m) for m in metrics},
            "label": None,
            "external": True,
            "note": ext.note,
        }
        for ext in external
    )

    header_lines = [f"{_METRIC_TITLES[m]} config fingerprint: {fingerprints[m]}" for m in metrics]
    if sig is not None:
        header_lines.append(
            f"Significance: paired randomization test, {sig.repetitions} repetitions, "
            f"alpha={sig.alpha}, seed={sig.seed}"
        )
    return ResultTable(caption, metrics, rows, fingerprints, header_lines)


def emit_table(systems: Sequence[tuple[str, Mapping[str, ScoreReport]]],
               sig: SignificanceGroups | None = None, fmt: str = "markdown",
               caption: str = "Translation results",
               external: Sequence[ExternalRow] = ()) -> str:
    return build_table(systems, sig, caption, external).emit(fmt)


def emit_ocr_table(rows: Mapping[str, Mapping[str, Mapping[str, ScoreReport]]],
                   fmt: str = "markdown",
                   caption: str = "OCR comparison") -> str:
    """Engine-comparison table: languages down, WER/CER per engine across.

    ``rows`` maps language -> engine -> {"wer": report, "cer": report}.
    Best (lowest) value per language and metric is bolded in markdown.
    """
    if not rows:
        raise ValidationError("need at least one language row")
    engines: list[str] = []
    for engine_map in rows.values():
        for engine in engine_map:
            if engine not in engines:
                engines.append(engine)

    fingerprints: dict[str, str] = {}
    for lang, engine_map in rows.items():
        for engine, reports in engine_map.items():
            for metric_id, report in reports.items():
                expected = fingerprints.setdefault(metric_id, report.fingerprint)
                if report.fingerprint != expected:
                    raise FingerprintMismatch(
                        f"{lang}/{engine}/{metric_id}: fingerprint differs"
                    )

    metrics = [m for m in ("wer", "cer") if m in fingerprints]
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["lang", "engine"] + metrics)
        for lang, engine_map in rows.items():
            for engine in engines:
                if engine not in engine_map:
                    continue
                reports = engine_map[engine]
                writer.writerow(
                    [lang, engine]
                    + [repr(reports[m].corpus_score) if m in reports else "" for m in metrics]
                )
        return buffer.getvalue()
    if fmt != "markdown":
        raise ValidationError(f"unknown format {fmt!r}")

    header = ["Lang"] + [
        f"{_METRIC_TITLES[m]} {_arrow(m)} ({engine})" for m in metrics for engine in engines
    ]
    out = [f"### {caption}", ""]
    out.append("| " + " | ".join(header) + " |")
    out.append("|" + "---|" * len(header))
    for lang, engine_map in rows.items():
        cells = [f"*{lang}*"]
        for metric_id in metrics:
            values = {
                engine: engine_map[engine][metric_id].corpus_score
                for engine in engines
                if engine in engine_map and metric_id in engine_map[engine]
            }
            best = min(values.values()) if values else None
            for engine in engines:
                if engine not in values:
                    cells.append("–")
                    continue
                text = f"{values[engine]:.1f}"
                if values[engine] == best and len(values) > 1:
                    text = f"**{text}**"
                cells.append(text)
        out.append("| " + " | ".join(cells) + " |")
    return "\n".join(out) + "\n"


def parse_csv_scores(text: str) -> dict[str, dict[str, float]]:
    """Inverse of :meth:`ResultTable.to_csv` for the numeric columns."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    metric_cols = [
        (index, name) for index, name in enumerate(header)
        if name in _METRIC_ORDER
    ]
    out: dict[str, dict[str, float]] = {}
    for record in reader:
        scores = {
            name: float(record[index]) for index, name in metric_cols if record[index] != ""
        }
        out[record[0]] = scores
    return out
