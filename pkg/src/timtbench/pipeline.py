"""End-to-end evaluation pipeline: OCR text assembly, prompt construction,
backend invocation, and output cleaning.

Two routes are supported: the modular route (OCR stage, then a text
translation backend) and the single-step multimodal route (the image goes
straight to an ``mm_translate`` backend, no OCR stage).  A ``ground_truth``
OCR mode bypasses recognition entirely and feeds the stored source text,
which isolates translation quality from OCR quality.

Per-sample failures are recorded as typed errors and never abort the run;
records stream to disk as they complete, so interrupted runs resume by id.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Any, Sequence

from .backends import OcrResult, load_backend, make_request
from .corpus import Manifest, load_manifest
from .errors import BackendError, ConfigInvalid, TimtError
from .metrics import ScoreReport, config_fingerprint, score_corpus
from .prompts import TEMPLATE_IDS, build_prompt, clean_output_verbose, language_name


@dataclass
class RunRecord:
    """Everything one sample produced on its way through the pipeline."""

    sample_id: str
    ocr_text: str = ""
    prompt: str = ""
    raw_reply: str = ""
    hypothesis: str | None = None
    timing_ms: dict[str, float] = field(default_factory=dict)
    error: dict[str, str] | None = None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "RunRecord":
        return cls(
            sample_id=obj["sample_id"],
            ocr_text=obj.get("ocr_text", ""),
            prompt=obj.get("prompt", ""),
            raw_reply=obj.get("raw_reply", ""),
            hypothesis=obj.get("hypothesis"),
            timing_ms=dict(obj.get("timing_ms", {})),
            error=obj.get("error"),
            warnings=list(obj.get("warnings", [])),
        )


@dataclass
class RunConfig:
    """One pipeline run: corpus, direction, backends, prompting."""

    manifest: str
    src_lang: str
    tgt_lang: str
    mt: dict[str, Any]
    ocr: dict[str, Any] | str = "ground_truth"
    template_id: str = "tag_pair"
    split: str = "test"
    concurrency: int = 1
    seed: int = 0
    name: str = "run"

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "RunConfig":
        try:
            return cls(**obj)
        except TypeError as exc:
            raise ConfigInvalid(str(exc)) from exc

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigInvalid(f"run config not found: {path}")
        try:
            return cls.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"run config is not valid JSON: {exc}") from exc

    def validate(self) -> None:
        if self.template_id not in TEMPLATE_IDS:
            raise ConfigInvalid(f"unknown template_id {self.template_id!r}")
        if self.src_lang == self.tgt_lang:
            raise ConfigInvalid("direction languages must differ")
        if self.concurrency < 1:
            raise ConfigInvalid("concurrency must be >= 1")
        if self.template_id == "mm_single":
            if self.ocr != "ground_truth" and self.ocr:
                raise ConfigInvalid("mm_single routes images directly; no OCR backend allowed")
        language_name(self.src_lang)
        language_name(self.tgt_lang)


def assemble_ocr_text(result: OcrResult) -> str:
    """Join recognized lines in reading order: top-to-bottom, then
    left-to-right; single spaces between lines."""
    ordered = sorted(result.lines, key=lambda line: (line.bbox[1], line.bbox[0]))
    return " ".join(line.text for line in ordered if line.text)


def _direction_sides(manifest: Manifest, src_lang: str, tgt_lang: str) -> tuple[str, str]:
    """Map a translation direction onto manifest sides.

    Returns (source side, reference side), each "src" or "tgt".
    """
    if not manifest.samples:
        raise ConfigInvalid("manifest has no samples")
    sample = manifest.samples[0]
    if (sample.src_lang, sample.tgt_lang) == (src_lang, tgt_lang):
        return "src", "tgt"
    if (sample.src_lang, sample.tgt_lang) == (tgt_lang, src_lang):
        return "tgt", "src"
    raise ConfigInvalid(
        f"direction {src_lang}->{tgt_lang} not available in manifest "
        f"({sample.src_lang}/{sample.tgt_lang})"
    )


def side_text(sample, side: str) -> str:
    return sample.src_text if side == "src" else sample.tgt_text


def side_image(sample, side: str) -> str:
    return sample.src_image_path if side == "src" else sample.tgt_image_path


class _SampleProcessor:
    def __init__(self, cfg: RunConfig, manifest: Manifest, source_side: str,
                 ocr_backend, mt_backend):
        self.cfg = cfg
        self.manifest = manifest
        self.source_side = source_side
        self.ocr_backend = ocr_backend
        self.mt_backend = mt_backend
        self.tgt_name = language_name(cfg.tgt_lang)

    def __call__(self, sample) -> RunRecord:
        record = RunRecord(sample_id=sample.id)
        multimodal = self.cfg.template_id == "mm_single"
        image_path = str(self.manifest.resolve(side_image(sample, self.source_side)))

        stage = "ocr"
        try:
            started = time.perf_counter()
            if multimodal:
                record.ocr_text = ""
            elif self.ocr_backend is None:  # ground truth mode
                record.ocr_text = side_text(sample, self.source_side)
            else:
                request = make_request("ocr", {"image_path": image_path,
                                               "lang": self.cfg.src_lang}, sample.id)
                response = self.ocr_backend.call(request)
                if not response["ok"]:
                    raise BackendError(
                        f"{response['error']['code']}: {response['error']['message']}"
                    )
                result = OcrResult.from_dict(
                    response["result"], image_size=tuple(self.manifest.spec.canvas_size)
                )
                record.ocr_text = assemble_ocr_text(result)
            record.timing_ms[stage] = round((time.perf_counter() - started) * 1000, 3)

            stage = "prompt"
            record.prompt = build_prompt(
                self.cfg.template_id, self.cfg.src_lang, self.cfg.tgt_lang, record.ocr_text
            )

            stage = "translate"
            started = time.perf_counter()
            if multimodal:
                request = make_request(
                    "mm_translate",
                    {"image_path": image_path, "instruction": record.prompt},
                    sample.id,
                )
            else:
                request = make_request("translate", {"prompt": record.prompt}, sample.id)
            response = self.mt_backend.call(request)
            if not response["ok"]:
                raise BackendError(
                    f"{response['error']['code']}: {response['error']['message']}"
                )
            reply = response["result"].get("text")
            if not isinstance(reply, str):
                raise BackendError("translation result is missing a text field")
            record.raw_reply = reply
            record.timing_ms[stage] = round((time.perf_counter() - started) * 1000, 3)

            stage = "clean"
            record.hypothesis, notes = clean_output_verbose(
                record.raw_reply, self.cfg.template_id, tgt_lang_name=self.tgt_name
            )
            record.warnings.extend(notes)
        except (TimtError, OSError) as exc:
            record.error = {"stage": stage, "code": type(exc).__name__, "message": str(exc)}
            record.hypothesis = None
        return record


def run_pipeline(cfg: RunConfig, out_path: str | Path | None = None,
                 ) -> tuple[list[RunRecord], dict[str, Any]]:
    """Run the pipeline over every selected sample.

    Emits one record per sample regardless of failures.  When ``out_path``
    exists, records already present there are kept and only missing sample
    ids are processed (resume-by-id); new records are appended as they
    complete.
    """
    cfg.validate()
    manifest = load_manifest(Path(cfg.manifest))
    source_side, _ = _direction_sides(manifest, cfg.src_lang, cfg.tgt_lang)
    samples = [s for s in manifest.samples if s.split == cfg.split]
    if not samples:
        raise ConfigInvalid(f"manifest has no samples in split {cfg.split!r}")

    multimodal = cfg.template_id == "mm_single"
    ocr_backend = None
    if not multimodal and cfg.ocr != "ground_truth":
        ocr_backend = load_backend(cfg.ocr, manifest)
    mt_backend = load_backend(cfg.mt, manifest)

    for backend in filter(None, (ocr_backend, mt_backend)):
        backend.probe()

    existing: dict[str, RunRecord] = {}
    if out_path is not None:
        out_path = Path(out_path)
        if out_path.exists():
            for record in read_run(out_path):
                existing[record.sample_id] = record

    processor = _SampleProcessor(cfg, manifest, source_side, ocr_backend, mt_backend)
    pending = [s for s in samples if s.id not in existing]

    produced: dict[str, RunRecord] = {}
    sink = open(out_path, "a", encoding="utf-8") if out_path is not None else None
    try:
        def drain(completed) -> None:
            for record in completed:  # ordered single writer
                produced[record.sample_id] = record
                if sink is not None:
                    sink.write(json.dumps(record.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")
                    sink.flush()

        if cfg.concurrency == 1:
            drain(map(processor, pending))
        else:
            with ThreadPoolExecutor(max_workers=cfg.concurrency) as executor:
                drain(executor.map(processor, pending))
    finally:
        if sink is not None:
            sink.close()
        for backend in filter(None, (ocr_backend, mt_backend)):
            backend.close()

    records = [existing.get(s.id) or produced[s.id] for s in samples]
    failed = sum(1 for r in records if r.error is not None)
    config_snapshot = asdict(cfg)
    summary = {
        "name": cfg.name,
        "total": len(records),
        "ok": len(records) - failed,
        "failed": failed,
        "resumed": len(existing),
        "direction": f"{cfg.src_lang}-{cfg.tgt_lang}",
        "config": config_snapshot,
        "config_fingerprint": config_fingerprint("run", config_snapshot),
        "timing_ms": {
            stage: round(sum(r.timing_ms.get(stage, 0.0) for r in records), 3)
            for stage in ("ocr", "translate")
        },
    }
    if out_path is not None:
        summary_path = Path(str(out_path) + ".summary.json")
        summary_path.write_text(
            json.dumps(summary, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )
    return records, summary


def read_run(path: str | Path) -> list[RunRecord]:
    """Load run records, deduplicating by sample id (first record wins)."""
    records: dict[str, RunRecord] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = RunRecord.from_dict(json.loads(line))
            records.setdefault(record.sample_id, record)
    return list(records.values())


def score_run(records: Sequence[RunRecord], manifest: Manifest, src_lang: str, tgt_lang: str,
              metrics: Sequence[str], failed_policy: str = "empty",
              ) -> dict[str, ScoreReport]:
    """Score hypotheses against the reference side of the manifest.

    ``failed_policy`` decides how records with errors score: "empty" treats
    them as empty hypotheses (the default, harshest reading), "exclude"
    drops them and annotates the report.
    """
    if failed_policy not in ("empty", "exclude"):
        raise ConfigInvalid(f"unknown failed_policy {failed_policy!r}")
    _, reference_side = _direction_sides(manifest, src_lang, tgt_lang)
    by_id = {sample.id: sample for sample in manifest.samples}

    ids: list[str] = []
    hyps: list[str] = []
    refs: list[str] = []
    failed = 0
    for record in records:
        sample = by_id.get(record.sample_id)
        if sample is None:
            raise ConfigInvalid(f"run record {record.sample_id} not present in manifest")
        if record.error is not None:
            failed += 1
            if failed_policy == "exclude":
                continue
        ids.append(record.sample_id)
        hyps.append(record.hypothesis or "")
        refs.append(side_text(sample, reference_side))

    reports: dict[str, ScoreReport] = {}
    for metric_id in metrics:
        report = score_corpus(metric_id, hyps, refs, ids=ids)
        report.details["failed_samples"] = failed
        report.details["failed_policy"] = failed_policy
        reports[metric_id] = report
    return reports
