from __future__ import annotations

import json
from pathlib import Path

import pytest

from timtbench.backends import OcrLine, OcrResult, error_response, ok_response
from timtbench.corpus import load_manifest
from timtbench.errors import BackendUnavailable, ConfigInvalid
from timtbench.metrics import corpus_bleu
from timtbench.pipeline import (
    RunConfig,
    RunRecord,
    assemble_ocr_text,
    read_run,
    run_pipeline,
    score_run,
)


def _line(text: str, x: int, y: int) -> OcrLine:
    return OcrLine(text, (x, y, 50, 20), 0.9)


def test_assemble_orders_top_to_bottom():
    result = OcrResult((_line("bottom", 0, 100), _line("top", 0, 10)))
    assert assemble_ocr_text(result) == "top bottom"


def test_assemble_single_line_verbatim():
    assert assemble_ocr_text(OcrResult((_line("only", 5, 5),))) == "only"


def test_assemble_ties_break_left_to_right():
    result = OcrResult((_line("right", 200, 10), _line("left", 3, 10)))
    assert assemble_ocr_text(result) == "left right"


def test_assemble_empty_result():
    assert assemble_ocr_text(OcrResult(())) == ""


def _config(small_corpus: Path, **overrides) -> RunConfig:
    base = dict(
        manifest=str(small_corpus / "manifest.jsonl"),
        src_lang="en",
        tgt_lang="de",
        mt={"type": "mock_translate"},
        ocr="ground_truth",
        template_id="tag_pair",
    )
    base.update(overrides)
    return RunConfig.from_dict(base)


def test_identity_composition(small_corpus):
    """Zero-noise OCR + identity translation returns the source texts."""
    cfg = _config(small_corpus, ocr={"type": "mock_ocr", "noise": {"target_cer": 0.0}})
    records, summary = run_pipeline(cfg)
    manifest = load_manifest(small_corpus / "manifest.jsonl")
    assert summary == {**summary, "ok": len(manifest.samples), "failed": 0}
    for record, sample in zip(records, manifest.samples):
        assert record.sample_id == sample.id
        assert record.error is None
        assert record.hypothesis == sample.src_text


def test_ground_truth_with_table(small_corpus):
    manifest = load_manifest(small_corpus / "manifest.jsonl")
    table = {s.src_text: s.tgt_text for s in manifest.samples}
    cfg = _config(small_corpus, mt={"type": "mock_translate", "table": table})
    records, _ = run_pipeline(cfg)
    for record, sample in zip(records, manifest.samples):
        assert record.hypothesis == sample.tgt_text


def test_stage_isolation_bleu_100(small_corpus):
    cfg = _config(small_corpus)
    records, _ = run_pipeline(cfg)
    manifest = load_manifest(small_corpus / "manifest.jsonl")
    hyps = [r.hypothesis for r in records]
    srcs = [s.src_text for s in manifest.samples]
    assert corpus_bleu(hyps, srcs).corpus_score == 100.0


class _FailingTranslator:
    """Scripted backend: errors on the given sample ids."""

    def __init__(self, fail_ids):
        self.fail_ids = set(fail_ids)

    def probe(self):
        return None

    def call(self, request):
        if request["id"] in self.fail_ids:
            return error_response(request["id"], "Scripted", "deliberate failure")
        return ok_response(request["id"], {"text": "ok"})

    def close(self):
        return None


def test_scripted_failures_keep_record_count(small_corpus, monkeypatch):
    manifest = load_manifest(small_corpus / "manifest.jsonl")
    fail_ids = {manifest.samples[1].id, manifest.samples[3].id}

    import timtbench.pipeline as pipeline_module

    real_load = pipeline_module.load_backend

    def fake_load(config, manifest=None):
        if isinstance(config, dict) and config.get("type") == "failing":
            return _FailingTranslator(fail_ids)
        return real_load(config, manifest)

    monkeypatch.setattr(pipeline_module, "load_backend", fake_load)
    cfg = _config(small_corpus, mt={"type": "failing"})
    records, summary = run_pipeline(cfg)

    assert len(records) == len(manifest.samples)
    failed = [r for r in records if r.error is not None]
    assert {r.sample_id for r in failed} == fail_ids
    assert summary["ok"] == len(manifest.samples) - 2
    assert summary["failed"] == 2
    for record in failed:
        assert record.error["stage"] == "translate"
        assert record.hypothesis is None
        assert record.raw_reply == ""  # stages after the failure stay empty


def test_records_written_incrementally_and_resumable(small_corpus, tmp_path):
    cfg = _config(small_corpus)
    out = tmp_path / "run.jsonl"
    records_full, _ = run_pipeline(cfg, out_path=out)

    # simulate an interrupted run: keep only the first 5 records
    lines = out.read_text(encoding="utf-8").splitlines()
    partial = tmp_path / "partial.jsonl"
    partial.write_text("\n".join(lines[:5]) + "\n", encoding="utf-8")
    records_resumed, summary = run_pipeline(cfg, out_path=partial)

    assert summary["resumed"] == 5
    assert [(r.sample_id, r.hypothesis) for r in records_resumed] == \
        [(r.sample_id, r.hypothesis) for r in records_full]
    assert len(read_run(partial)) == len(records_full)


def test_concurrent_run_matches_serial(small_corpus):
    serial, _ = run_pipeline(_config(small_corpus, concurrency=1))
    parallel, _ = run_pipeline(_config(small_corpus, concurrency=4))
    assert [(r.sample_id, r.hypothesis) for r in serial] == \
        [(r.sample_id, r.hypothesis) for r in parallel]


class _MmBackend:
    def __init__(self):
        self.tasks = []

    def probe(self):
        return None

    def call(self, request):
        self.tasks.append(request["task"])
        assert "image_path" in request["payload"]
        assert "instruction" in request["payload"]
        return ok_response(request["id"], {"text": "multimodal answer"})

    def close(self):
        return None


def test_mm_single_routes_image_directly(small_corpus, monkeypatch):
    backend = _MmBackend()
    import timtbench.pipeline as pipeline_module

    monkeypatch.setattr(pipeline_module, "load_backend", lambda config, manifest=None: backend)
    cfg = _config(small_corpus, template_id="mm_single", mt={"type": "whatever"})
    records, _ = run_pipeline(cfg)
    assert set(backend.tasks) == {"mm_translate"}
    for record in records:
        assert record.ocr_text == ""  # no OCR stage on the single-step route
        assert record.hypothesis == "multimodal answer"


class _ChattyJsonBackend:
    def probe(self):
        return None

    def call(self, request):
        return ok_response(request["id"], {"text": "Sure thing! Here you go."})

    def close(self):
        return None


def test_clean_fallbacks_recorded_as_warnings(small_corpus, monkeypatch):
    import timtbench.pipeline as pipeline_module

    monkeypatch.setattr(pipeline_module, "load_backend",
                        lambda config, manifest=None: _ChattyJsonBackend())
    cfg = _config(small_corpus, template_id="instruct_json", mt={"type": "whatever"})
    records, _ = run_pipeline(cfg)
    for record in records:
        assert record.error is None
        assert any("json parse failed" in note for note in record.warnings)


def test_reverse_direction_uses_other_side(small_corpus):
    cfg = _config(small_corpus, src_lang="de", tgt_lang="en")
    records, _ = run_pipeline(cfg)
    manifest = load_manifest(small_corpus / "manifest.jsonl")
    for record, sample in zip(records, manifest.samples):
        assert record.hypothesis == sample.tgt_text  # German side is the source now


def test_unavailable_direction_rejected(small_corpus):
    cfg = _config(small_corpus, src_lang="en", tgt_lang="fr")
    with pytest.raises(ConfigInvalid):
        run_pipeline(cfg)


def test_probe_failure_aborts_before_run(small_corpus):
    class DeadBackend:
        def probe(self):
            raise BackendUnavailable("nope")

        def call(self, request):  # pragma: no cover
            raise AssertionError("must not be called")

        def close(self):
            return None

    import timtbench.pipeline as pipeline_module

    cfg = _config(small_corpus)
    real_load = pipeline_module.load_backend
    try:
        pipeline_module.load_backend = lambda config, manifest=None: DeadBackend()
        with pytest.raises(BackendUnavailable):
            run_pipeline(cfg)
    finally:
        pipeline_module.load_backend = real_load


def test_score_run_failed_policies(small_corpus):
    manifest = load_manifest(small_corpus / "manifest.jsonl")
    records = []
    for index, sample in enumerate(manifest.samples):
        if index == 0:
            records.append(RunRecord(sample_id=sample.id, error={"stage": "ocr", "code": "X",
                                                                 "message": "boom"}))
        else:
            records.append(RunRecord(sample_id=sample.id, hypothesis=sample.tgt_text))

    harsh = score_run(records, manifest, "en", "de", ["bleu"], failed_policy="empty")
    lenient = score_run(records, manifest, "en", "de", ["bleu"], failed_policy="exclude")
    assert harsh["bleu"].corpus_score < lenient["bleu"].corpus_score == 100.0
    assert harsh["bleu"].details["failed_samples"] == 1
    assert len(lenient["bleu"].ids) == len(manifest.samples) - 1


def test_run_config_validation(small_corpus):
    with pytest.raises(ConfigInvalid):
        _config(small_corpus, template_id="bogus").validate()
    with pytest.raises(ConfigInvalid):
        _config(small_corpus, src_lang="de", tgt_lang="de").validate()
    with pytest.raises(ConfigInvalid):
        _config(small_corpus, concurrency=0).validate()
    with pytest.raises(ConfigInvalid):
        _config(small_corpus, template_id="mm_single",
                ocr={"type": "mock_ocr"}).validate()
    with pytest.raises(ConfigInvalid):
        RunConfig.from_dict({"manifest": "m", "unknown_field": 1})
