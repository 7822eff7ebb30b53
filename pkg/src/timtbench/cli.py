"""Command-line entry point.

Subcommands: gen (corpus generation), ocr-eval (OCR backend scoring), run
(translation pipeline), score (metric scoring of a run), compare (paired
significance tests), report (result tables).

Exit codes: 0 success, 1 validation or usage error, 2 runtime / backend
failure.  No subcommand prompts interactively; every subcommand accepts
``--seed`` and ``--out``.  Credentials are read only from environment
variables named in backend configs (conventionally ``TIMT_*``).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .backends import load_backend, make_request, OcrResult
from .corpus import RenderSpec, generate_corpus, load_manifest
from .errors import BackendError, ParseError, TimtError, ValidationError
from .metrics import ScoreReport, corpus_cer, corpus_wer
from .pipeline import RunConfig, assemble_ocr_text, read_run, run_pipeline, score_run, side_image, side_text
from .report import emit_ocr_table, emit_table, load_external_scores
from .significance import significance_groups


def _add_common(parser: argparse.ArgumentParser, out_help: str) -> None:
    parser.add_argument("--seed", type=int, default=0, help="deterministic seed")
    parser.add_argument("--out", required=True, help=out_help)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="timtbench",
        description="Benchmark harness for text-image machine translation.",
    )
    parser.add_argument("--version", action="version", version=f"timtbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="render a parallel text file pair into an image corpus")
    gen.add_argument("--src", required=True, help="source-language text file, one sentence per line")
    gen.add_argument("--tgt", required=True, help="target-language text file, aligned line by line")
    gen.add_argument("--src-lang", required=True, help="ISO-639-1 source language code")
    gen.add_argument("--tgt-lang", required=True, help="ISO-639-1 target language code")
    gen.add_argument("--split", default="test", choices=("train", "validation", "test"))
    gen.add_argument("--spec", help="JSON file overriding render settings")
    _add_common(gen, "output corpus directory")

    ocr_eval = sub.add_parser("ocr-eval", help="run an OCR backend over corpus images and score WER/CER")
    ocr_eval.add_argument("--manifest", required=True)
    ocr_eval.add_argument("--backend", required=True, help="backend config JSON file")
    ocr_eval.add_argument("--lang-side", default="src", choices=("src", "tgt"))
    ocr_eval.add_argument("--engine-name", default=None, help="engine label for the report")
    _add_common(ocr_eval, "output directory for score reports and tables")

    run = sub.add_parser("run", help="run the OCR+translation pipeline over a corpus")
    run.add_argument("--config", required=True, help="run config JSON file")
    run.add_argument("--concurrency", type=int, default=None, help="override config concurrency")
    _add_common(run, "output run-records file (.jsonl)")

    score = sub.add_parser("score", help="score run hypotheses against references")
    score.add_argument("--run", required=True, help="run-records file")
    score.add_argument("--manifest", required=True)
    score.add_argument("--src-lang", required=True)
    score.add_argument("--tgt-lang", required=True)
    score.add_argument("--metrics", default="bleu,chrf,ter", help="comma-separated metric ids")
    score.add_argument("--failed", default="empty", choices=("empty", "exclude"),
                       help="how records with errors score")
    _add_common(score, "output directory for score-report JSON files")

    compare = sub.add_parser("compare", help="paired significance tests between score reports")
    compare.add_argument("--reports", nargs="+", required=True,
                         help="score-report JSON files, optionally NAME=path")
    compare.add_argument("--reps", type=int, default=10000, help="randomization repetitions")
    compare.add_argument("--alpha", type=float, default=0.05, help="significance threshold")
    _add_common(compare, "output significance JSON file")

    report = sub.add_parser("report", help="emit a result table from score reports")
    report.add_argument("--system", action="append", required=True, metavar="NAME=path[,path...]",
                        help="system name and its score-report files (repeatable)")
    report.add_argument("--sig", help="significance JSON from the compare subcommand")
    report.add_argument("--external", help="external-scores sidecar JSON")
    report.add_argument("--format", default="markdown", choices=("markdown", "csv"))
    report.add_argument("--caption", default="Translation results")
    _add_common(report, "output table file")

    return parser


def _cmd_gen(args) -> int:
    spec_fields = {}
    if args.spec:
        spec_fields = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    spec_fields["seed"] = args.seed
    spec = RenderSpec.from_dict({**RenderSpec().to_dict(), **spec_fields})
    manifest = generate_corpus(
        args.src, args.tgt, spec, args.src_lang, args.tgt_lang, args.split, args.out
    )
    for split, count in sorted(manifest.counts.items()):
        print(f"{split}: {count} samples")
    skip_log = (Path(args.out) / "skipped.jsonl").read_text(encoding="utf-8")
    skipped = len(skip_log.splitlines())
    if skipped:
        print(f"skipped: {skipped} lines (see skipped.jsonl)")
    print(f"manifest: {Path(args.out) / 'manifest.jsonl'}")
    return 0


def _cmd_ocr_eval(args) -> int:
    manifest = load_manifest(args.manifest)
    side = args.lang_side
    samples = manifest.samples
    for sample in samples:
        image = manifest.resolve(side_image(sample, side))
        if not image.exists():
            print(f"missing image file for sample {sample.id}: {image}", file=sys.stderr)
            return 2

    backend = load_backend(args.backend, manifest)
    backend.probe()
    engine = args.engine_name or Path(args.backend).stem
    hyps, refs, ids = [], [], []
    failed = 0
    try:
        for sample in samples:
            request = make_request(
                "ocr",
                {"image_path": str(manifest.resolve(side_image(sample, side))),
                 "lang": sample.src_lang if side == "src" else sample.tgt_lang},
                sample.id,
            )
            response = backend.call(request)
            if response["ok"]:
                result = OcrResult.from_dict(response["result"])
                hyps.append(assemble_ocr_text(result))
            else:
                hyps.append("")
                failed += 1
            refs.append(side_text(sample, side))
            ids.append(sample.id)
    finally:
        backend.close()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lang = samples[0].src_lang if side == "src" else samples[0].tgt_lang
    reports = {"wer": corpus_wer(hyps, refs, ids), "cer": corpus_cer(hyps, refs, ids)}
    for metric_id, report in reports.items():
        report.details["engine"] = engine
        report.details["lang"] = lang
        report.details["failed_requests"] = failed
        (out / f"{engine}.{lang}.{metric_id}.json").write_text(
            report.dump_json() + "\n", encoding="utf-8"
        )
    table_rows = {lang: {engine: reports}}
    (out / "ocr_table.md").write_text(emit_ocr_table(table_rows, "markdown"), encoding="utf-8")
    (out / "ocr_table.csv").write_text(emit_ocr_table(table_rows, "csv"), encoding="utf-8")
    print(f"{engine} {lang}: WER {reports['wer'].corpus_score:.2f} "
          f"CER {reports['cer'].corpus_score:.2f} ({len(ids)} samples, {failed} failed)")
    return 0


def _cmd_run(args) -> int:
    cfg = RunConfig.from_file(args.config)
    cfg.seed = args.seed
    if args.concurrency is not None:
        cfg.concurrency = args.concurrency
    records, summary = run_pipeline(cfg, out_path=args.out)
    print(f"{summary['ok']} ok, {summary['failed']} failed of {summary['total']} samples")
    print(f"records: {args.out}")
    return 0


def _cmd_score(args) -> int:
    run_path = Path(args.run)
    if not run_path.exists():
        raise ValidationError(f"run file not found: {run_path}")
    records = read_run(run_path)
    if not records:
        raise ValidationError(f"run file is empty: {run_path}")
    manifest = load_manifest(args.manifest)
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    reports = score_run(records, manifest, args.src_lang, args.tgt_lang, metrics, args.failed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = run_path.stem
    for metric_id, report in reports.items():
        path = out / f"{stem}.{metric_id}.json"
        path.write_text(report.dump_json() + "\n", encoding="utf-8")
        print(f"{metric_id}: {report.corpus_score:.2f} -> {path}")
    return 0


def _cmd_compare(args) -> int:
    named: list[tuple[str, ScoreReport]] = []
    for item in args.reports:
        if "=" in item:
            name, path = item.split("=", 1)
        else:
            path = item
            name = Path(path).stem
        named.append((name, ScoreReport.load_json(Path(path).read_text(encoding="utf-8"))))
    if len(named) < 2:
        raise ValidationError("compare needs at least two score reports")
    groups = significance_groups(named, repetitions=args.reps, alpha=args.alpha, seed=args.seed)
    Path(args.out).write_text(groups.dump_json() + "\n", encoding="utf-8")

    names = groups.systems
    width = max(len(n) for n in names)
    print(" " * (width + 2) + "  ".join(f"{n:>{width}}" for n in names))
    for i, name in enumerate(names):
        cells = []
        for j in range(len(names)):
            p = groups.p_matrix[i][j]
            cells.append(" " * width if p is None else f"{p:>{width}.4f}")
        print(f"{name:>{width}}  " + "  ".join(cells))
    for name in names:
        label = groups.labels[name]
        if label:
            print(f"{name}: {label}")
    print(f"significance: {args.out}")
    return 0


def _cmd_report(args) -> int:
    systems: list[tuple[str, dict[str, ScoreReport]]] = []
    for item in args.system:
        if "=" not in item:
            raise ValidationError(f"--system expects NAME=path[,path...]: {item!r}")
        name, paths = item.split("=", 1)
        reports: dict[str, ScoreReport] = {}
        for path in paths.split(","):
            report = ScoreReport.load_json(Path(path).read_text(encoding="utf-8"))
            reports[report.metric_id] = report
        systems.append((name, reports))

    sig = None
    if args.sig:
        from .significance import SignificanceGroups

        raw = json.loads(Path(args.sig).read_text(encoding="utf-8"))
        sig = SignificanceGroups(
            systems=raw["systems"],
            metric_id=raw["metric_id"],
            alpha=raw["alpha"],
            repetitions=raw["repetitions"],
            seed=raw["seed"],
            p_matrix=raw["p_matrix"],
            labels=raw["labels"],
        )
    external = load_external_scores(args.external) if args.external else ()
    text = emit_table(systems, sig, args.format, caption=args.caption, external=external)
    Path(args.out).write_text(text, encoding="utf-8")
    print(f"report: {args.out}")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "ocr-eval": _cmd_ocr_eval,
    "run": _cmd_run,
    "score": _cmd_score,
    "compare": _cmd_compare,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 2
    except TimtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
