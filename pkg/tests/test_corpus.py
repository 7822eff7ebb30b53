from __future__ import annotations

import io
import json
import random
from pathlib import Path

import pytest
from PIL import Image

from conftest import make_bitext, write_bitext
from timtbench.corpus import (
    Manifest,
    RenderSpec,
    generate_corpus,
    load_manifest,
    render_from_meta,
    render_sample,
    resolve_font,
    wrap_text,
)
from timtbench.errors import (
    InvariantViolation,
    LineCountMismatch,
    ParseError,
    TextOverflow,
    ValidationError,
)


def _png_bytes(image: Image.Image) -> bytes:
    buffer = io.BytesIO()
    image.save(buffer, format="PNG")
    return buffer.getvalue()


def test_render_canvas_size_is_exact():
    image, _meta = render_sample("hello", RenderSpec(), random.Random(7))
    assert image.size == (512, 512)


def test_render_deterministic_under_seed():
    spec = RenderSpec()
    first = render_sample("hello world", spec, random.Random(7))
    second = render_sample("hello world", spec, random.Random(7))
    assert _png_bytes(first[0]) == _png_bytes(second[0])
    assert first[1] == second[1]


def test_different_seeds_differ_in_meta():
    spec = RenderSpec()
    meta_a = render_sample("hello", spec, random.Random(7))[1]
    meta_b = render_sample("hello", spec, random.Random(8))[1]
    assert (
        meta_a["rotation_deg"] != meta_b["rotation_deg"]
        or meta_a["position"] != meta_b["position"]
        or meta_a["background"] != meta_b["background"]
    )


def test_meta_replay_is_byte_identical():
    spec = RenderSpec()
    image, meta = render_sample("a somewhat longer sentence that wraps lines", spec, random.Random(3))
    replay = render_from_meta("a somewhat longer sentence that wraps lines", spec, meta)
    assert _png_bytes(image) == _png_bytes(replay)


def test_line_boxes_inside_canvas():
    spec = RenderSpec()
    _image, meta = render_sample(
        "one two three four five six seven eight nine ten eleven twelve", spec, random.Random(1)
    )
    assert len(meta["lines"]) >= 1
    for line in meta["lines"]:
        x, y, w, h = line["bbox"]
        assert x >= 0 and y >= 0
        assert x + w <= 512 and y + h <= 512


def test_empty_text_rejected():
    with pytest.raises(ValidationError):
        render_sample("   ", RenderSpec(), random.Random(0))


def test_overflow_raises_instead_of_truncating():
    with pytest.raises(TextOverflow):
        render_sample("a" * 400, RenderSpec(), random.Random(0))  # one un-wrappable word
    with pytest.raises(TextOverflow):
        render_sample("word " * 900, RenderSpec(), random.Random(0))  # too many lines


def test_wrap_respects_width():
    font, _, _ = resolve_font("Arial", 24)
    lines = wrap_text("the quick brown fox jumps over the lazy dog again", font, 200)
    assert len(lines) > 1
    assert all(font.getlength(line) <= 200 for line in lines)


def test_rotation_range_must_be_symmetric():
    with pytest.raises(ValidationError):
        RenderSpec(rotation_range_deg=(-5.0, 10.0))


def test_generate_corpus_counts_and_files(tmp_path):
    src, tgt, _ = make_bitext(3, seed=5)
    src_path, tgt_path = write_bitext(tmp_path, src, tgt)
    manifest = generate_corpus(src_path, tgt_path, RenderSpec(seed=1), "en", "de", "test", tmp_path / "out")
    assert [s.id for s in manifest.samples] == ["000000", "000001", "000002"]
    assert manifest.counts == {"test": 3}
    for sample in manifest.samples:
        assert (tmp_path / "out" / sample.src_image_path).exists()
        assert (tmp_path / "out" / sample.tgt_image_path).exists()
    assert (tmp_path / "out" / "skipped.jsonl").read_text() == ""


def test_generate_corpus_regeneration_identical(tmp_path):
    src, tgt, _ = make_bitext(4, seed=6)
    spec = RenderSpec(seed=2)
    trees = []
    for name in ("a", "b"):
        src_path, tgt_path = write_bitext(tmp_path, src, tgt)
        generate_corpus(src_path, tgt_path, spec, "en", "fr", "test", tmp_path / name)
        tree = {
            p.relative_to(tmp_path / name).as_posix(): p.read_bytes()
            for p in sorted((tmp_path / name).rglob("*")) if p.is_file()
        }
        trees.append(tree)
    assert trees[0] == trees[1]


def test_generate_corpus_line_count_mismatch(tmp_path):
    (tmp_path / "src.txt").write_text("a\nb\nc\n", encoding="utf-8")
    (tmp_path / "tgt.txt").write_text("a\nb\nc\nd\n", encoding="utf-8")
    with pytest.raises(LineCountMismatch):
        generate_corpus(tmp_path / "src.txt", tmp_path / "tgt.txt", RenderSpec(), "en", "de",
                        "test", tmp_path / "out")
    assert not (tmp_path / "out").exists()  # fails before writing anything


def test_generate_corpus_skips_unrenderable_lines(tmp_path):
    (tmp_path / "src.txt").write_text("good line here\n" + "x" * 500 + "\nanother good line\n",
                                      encoding="utf-8")
    (tmp_path / "tgt.txt").write_text("gute zeile hier\nzwei\nnoch eine gute zeile\n",
                                      encoding="utf-8")
    manifest = generate_corpus(tmp_path / "src.txt", tmp_path / "tgt.txt", RenderSpec(),
                               "en", "de", "test", tmp_path / "out")
    assert len(manifest.samples) == 2
    skipped = [json.loads(line) for line in (tmp_path / "out" / "skipped.jsonl").read_text().splitlines()]
    assert len(skipped) == 1
    assert skipped[0]["line"] == 1


def test_manifest_round_trip(tmp_path):
    src, tgt, _ = make_bitext(2, seed=9)
    src_path, tgt_path = write_bitext(tmp_path, src, tgt)
    manifest = generate_corpus(src_path, tgt_path, RenderSpec(seed=4), "en", "ro", "validation",
                               tmp_path / "out")
    loaded = load_manifest(tmp_path / "out" / "manifest.jsonl")
    assert loaded.spec == manifest.spec
    assert loaded.counts == manifest.counts
    assert loaded.samples == manifest.samples


def test_load_manifest_duplicate_id(tmp_path):
    src, tgt, _ = make_bitext(1, seed=10)
    src_path, tgt_path = write_bitext(tmp_path, src, tgt)
    generate_corpus(src_path, tgt_path, RenderSpec(), "en", "de", "test", tmp_path / "out")
    path = tmp_path / "out" / "manifest.jsonl"
    lines = path.read_text(encoding="utf-8").splitlines()
    lines.append(lines[1])  # duplicate the sample line
    header = json.loads(lines[0])
    header["counts"] = {"test": 2}
    lines[0] = json.dumps(header, sort_keys=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(InvariantViolation) as err:
        load_manifest(path)
    assert err.value.field == "id"


def test_load_manifest_truncated_line(tmp_path):
    src, tgt, _ = make_bitext(2, seed=11)
    src_path, tgt_path = write_bitext(tmp_path, src, tgt)
    generate_corpus(src_path, tgt_path, RenderSpec(), "en", "de", "test", tmp_path / "out")
    path = tmp_path / "out" / "manifest.jsonl"
    text = path.read_text(encoding="utf-8")
    path.write_text(text[:-40], encoding="utf-8")  # chop the last record
    with pytest.raises(ParseError) as err:
        load_manifest(path)
    assert err.value.line_number == 3


def test_load_manifest_count_mismatch(tmp_path):
    src, tgt, _ = make_bitext(2, seed=12)
    src_path, tgt_path = write_bitext(tmp_path, src, tgt)
    generate_corpus(src_path, tgt_path, RenderSpec(), "en", "de", "test", tmp_path / "out")
    path = tmp_path / "out" / "manifest.jsonl"
    lines = path.read_text(encoding="utf-8").splitlines()
    header = json.loads(lines[0])
    header["counts"] = {"test": 5}
    lines[0] = json.dumps(header, sort_keys=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(InvariantViolation) as err:
        load_manifest(path)
    assert err.value.field == "counts"


def test_spec_serialization_round_trip():
    spec = RenderSpec(seed=99, font_size_px=30, rotation_range_deg=(-3.0, 3.0))
    assert RenderSpec.from_dict(spec.to_dict()) == spec
