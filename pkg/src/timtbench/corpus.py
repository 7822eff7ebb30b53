"""Synthetic bilingual image-corpus generation.

Each bitext line pair is rendered onto two fixed-size canvases (one per
language) with randomized text position, rotation, and background color;
black sans-serif text keeps the images readable under the visual noise.
Images are stored as lossless PNG so regeneration is bit-exact, and a
newline-delimited JSON manifest indexes texts, image paths, and the exact
sampled render attributes of every image.

Per-sample RNG streams are derived by hashing (global seed, line index,
side), so generation is order-independent, parallelizable, and resumable.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import random
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Any

from PIL import Image, ImageDraw, ImageFont

from .errors import (
    FontUnavailable,
    InvariantViolation,
    LineCountMismatch,
    ParseError,
    TextOverflow,
    ValidationError,
)

SPLITS = ("train", "validation", "test")

#: Light backgrounds that keep black text readable.
DEFAULT_PALETTE: tuple[tuple[int, int, int], ...] = (
    (255, 255, 255),
    (245, 245, 220),
    (230, 240, 255),
    (235, 255, 235),
    (255, 240, 230),
    (245, 230, 245),
    (255, 255, 215),
    (228, 245, 245),
)

_FONT_DIRS = (
    "/usr/share/fonts",
    "/usr/local/share/fonts",
    os.path.expanduser("~/.fonts"),
    "/Library/Fonts",
    "/System/Library/Fonts",
    "C:/Windows/Fonts",
)

#: Metrically similar sans-serif stand-ins tried when the requested family
#: is not installed, in order.
_FALLBACK_FAMILIES = ("LiberationSans-Regular", "DejaVuSans", "Arimo-Regular", "helvetica")


@dataclass(frozen=True)
class RenderSpec:
    """All knobs of the image renderer; equal specs + equal seeds render
    bit-identical images."""

    canvas_size: tuple[int, int] = (512, 512)
    font_family: str = "Arial"
    font_size_px: int = 24
    text_color: tuple[int, int, int] = (0, 0, 0)
    background_palette: tuple[tuple[int, int, int], ...] = DEFAULT_PALETTE
    rotation_range_deg: tuple[float, float] = (-10.0, 10.0)
    position_jitter_px: tuple[tuple[int, int], tuple[int, int]] = ((-256, 256), (-256, 256))
    line_wrap_width_px: int = 472
    line_spacing_px: int = 4
    seed: int = 0

    def __post_init__(self):
        width, height = self.canvas_size
        if width <= 0 or height <= 0:
            raise ValidationError("canvas dimensions must be positive")
        low, high = self.rotation_range_deg
        if not math.isclose(low, -high):
            raise ValidationError("rotation range must be symmetric about 0")
        if self.line_wrap_width_px > width:
            raise ValidationError("wrap width cannot exceed canvas width")
        if self.font_size_px <= 0:
            raise ValidationError("font size must be positive")
        if not self.background_palette:
            raise ValidationError("background palette must not be empty")

    def to_dict(self) -> dict[str, Any]:
        return {
            "canvas_size": list(self.canvas_size),
            "font_family": self.font_family,
            "font_size_px": self.font_size_px,
            "text_color": list(self.text_color),
            "background_palette": [list(c) for c in self.background_palette],
            "rotation_range_deg": list(self.rotation_range_deg),
            "position_jitter_px": [list(j) for j in self.position_jitter_px],
            "line_wrap_width_px": self.line_wrap_width_px,
            "line_spacing_px": self.line_spacing_px,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "RenderSpec":
        return cls(
            canvas_size=tuple(obj["canvas_size"]),
            font_family=obj["font_family"],
            font_size_px=obj["font_size_px"],
            text_color=tuple(obj["text_color"]),
            background_palette=tuple(tuple(c) for c in obj["background_palette"]),
            rotation_range_deg=tuple(obj["rotation_range_deg"]),
            position_jitter_px=tuple(tuple(j) for j in obj["position_jitter_px"]),
            line_wrap_width_px=obj["line_wrap_width_px"],
            line_spacing_px=obj["line_spacing_px"],
            seed=obj["seed"],
        )


@dataclass
class SamplePair:
    """One aligned bilingual corpus item with its two rendered images."""

    id: str
    src_lang: str
    tgt_lang: str
    split: str
    src_text: str
    tgt_text: str
    src_image_path: str
    tgt_image_path: str
    render_meta: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        if not self.src_text or not self.tgt_text:
            raise InvariantViolation("text", f"sample {self.id}: texts must be non-empty")
        if self.src_lang == self.tgt_lang:
            raise InvariantViolation("lang", f"sample {self.id}: language codes must differ")
        if self.split not in SPLITS:
            raise InvariantViolation("split", f"sample {self.id}: unknown split {self.split!r}")

    def to_dict(self) -> dict[str, Any]:
        return {"type": "sample", **asdict(self)}

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "SamplePair":
        fields = {k: obj[k] for k in (
            "id", "src_lang", "tgt_lang", "split", "src_text", "tgt_text",
            "src_image_path", "tgt_image_path", "render_meta",
        )}
        return cls(**fields)


@dataclass
class Manifest:
    """Corpus index: render spec, ordered samples, per-split counts."""

    spec: RenderSpec
    samples: list[SamplePair]
    counts: dict[str, int]
    font_substitution: str | None = None
    base_dir: Path | None = None  # where the manifest was loaded from; not serialized

    def validate(self) -> None:
        seen: set[str] = set()
        for sample in self.samples:
            if sample.id in seen:
                raise InvariantViolation("id", f"duplicate sample id {sample.id!r}")
            seen.add(sample.id)
        recount: dict[str, int] = {}
        for sample in self.samples:
            sample.validate()
            recount[sample.split] = recount.get(sample.split, 0) + 1
        if recount != self.counts:
            raise InvariantViolation("counts", f"header says {self.counts}, samples say {recount}")

    def resolve(self, relative: str) -> Path:
        base = self.base_dir if self.base_dir is not None else Path(".")
        return base / relative

    def write(self, path: Path | str) -> None:
        path = Path(path)
        header = {
            "type": "header",
            "spec": self.spec.to_dict(),
            "counts": self.counts,
            "font_substitution": self.font_substitution,
        }
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(header, ensure_ascii=False, sort_keys=True) + "\n")
            for sample in self.samples:
                fh.write(json.dumps(sample.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")


def load_manifest(path: Path | str) -> Manifest:
    """Parse and validate a manifest; errors name the offending line/field."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"manifest not found: {path}")
    spec: RenderSpec | None = None
    counts: dict[str, int] = {}
    font_substitution = None
    samples: list[SamplePair] = []
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"line {line_number}: invalid JSON ({exc.msg})", line_number) from exc
            kind = obj.get("type")
            if line_number == 1:
                if kind != "header":
                    raise ParseError("line 1: expected manifest header", 1)
                try:
                    spec = RenderSpec.from_dict(obj["spec"])
                    counts = dict(obj["counts"])
                    font_substitution = obj.get("font_substitution")
                except (KeyError, TypeError, ValidationError) as exc:
                    raise ParseError(f"line 1: bad header ({exc})", 1) from exc
            elif kind == "sample":
                try:
                    samples.append(SamplePair.from_dict(obj))
                except KeyError as exc:
                    raise ParseError(f"line {line_number}: missing field {exc}", line_number) from exc
            else:
                raise ParseError(f"line {line_number}: unknown record type {kind!r}", line_number)
    if spec is None:
        raise ParseError("empty manifest", 1)
    manifest = Manifest(spec, samples, counts, font_substitution, base_dir=path.parent)
    manifest.validate()
    return manifest


# --- font resolution ---

_font_cache: dict[tuple[str, int], tuple[ImageFont.FreeTypeFont, str, bool]] = {}


def _font_files() -> dict[str, str]:
    files: dict[str, str] = {}
    for root in _FONT_DIRS:
        if not os.path.isdir(root):
            continue
        for dirpath, _dirnames, filenames in os.walk(root):
            for name in filenames:
                stem, ext = os.path.splitext(name)
                if ext.lower() in (".ttf", ".otf", ".ttc"):
                    files.setdefault(stem.lower(), os.path.join(dirpath, name))
    return files


def resolve_font(family: str, size_px: int) -> tuple[ImageFont.FreeTypeFont, str, bool]:
    """Resolve a font family to a loaded font.

    Returns (font, resolved name, substituted flag).  Falls back to a
    metrically similar sans-serif, then to Pillow's bundled default; raises
    :class:`FontUnavailable` only when no scalable font can be loaded.
    """
    key = (family.lower(), size_px)
    if key in _font_cache:
        return _font_cache[key]

    available = _font_files()
    wanted = [family, family.replace(" ", ""), family.lower()]
    wanted += list(_FALLBACK_FAMILIES)
    for candidate in wanted:
        path = available.get(candidate.lower())
        if path:
            font = ImageFont.truetype(path, size_px)
            resolved = os.path.splitext(os.path.basename(path))[0]
            result = (font, resolved, resolved.lower() != family.lower())
            _font_cache[key] = result
            return result
    try:
        font = ImageFont.load_default(size=size_px)
    except Exception as exc:  # pragma: no cover - requires a FreeType-less Pillow
        raise FontUnavailable(f"no usable font for family {family!r}") from exc
    result = (font, "pillow-builtin", True)
    _font_cache[key] = result
    return result


# --- rendering ---

_LAYER_PAD = 2


def wrap_text(text: str, font: ImageFont.FreeTypeFont, wrap_width_px: int) -> list[str]:
    """Greedy word wrap by rendered pixel width."""
    words = text.split()
    lines: list[str] = []
    current = ""
    for word in words:
        if font.getlength(word) > wrap_width_px:
            raise TextOverflow(f"word {word!r} is wider than the wrap width")
        candidate = f"{current} {word}" if current else word
        if font.getlength(candidate) <= wrap_width_px:
            current = candidate
        else:
            lines.append(current)
            current = word
    if current:
        lines.append(current)
    return lines


def _layer_for_lines(lines: list[str], font: ImageFont.FreeTypeFont,
                     color: tuple[int, int, int], spacing: int) -> tuple[Image.Image, list[tuple[int, int, int, int]]]:
    """Draw wrapped lines onto a tight RGBA layer; returns per-line boxes."""
    ascent, descent = font.getmetrics()
    line_height = ascent + descent
    widths = [int(math.ceil(font.getlength(line))) for line in lines]
    layer_w = max(widths) + 2 * _LAYER_PAD
    layer_h = len(lines) * line_height + (len(lines) - 1) * spacing + 2 * _LAYER_PAD
    layer = Image.new("RGBA", (layer_w, layer_h), (0, 0, 0, 0))
    draw = ImageDraw.Draw(layer)
    boxes = []
    for index, line in enumerate(lines):
        top = _LAYER_PAD + index * (line_height + spacing)
        draw.text((_LAYER_PAD, top), line, font=font, fill=(*color, 255))
        boxes.append((_LAYER_PAD, top, widths[index], line_height))
    return layer, boxes


def _rotate_boxes(boxes: list[tuple[int, int, int, int]], layer_size: tuple[int, int],
                  rotated_size: tuple[int, int], angle_deg: float,
                  offset: tuple[int, int], canvas: tuple[int, int]) -> list[list[int]]:
    """Map layer-local line boxes into canvas coordinates after rotation."""
    width, height = layer_size
    cx, cy = width / 2.0, height / 2.0
    ncx, ncy = rotated_size[0] / 2.0, rotated_size[1] / 2.0
    theta = math.radians(angle_deg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    out = []
    for x, y, bw, bh in boxes:
        xs, ys = [], []
        for px, py in ((x, y), (x + bw, y), (x, y + bh), (x + bw, y + bh)):
            dx, dy = px - cx, py - cy
            # y grows downward, so a positive (counter-clockwise) angle maps this way:
            rx = cos_t * dx + sin_t * dy + ncx
            ry = -sin_t * dx + cos_t * dy + ncy
            xs.append(rx)
            ys.append(ry)
        x0 = max(0, math.floor(min(xs)) + offset[0])
        y0 = max(0, math.floor(min(ys)) + offset[1])
        x1 = min(canvas[0], math.ceil(max(xs)) + offset[0])
        y1 = min(canvas[1], math.ceil(max(ys)) + offset[1])
        out.append([x0, y0, max(0, x1 - x0), max(0, y1 - y0)])
    return out


def _place(rng: random.Random, slack: int, jitter_interval: tuple[int, int]) -> int:
    """Placement offset along one axis: uniform over the configured jitter
    interval (relative to the centered position) intersected with the slack."""
    lo, hi = jitter_interval
    center = slack // 2
    low = max(0, center + lo)
    high = min(slack, center + hi)
    if low > high:  # interval lies outside the canvas; pin to the nearest edge
        return 0 if center + hi < 0 else slack
    return rng.randint(low, high)


def _compose(text: str, spec: RenderSpec, angle: float, background: tuple[int, int, int],
             rng: random.Random | None, position: tuple[int, int] | None,
             ) -> tuple[Image.Image, dict[str, Any]]:
    """Shared path for RNG-driven rendering and meta-replay rendering."""
    font, font_name, substituted = resolve_font(spec.font_family, spec.font_size_px)
    lines = wrap_text(text, font, spec.line_wrap_width_px)
    layer, boxes = _layer_for_lines(lines, font, spec.text_color, spec.line_spacing_px)
    rotated = layer.rotate(angle, resample=Image.BICUBIC, expand=True)
    canvas_w, canvas_h = spec.canvas_size
    rot_w, rot_h = rotated.size
    if rot_w > canvas_w or rot_h > canvas_h:
        raise TextOverflow(
            f"text block {rot_w}x{rot_h} exceeds canvas {canvas_w}x{canvas_h} after rotation"
        )

    slack_x, slack_y = canvas_w - rot_w, canvas_h - rot_h
    if position is not None:
        px, py = position
        if not (0 <= px <= slack_x and 0 <= py <= slack_y):
            raise ValidationError(f"stored position {position} does not fit the canvas")
    else:
        assert rng is not None
        px = _place(rng, slack_x, spec.position_jitter_px[0])
        py = _place(rng, slack_y, spec.position_jitter_px[1])

    canvas = Image.new("RGB", (canvas_w, canvas_h), background)
    canvas.paste(rotated, (px, py), rotated)

    meta = {
        "position": [px, py],
        "rotation_deg": angle,
        "background": list(background),
        "font": font_name,
        "font_substituted": substituted,
        "layer_size": [layer.width, layer.height],
        "lines": [
            {"text": line, "bbox": bbox}
            for line, bbox in zip(
                lines,
                _rotate_boxes(boxes, layer.size, rotated.size, angle, (px, py), spec.canvas_size),
            )
        ],
    }
    return canvas, meta


def render_sample(text: str, spec: RenderSpec, rng: random.Random) -> tuple[Image.Image, dict[str, Any]]:
    """Render one text onto a canvas with sampled position / rotation /
    background; the returned meta records the exact sampled values."""
    text = text.strip()
    if not text:
        raise ValidationError("cannot render empty text")
    angle = rng.uniform(*spec.rotation_range_deg)
    background = spec.background_palette[rng.randrange(len(spec.background_palette))]
    return _compose(text, spec, angle, background, rng, position=None)


def render_from_meta(text: str, spec: RenderSpec, meta: dict[str, Any]) -> Image.Image:
    """Re-render an image from stored render meta, bypassing the RNG.

    Byte-identical to the original render for the same text and spec.
    """
    image, _ = _compose(
        text.strip(),
        spec,
        angle=meta["rotation_deg"],
        background=tuple(meta["background"]),
        rng=None,
        position=tuple(meta["position"]),
    )
    return image


def _child_rng(seed: int, line_index: int, side: str) -> random.Random:
    digest = hashlib.blake2b(f"{seed}\x1f{line_index}\x1f{side}".encode("utf-8"), digest_size=8)
    return random.Random(int.from_bytes(digest.digest(), "big"))


def _read_lines(path: Path | str) -> list[str]:
    return Path(path).read_text(encoding="utf-8-sig").splitlines()


def generate_corpus(src_path: Path | str, tgt_path: Path | str, spec: RenderSpec,
                    src_lang: str, tgt_lang: str, split: str,
                    out_dir: Path | str) -> Manifest:
    """Render a parallel text file pair into an image corpus.

    One sample per aligned line pair; unrenderable lines (empty, or text
    that cannot fit the canvas) are recorded in ``skipped.jsonl`` and
    excluded from the manifest, never silently truncated.
    """
    if split not in SPLITS:
        raise ValidationError(f"unknown split {split!r}; expected one of {SPLITS}")
    if src_lang == tgt_lang:
        raise ValidationError("source and target language codes must differ")
    src_lines = _read_lines(src_path)
    tgt_lines = _read_lines(tgt_path)
    if len(src_lines) != len(tgt_lines):
        raise LineCountMismatch(
            f"{len(src_lines)} source lines vs {len(tgt_lines)} target lines"
        )

    out_dir = Path(out_dir)
    images_dir = out_dir / "images"
    images_dir.mkdir(parents=True, exist_ok=True)

    samples: list[SamplePair] = []
    skipped: list[dict[str, Any]] = []
    font_note: str | None = None

    for index, (src_text, tgt_text) in enumerate(zip(src_lines, tgt_lines)):
        sample_id = f"{index:06d}"
        record: dict[str, Any] = {"line": index, "id": sample_id}
        try:
            if not src_text.strip() or not tgt_text.strip():
                raise ValidationError("empty line")
            src_img, src_meta = render_sample(src_text, spec, _child_rng(spec.seed, index, "src"))
            tgt_img, tgt_meta = render_sample(tgt_text, spec, _child_rng(spec.seed, index, "tgt"))
        except (TextOverflow, ValidationError) as exc:
            record["reason"] = str(exc)
            skipped.append(record)
            continue
        src_rel = f"images/{sample_id}.src.png"
        tgt_rel = f"images/{sample_id}.tgt.png"
        src_img.save(out_dir / src_rel, format="PNG")
        tgt_img.save(out_dir / tgt_rel, format="PNG")
        if src_meta["font_substituted"] and font_note is None:
            font_note = f"{spec.font_family} unavailable; using {src_meta['font']}"
        samples.append(SamplePair(
            id=sample_id,
            src_lang=src_lang,
            tgt_lang=tgt_lang,
            split=split,
            src_text=src_text.strip(),
            tgt_text=tgt_text.strip(),
            src_image_path=src_rel,
            tgt_image_path=tgt_rel,
            render_meta={"src": src_meta, "tgt": tgt_meta},
        ))

    manifest = Manifest(
        spec=spec,
        samples=samples,
        counts={split: len(samples)} if samples else {},
        font_substitution=font_note,
        base_dir=out_dir,
    )
    manifest.validate()
    manifest.write(out_dir / "manifest.jsonl")
    with open(out_dir / "skipped.jsonl", "w", encoding="utf-8") as fh:
        for record in skipped:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    return manifest
