"""Prompt templates for translation backends and output cleaning.

Four template families cover the usual model interfaces:

* ``tag_pair``      - bare language tags, for translation-tuned LLMs.
* ``instruct_text`` - explicit instruction to answer with the translation only.
* ``instruct_json`` - instruction to answer as ``{"translation": "<text>"}``.
* ``mm_single``     - single-step multimodal instruction (image in, text out);
  the model extracts and translates in one call, so there is no text slot.

Language names are rendered in English ("German", not "Deutsch").  Cleaning
is total: every raw reply yields a hypothesis string, with fallbacks for
chatty or malformed model output.
"""

from __future__ import annotations

import json
import re
import warnings

from .errors import UnknownLanguage

TEMPLATE_IDS = ("tag_pair", "instruct_text", "instruct_json", "mm_single")

LANGUAGE_NAMES = {
    "de": "German",
    "en": "English",
    "es": "Spanish",
    "fr": "French",
    "it": "Italian",
    "nl": "Dutch",
    "pt": "Portuguese",
    "ro": "Romanian",
}


def language_name(code: str) -> str:
    try:
        return LANGUAGE_NAMES[code]
    except KeyError:
        raise UnknownLanguage(f"no language name registered for {code!r}") from None


def build_prompt(template_id: str, src_lang: str, tgt_lang: str, text: str = "") -> str:
    """Instantiate a template; byte-stable for identical inputs."""
    src_name = language_name(src_lang)
    tgt_name = language_name(tgt_lang)
    if src_lang == tgt_lang:
        warnings.warn(f"source and target language are both {src_lang!r}")

    if template_id == "tag_pair":
        return f"{src_name}: {text}\n{tgt_name}:"
    if template_id == "instruct_text":
        return (
            f"Translate the following into {tgt_name}. "
            f"Respond only with the translation, no comments:\n"
            f"{src_name}: {text}\n{tgt_name}:"
        )
    if template_id == "instruct_json":
        return (
            f"Translate into {tgt_name}. "
            f'Respond only in this JSON format: {{"translation": "<text>"}}\n'
            f'{src_name}: "{text}"\n{tgt_name} (JSON):'
        )
    if template_id == "mm_single":
        return (
            f"Extract the {src_name} text from this image and translate it to {tgt_name}. "
            f"Provide only the final {tgt_name} translation."
        )
    raise ValueError(f"unknown template_id {template_id!r}")


_QUOTE_PAIRS = (('"', '"'), ("'", "'"), ("“", "”"), ("‘", "’"),
                ("«", "»"))
_JSON_VALUE = re.compile(r'"translation"\s*:\s*"((?:[^"\\]|\\.)*)"')


def _strip_quote_pair(text: str) -> str:
    if len(text) >= 2:
        for open_q, close_q in _QUOTE_PAIRS:
            if text.startswith(open_q) and text.endswith(close_q):
                inner = text[len(open_q):-len(close_q)]
                # Only strip when the quotes wrap the whole reply, not when
                # they belong to quoted material inside it.
                if close_q not in inner:
                    return inner
    return text


def _strip_language_label(text: str, tgt_lang_name: str | None) -> str:
    names = [tgt_lang_name] if tgt_lang_name else list(LANGUAGE_NAMES.values())
    for name in names:
        for suffix in (" (JSON):", ":"):
            label = f"{name}{suffix}"
            if text[: len(label)].lower() == label.lower():
                return text[len(label):]
    return text


def _first_json_object(raw: str) -> dict | None:
    decoder = json.JSONDecoder()
    for start in range(len(raw)):
        if raw[start] != "{":
            continue
        try:
            obj, _ = decoder.raw_decode(raw, start)
        except json.JSONDecodeError:
            continue
        if isinstance(obj, dict):
            return obj
    return None


def clean_output_verbose(raw: str, template_id: str = "instruct_text",
                         tgt_lang_name: str | None = None) -> tuple[str, list[str]]:
    """Reduce a raw model reply to the bare hypothesis, reporting which
    fallbacks fired.

    ``instruct_json`` replies are parsed for the first JSON object's
    "translation" field, then for a quoted value after the key, and only
    then fall back to generic stripping.  All templates strip surrounding
    whitespace, one surrounding quote pair, and a leading restatement of
    the target-language label (anchored to the start of the reply so
    legitimate language names in the text survive).  Idempotent.
    """
    notes: list[str] = []
    if template_id == "instruct_json":
        obj = _first_json_object(raw)
        if obj is not None and isinstance(obj.get("translation"), str):
            return obj["translation"].strip(), notes
        match = _JSON_VALUE.search(raw)
        if match is not None:
            try:
                value = json.loads(f'"{match.group(1)}"').strip()
                notes.append("json parse failed; recovered the translation by key pattern")
                return value, notes
            except json.JSONDecodeError:
                pass
        notes.append("json parse failed; returning the stripped raw reply")

    text = raw.strip()
    while True:
        before = text
        text = _strip_quote_pair(text)
        text = _strip_language_label(text, tgt_lang_name)
        text = text.strip()
        if text == before:
            return text, notes


def clean_output(raw: str, template_id: str = "instruct_text",
                 tgt_lang_name: str | None = None) -> str:
    """:func:`clean_output_verbose` without the fallback notes."""
    return clean_output_verbose(raw, template_id, tgt_lang_name)[0]
