"""Merge status timelines into caption phrases appended to the original text."""

from __future__ import annotations

from dataclasses import dataclass

from .translator import PARTS, VOCABULARIES

MAX_STATUSES_PER_PART = 4


@dataclass(frozen=True)
class EnhancedCaption:
    original: str
    merged: dict  # part -> merged status words (truncated)
    text: str


def merge_consecutive(words) -> list:
    """Collapse runs of equal consecutive words; idempotent."""
    out: list = []
    for w in words:
        if not out or out[-1] != w:
            out.append(w)
    return out


def _body_clause(words: list) -> str:
    clause = f"the person faces {words[0]}"
    if len(words) > 1:
        clause += f", then turns to {words[1]}"
        for w in words[2:]:
            clause += f", then {w}"
    return clause


def _head_clause(words: list) -> str:
    clause = f"the head points {words[0]}"
    for w in words[1:]:
        clause += f", then {w}"
    return clause


def _hand_clause(side: str, words: list) -> str:
    if words[0] == "raise-up":
        clause = f"the {side} hand raises up"
    else:
        clause = f"the {side} hand stays at the {words[0]}"
    for w in words[1:]:
        clause += ", then raises up" if w == "raise-up" else f", then {w}"
    return clause


def combine(original: str, timelines: dict) -> EnhancedCaption:
    """Append per-part phrases to the original caption.

    ``timelines`` maps part names to status-word sequences (any length; only
    the parts present are rendered, in the fixed body/head/left/right order).
    Consecutive duplicates are merged and at most four statuses per part are
    kept, bounding the caption length.
    """
    if not original:
        raise ValueError("original caption must be non-empty")
    merged: dict = {}
    clauses: list = []
    for part in PARTS:
        if part not in timelines:
            continue
        words = merge_consecutive(list(timelines[part]))[:MAX_STATUSES_PER_PART]
        if not words:
            continue
        unknown = [w for w in words if w not in VOCABULARIES[part]]
        if unknown:
            raise ValueError(f"{part}: unknown status word(s) {unknown}")
        merged[part] = words
        if part == "body_direction":
            clauses.append(_body_clause(words))
        elif part == "head":
            clauses.append(_head_clause(words))
        else:
            clauses.append(_hand_clause(part.split("_")[0], words))

    if clauses:
        sep = " " if original.rstrip().endswith(".") else ". "
        text = original + sep + ". ".join(clauses) + "."
    else:
        text = original
    return EnhancedCaption(original=original, merged=merged, text=text)
