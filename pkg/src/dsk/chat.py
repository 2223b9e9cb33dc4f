"""CHAT (.cha) transcript parsing and participant-speech normalization.

Parsing keeps the file structure (headers, main tiers, dependent tiers);
normalization reduces a main-tier string to the tokens the participant
actually pronounced: annotation codes are resolved or stripped, fillers
are kept, untranscribed material becomes "unk", and sentence-final
terminators survive as punctuation tokens.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from dsk.errors import ChatParseError

log = logging.getLogger(__name__)

WORD = "word"
FILLER = "filler"
UNK = "unk"
PUNCT = "punct"

# Filler surfaces; a bare token in this set re-classifies as a filler so
# normalization stays idempotent over its own rendered output.
FILLER_WORDS = frozenset(
    ["uh", "um", "uhm", "er", "erm", "em", "eh", "ah", "mm", "hm", "hmm", "mhm"]
)

# Untranscribed / unintelligible material codes.
UNK_CODES = frozenset(["xxx", "xx", "www", "yyy", "yy", "unk"])

# TalkBank-style identity-anonymization placeholders (case-sensitive).
ANON_FORMS = frozenset(
    [
        "Firstname",
        "Lastname",
        "Middlename",
        "Fullname",
        "Nickname",
        "Streetname",
        "Cityname",
        "Placename",
        "Hospitalname",
    ]
)

_SPEAKER_RE = re.compile(r"^\*([A-Z]{2,3}):")
_DEPENDENT_RE = re.compile(r"^%[a-zA-Z]+:")
_BULLET_RE = re.compile(r"^\x15?\d+_\d+\x15?$")
_TIMED_PAUSE_RE = re.compile(r"^\((\.{1,3}|\d+(\.\d+)?)\)$")
_STRIP_CHARS = dict.fromkeys(map(ord, ":^\"%‘“”…‡"))
_STRIP_CHARS[0x2019] = "'"  # curly apostrophe -> straight


@dataclass(frozen=True)
class Token:
    word: str
    kind: str  # word | filler | unk | punct


@dataclass(frozen=True)
class Utterance:
    speaker: str
    raw_text: str


@dataclass(frozen=True)
class ChatDocument:
    headers: tuple[tuple[str, str], ...]
    utterances: tuple[Utterance, ...]
    dependent_tiers: tuple[str, ...]


@dataclass(frozen=True)
class NormalizedTranscript:
    tokens: tuple[Token, ...]

    def words(self) -> list[str]:
        """Surface forms of the non-punctuation tokens."""
        return [t.word for t in self.tokens if t.kind != PUNCT]


@dataclass
class RuleHit:
    """One normalization rule firing, for audit/invariant checks."""

    rule: str
    surface: str


def parse_chat(text: str) -> ChatDocument:
    """Parse CHAT text into headers, main-tier utterances and dependent tiers.

    Tab-indented lines continue the previous tier. Any line starting with
    none of ``@ * %`` or a tab is a parse error.
    """
    headers: list[list[str]] = []
    utterances: list[list[str]] = []  # [speaker, text]
    dependents: list[str] = []
    order: list[str] = []  # what the previous line was, for continuations

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("\t") or line.startswith(" "):
            cont = line.strip()
            if not order:
                raise ChatParseError("continuation line with no previous tier", lineno)
            target = order[-1]
            if target == "header":
                headers[-1][1] = (headers[-1][1] + " " + cont).strip()
            elif target == "main":
                utterances[-1][1] = (utterances[-1][1] + " " + cont).strip()
            else:
                dependents[-1] = dependents[-1] + " " + cont
            continue
        if line.startswith("@"):
            body = line[1:]
            if ":" in body:
                key, _, value = body.partition(":")
                headers.append([key.strip(), value.strip()])
            else:
                headers.append([body.strip(), ""])
            order.append("header")
            continue
        if line.startswith("*"):
            m = _SPEAKER_RE.match(line)
            if not m:
                raise ChatParseError("malformed main-tier speaker code", lineno)
            utterances.append([m.group(1), line[m.end():].strip()])
            order.append("main")
            continue
        if line.startswith("%"):
            if not _DEPENDENT_RE.match(line):
                raise ChatParseError("malformed dependent-tier prefix", lineno)
            dependents.append(line.strip())
            order.append("dependent")
            continue
        raise ChatParseError("malformed tier prefix", lineno, span=line[:20])

    return ChatDocument(
        headers=tuple((k, v) for k, v in headers),
        utterances=tuple(Utterance(s, t) for s, t in utterances),
        dependent_tiers=tuple(dependents),
    )


def participant_utterances(doc: ChatDocument, speaker: str = "PAR") -> list[Utterance]:
    return [u for u in doc.utterances if u.speaker == speaker]


# --- normalization -----------------------------------------------------

# Items of the intermediate parse: ("word", str) | ("group", list) | ("code", str)


def _scan_items(text: str, pos: int, depth: int) -> tuple[list, int]:
    items: list = []
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch == ">":
            if depth == 0:
                raise ChatParseError("unbalanced '>'", span=text[max(0, pos - 10): pos + 10])
            return items, pos + 1
        if ch == "<":
            inner, pos = _scan_items(text, pos + 1, depth + 1)
            items.append(("group", inner))
            continue
        if ch == "[":
            close = _matching_bracket(text, pos)
            items.append(("code", text[pos + 1: close].strip()))
            pos = close + 1
            continue
        if ch == "]":
            raise ChatParseError("unbalanced ']'", span=text[max(0, pos - 10): pos + 10])
        start = pos
        while pos < n and not text[pos].isspace() and text[pos] not in "<[]>":
            pos += 1
        items.append(("word", text[start:pos]))
    if depth != 0:
        raise ChatParseError("unbalanced '<'", span=text[-20:])
    return items, pos


def _matching_bracket(text: str, open_pos: int) -> int:
    depth = 0
    for k in range(open_pos, len(text)):
        if text[k] == "[":
            depth += 1
        elif text[k] == "]":
            depth -= 1
            if depth == 0:
                return k
    raise ChatParseError("unbalanced '['", span=text[open_pos: open_pos + 20])


def _apply_codes(items: list, hits: list[RuleHit]) -> list[str]:
    """Resolve bracket codes against the preceding material; flatten groups."""
    out: list = []  # ("word", str) or ("flat", list[str])
    for kind, payload in items:
        if kind == "word":
            out.append(("word", payload))
        elif kind == "group":
            out.append(("flat", _apply_codes(payload, hits)))
        else:  # code
            code = payload
            if code.startswith("::") or code.startswith(":"):
                replacement = code.lstrip(":").strip()
                if out:
                    out.pop()
                hits.append(RuleHit("replacement", code))
                for w in replacement.split():
                    out.append(("word", w))
            elif code.startswith("/"):
                # retracing marker: the repeated material itself stays
                hits.append(RuleHit("retrace-kept", code))
            elif code.startswith("%") or code.startswith("="):
                hits.append(RuleHit("comment-removed", code))
            elif code.startswith("*"):
                hits.append(RuleHit("error-code-removed", code))
            else:
                log.debug("dropping unknown CHAT code [%s]", code)
                hits.append(RuleHit("unknown-code", code))
    flat: list[str] = []
    for kind, payload in out:
        if kind == "word":
            flat.append(payload)
        else:
            flat.extend(payload)
    return flat


def _word_tokens(raw: str, hits: list[RuleHit]) -> list[Token]:
    """Apply the per-word rule table to one whitespace-level token."""
    tokens: list[Token] = []
    if _BULLET_RE.match(raw):
        hits.append(RuleHit("timing-bullet", raw))
        return tokens
    if raw in (".", "?", "!", ","):
        return [Token(raw, PUNCT)]
    if raw.startswith("+"):
        if any(c in raw for c in ".?!"):
            hits.append(RuleHit("terminator-mapped", raw))
            return [Token(".", PUNCT)]
        hits.append(RuleHit("unknown-code", raw))
        return tokens
    if _TIMED_PAUSE_RE.match(raw):
        hits.append(RuleHit("pause-code", raw))
        return tokens

    # split off trailing terminators glued to a word ("down." -> down + .)
    trail: list[Token] = []
    while raw and raw[-1] in ".?!,":
        trail.insert(0, Token(raw[-1], PUNCT))
        raw = raw[:-1]

    if raw.startswith("&"):
        body = raw[1:]
        if body.startswith("-"):
            word = _cleanup(body[1:]).lower()
            if word:
                hits.append(RuleHit("filler-kept", raw))
                tokens.append(Token(word, FILLER))
            return tokens + trail
        if body.startswith("="):
            hits.append(RuleHit("event-removed", raw))
            return trail
        if body.startswith("+"):
            hits.append(RuleHit("fragment-removed", raw))
            return trail
        # old-style coding: "&uh" is a filler, anything else a fragment
        word = _cleanup(body)
        if word.lower() in FILLER_WORDS:
            hits.append(RuleHit("filler-kept", raw))
            tokens.append(Token(word.lower(), FILLER))
        else:
            hits.append(RuleHit("fragment-removed", raw))
        return tokens + trail

    if raw.startswith("0"):
        # omitted word: transcribed but not pronounced
        hits.append(RuleHit("omission-removed", raw))
        return trail

    if "@" in raw:
        hits.append(RuleHit("form-suffix-stripped", raw))
        raw = raw.split("@", 1)[0]

    if "(" in raw or ")" in raw:
        expanded = raw.replace("(", "").replace(")", "")
        hits.append(RuleHit("shortening-expanded", raw))
        raw = expanded

    if raw in ANON_FORMS:
        hits.append(RuleHit("unk-mapped", raw))
        return [Token("unk", UNK)] + trail

    parts = raw.split("_") if "_" in raw else [raw]
    if len(parts) > 1:
        hits.append(RuleHit("linkage-split", raw))
    for part in parts:
        word = _cleanup(part.replace("+", ""))
        if not word:
            continue
        if word.lower() in UNK_CODES:
            hits.append(RuleHit("unk-mapped", word))
            tokens.append(Token("unk", UNK))
        elif word.lower() in FILLER_WORDS:
            tokens.append(Token(word.lower(), FILLER))
        else:
            tokens.append(Token(word, WORD))
    return tokens + trail


def _cleanup(word: str) -> str:
    return word.translate(_STRIP_CHARS)


def normalize_utterance(
    utt: Utterance, log_hits: list[RuleHit] | None = None
) -> list[Token]:
    """Normalize one main-tier utterance to pronounced tokens.

    The rule order: bracket codes are resolved first (replacements,
    retracing, comments), then each remaining surface token goes through
    the word rule table. Raises ChatParseError on unbalanced brackets.
    """
    hits: list[RuleHit] = [] if log_hits is None else log_hits
    items, _ = _scan_items(utt.raw_text, 0, 0)
    words = _apply_codes(items, hits)
    tokens: list[Token] = []
    for w in words:
        tokens.extend(_word_tokens(w, hits))
    return tokens


def normalize_document(
    doc: ChatDocument, speaker: str = "PAR", log_hits: list[RuleHit] | None = None
) -> list[NormalizedTranscript]:
    return [
        NormalizedTranscript(tuple(normalize_utterance(u, log_hits)))
        for u in participant_utterances(doc, speaker)
    ]


def render_transcript(
    transcripts: list[NormalizedTranscript], include_punctuation: bool
) -> str:
    """Space-join all tokens across utterances, in order."""
    parts = []
    for tr in transcripts:
        for tok in tr.tokens:
            if tok.kind == PUNCT and not include_punctuation:
                continue
            parts.append(tok.word)
    return " ".join(parts)
