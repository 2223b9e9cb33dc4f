"""Word-level timestamp ingestion, inter-word pauses and pause encoding.

Accepted formats are whisperx-style JSON (top-level array of
``{"word", "start", "end"}`` objects) and CTM
(``recording channel start duration word [confidence]`` lines).
Pause encoding follows the threshold table: gaps under 50 ms are ignored,
[0.05, 0.5) becomes ",", [0.5, 2.0] becomes "." and anything longer "...".
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass

from dsk.errors import AlignmentLoadError, AlignmentMismatchError, InvalidDurationError

log = logging.getLogger(__name__)

MIN_PAUSE = 0.05
SHORT_MAX = 0.5
MEDIUM_MAX = 2.0

PAUSE_MARKS = (",", ".", "...")

# punctuation characters removed when reducing running text to bare words
_PUNCT_STRIP = dict.fromkeys(map(ord, ".,?!…;:\"()-"))


def strip_punct_tokens(text: str) -> list[str]:
    """Whitespace tokens with punctuation characters removed (case kept)."""
    return [w for w in (t.translate(_PUNCT_STRIP) for t in text.split()) if w]


@dataclass(frozen=True)
class WordTiming:
    word: str
    start: float
    end: float


@dataclass(frozen=True)
class AlignmentTrack:
    words: tuple[WordTiming, ...]
    audio_duration: float


@dataclass(frozen=True)
class PauseEvent:
    after_index: int
    gap: float


@dataclass(frozen=True)
class PauseStats:
    speech_rate: float
    n_pauses: int
    mean_pause: float
    total_pause: float


def _check_timing(word: str, start: float, end: float, record: int) -> WordTiming:
    if not (isinstance(start, (int, float)) and isinstance(end, (int, float))):
        raise AlignmentLoadError("start/end must be numbers", record)
    if start < 0 or end < 0:
        raise AlignmentLoadError("negative time", record)
    if end < start:
        raise AlignmentLoadError("end before start", record)
    return WordTiming(str(word), float(start), float(end))


def _load_whisperx(data: bytes) -> list[WordTiming]:
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        raise AlignmentLoadError(f"invalid JSON: {exc}") from exc
    if not isinstance(payload, list):
        raise AlignmentLoadError("expected a top-level JSON array")
    words = []
    for idx, rec in enumerate(payload):
        if not isinstance(rec, dict) or not {"word", "start", "end"} <= set(rec):
            raise AlignmentLoadError("record must have word/start/end keys", idx)
        words.append(_check_timing(rec["word"], rec["start"], rec["end"], idx))
    return words


def _load_ctm(data: bytes) -> list[WordTiming]:
    words = []
    for idx, line in enumerate(data.decode("utf-8").splitlines()):
        line = line.strip()
        if not line or line.startswith(";;"):
            continue
        fields = line.split()
        if len(fields) not in (5, 6):
            raise AlignmentLoadError("CTM line needs 5 or 6 fields", idx)
        try:
            start = float(fields[2])
            dur = float(fields[3])
        except ValueError as exc:
            raise AlignmentLoadError(f"bad CTM numbers: {exc}", idx) from exc
        words.append(_check_timing(fields[4], start, start + dur, idx))
    return words


def load_word_timestamps(
    data: bytes,
    format: str,
    audio_duration: float | None = None,
) -> AlignmentTrack:
    """Load an alignment file; ``format`` is ``whisperx-json`` or ``ctm``.

    The track is sorted by start time. audio_duration comes from the
    override when given, else the maximum end time (0 for an empty track).
    """
    if format == "whisperx-json":
        words = _load_whisperx(data)
    elif format == "ctm":
        words = _load_ctm(data)
    else:
        raise AlignmentLoadError(f"unknown alignment format {format!r}")
    words.sort(key=lambda w: w.start)
    max_end = max((w.end for w in words), default=0.0)
    if audio_duration is None:
        duration = max_end
    else:
        duration = float(audio_duration)
        if duration < max_end:
            log.warning(
                "audio_duration %.3f below last word end %.3f; clamping", duration, max_end
            )
            duration = max_end
    return AlignmentTrack(tuple(words), duration)


def sniff_format(path_or_data) -> str:
    """Guess the alignment format from a filename or raw bytes."""
    name = str(path_or_data)
    if name.endswith(".json"):
        return "whisperx-json"
    if name.endswith(".ctm"):
        return "ctm"
    head = path_or_data if isinstance(path_or_data, bytes) else b""
    return "whisperx-json" if head.lstrip()[:1] == b"[" else "ctm"


def compute_gaps(track: AlignmentTrack) -> list[PauseEvent]:
    """One event per consecutive word pair; overlaps clamp to gap 0."""
    out = []
    for i in range(len(track.words) - 1):
        gap = track.words[i + 1].start - track.words[i].end
        out.append(PauseEvent(i, max(0.0, gap)))
    return out


def mark_for_gap(gap: float) -> str | None:
    if gap < MIN_PAUSE:
        return None
    if gap < SHORT_MAX:
        return ","
    if gap <= MEDIUM_MAX:
        return "."
    return "..."


def encode_pauses(tokens: list[str], gaps: list[PauseEvent]) -> str:
    """Insert pause marks between tokens per the threshold table.

    Tokens must be punctuation-free and index-aligned with the timed
    words the gaps came from (len(tokens) == len(gaps) + 1).
    """
    if not tokens and not gaps:
        return ""
    if len(tokens) != len(gaps) + 1:
        raise AlignmentMismatchError(
            f"{len(tokens)} tokens cannot align with {len(gaps)} gaps"
        )
    parts = [tokens[0]]
    for tok, event in zip(tokens[1:], gaps):
        mark = mark_for_gap(event.gap)
        if mark is not None:
            parts.append(mark)
        parts.append(tok)
    return " ".join(parts)


def pause_statistics(track: AlignmentTrack) -> PauseStats:
    """Speech rate plus count/mean/total of pauses at or above 50 ms."""
    n_words = len(track.words)
    if n_words > 0 and track.audio_duration <= 0:
        raise InvalidDurationError(
            f"audio_duration must be positive with {n_words} words"
        )
    rate = n_words / track.audio_duration if n_words > 0 else 0.0
    pauses = [e.gap for e in compute_gaps(track) if e.gap >= MIN_PAUSE]
    total = math.fsum(pauses)
    n = len(pauses)
    return PauseStats(rate, n, total / n if n else 0.0, total)


def pair_tokens_to_track(
    tokens: list[str], track: AlignmentTrack
) -> tuple[list[str], int]:
    """Pair transcript tokens with the track's words, index by index.

    Equal counts pair directly. Otherwise tokens with no counterpart in
    the alignment (e.g. "unk") are dropped with a warning; if the track
    still has unmatched words, pairing is impossible.
    Returns (tokens kept, number dropped).
    """
    if len(tokens) == len(track.words):
        return list(tokens), 0
    kept: list[str] = []
    j = 0
    dropped = 0
    words = track.words
    for tok in tokens:
        if j < len(words) and tok.casefold() == words[j].word.casefold():
            kept.append(tok)
            j += 1
        else:
            dropped += 1
            log.warning("dropping transcript token %r absent from alignment", tok)
    if j != len(words):
        raise AlignmentMismatchError(
            f"alignment has {len(words) - j} words with no transcript token"
        )
    return kept, dropped
