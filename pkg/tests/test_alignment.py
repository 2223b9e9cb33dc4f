import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsk import alignment
from dsk.alignment import (
    AlignmentTrack,
    PauseEvent,
    WordTiming,
    compute_gaps,
    encode_pauses,
    load_word_timestamps,
    mark_for_gap,
    pair_tokens_to_track,
    pause_statistics,
)
from dsk.errors import (
    AlignmentLoadError,
    AlignmentMismatchError,
    InvalidDurationError,
)


def track_from(times, duration=None):
    words = tuple(WordTiming(f"w{i}", s, e) for i, (s, e) in enumerate(times))
    if duration is None:
        duration = max((e for _, e in times), default=0.0)
    return AlignmentTrack(words, duration)


class TestLoaders:
    def test_whisperx_single_word(self):
        track = load_word_timestamps(
            b'[{"word":"the","start":0.0,"end":0.2}]', "whisperx-json"
        )
        assert track.words == (WordTiming("the", 0.0, 0.2),)
        assert track.audio_duration == 0.2

    def test_whisperx_extra_keys_ignored_and_sorted(self):
        data = json.dumps(
            [
                {"word": "b", "start": 1.0, "end": 1.2, "score": 0.9},
                {"word": "a", "start": 0.0, "end": 0.3},
            ]
        ).encode()
        track = load_word_timestamps(data, "whisperx-json")
        assert [w.word for w in track.words] == ["a", "b"]

    def test_ctm_start_plus_duration(self):
        track = load_word_timestamps(b"rec1 1 0.50 0.30 boy", "ctm")
        assert track.words == (WordTiming("boy", 0.5, 0.8),)

    def test_ctm_optional_confidence_and_comments(self):
        data = b";; comment\nrec1 1 0.0 0.5 the 0.99\n"
        track = load_word_timestamps(data, "ctm")
        assert track.words[0].word == "the"

    def test_empty_track(self):
        track = load_word_timestamps(b"[]", "whisperx-json")
        assert track.words == ()
        assert track.audio_duration == 0.0
        track = load_word_timestamps(b"[]", "whisperx-json", audio_duration=10.0)
        assert track.audio_duration == 10.0

    def test_schema_violations_report_record(self):
        with pytest.raises(AlignmentLoadError):
            load_word_timestamps(b'{"not": "a list"}', "whisperx-json")
        with pytest.raises(AlignmentLoadError) as err:
            load_word_timestamps(
                b'[{"word":"a","start":0.0,"end":0.1},{"word":"b","start":-1,"end":0.1}]',
                "whisperx-json",
            )
        assert err.value.record == 1
        with pytest.raises(AlignmentLoadError):
            load_word_timestamps(b'[{"word":"a","start":0.5,"end":0.1}]', "whisperx-json")
        with pytest.raises(AlignmentLoadError):
            load_word_timestamps(b"rec1 1 0.5 boy", "ctm")
        with pytest.raises(AlignmentLoadError):
            load_word_timestamps(b"", "textgrid")

    def test_sniff_format(self):
        assert alignment.sniff_format("x.json") == "whisperx-json"
        assert alignment.sniff_format("x.ctm") == "ctm"
        assert alignment.sniff_format(b"  [1]") == "whisperx-json"
        assert alignment.sniff_format(b"rec 1 0 1 w") == "ctm"


class TestComputeGaps:
    def test_simple_gap(self):
        gaps = compute_gaps(track_from([(0, 0.2), (0.5, 0.7)]))
        assert gaps == [PauseEvent(0, pytest.approx(0.3))]

    def test_contiguous(self):
        gaps = compute_gaps(track_from([(0, 0.2), (0.2, 0.4)]))
        assert gaps == [PauseEvent(0, 0.0)]

    def test_overlap_clamps(self):
        gaps = compute_gaps(track_from([(0, 0.3), (0.25, 0.5)]))
        assert gaps == [PauseEvent(0, 0.0)]

    def test_count_is_words_minus_one(self):
        assert compute_gaps(track_from([])) == []
        assert compute_gaps(track_from([(0, 1)])) == []
        assert len(compute_gaps(track_from([(0, 1), (2, 3), (4, 5)]))) == 2


class TestEncodePauses:
    def test_short_pause_comma(self):
        assert encode_pauses(["a", "b"], [PauseEvent(0, 0.3)]) == "a , b"

    def test_sub_50ms_excluded(self):
        assert encode_pauses(["a", "b"], [PauseEvent(0, 0.04)]) == "a b"

    def test_medium_and_long(self):
        gaps = [PauseEvent(0, 1.0), PauseEvent(1, 2.5)]
        assert encode_pauses(["a", "b", "c"], gaps) == "a . b ... c"

    def test_boundaries(self):
        assert mark_for_gap(0.05) == ","
        assert mark_for_gap(0.5) == "."
        assert mark_for_gap(2.0) == "."
        assert mark_for_gap(2.0000001) == "..."
        assert mark_for_gap(0.0499999) is None

    def test_length_mismatch(self):
        with pytest.raises(AlignmentMismatchError):
            encode_pauses(["a", "b", "c"], [PauseEvent(0, 0.1)])

    def test_degenerate(self):
        assert encode_pauses([], []) == ""
        assert encode_pauses(["a"], []) == "a"

    @given(
        st.lists(
            st.floats(min_value=0.0, max_value=5.0, allow_nan=False), max_size=30
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_alphabet_and_recovery(self, gap_values):
        tokens = [f"t{i}" for i in range(len(gap_values) + 1)]
        gaps = [PauseEvent(i, g) for i, g in enumerate(gap_values)]
        encoded = encode_pauses(tokens, gaps)
        parts = encoded.split()
        marks = [p for p in parts if p in alignment.PAUSE_MARKS]
        words = [p for p in parts if p not in alignment.PAUSE_MARKS]
        assert words == tokens
        assert len(marks) == sum(1 for g in gap_values if g >= 0.05)

    def test_mark_monotone_in_gap(self):
        order = {None: 0, ",": 1, ".": 2, "...": 3}
        last = 0
        for gap in np.linspace(0.0, 3.0, 1201):
            level = order[mark_for_gap(float(gap))]
            assert level >= last
            last = level


class TestPauseStatistics:
    def test_speech_rate(self):
        times = [(i * 0.5, i * 0.5 + 0.4) for i in range(120)]
        track = track_from(times, duration=60.0)
        assert pause_statistics(track).speech_rate == pytest.approx(2.0)

    def test_fifty_ms_floor_then_average(self):
        # gaps 0.3, 0.04, 1.0 -> pauses {0.3, 1.0}: n=2, total=1.3, mean=0.65
        times = [(0.0, 1.0), (1.3, 2.0), (2.04, 3.0), (4.0, 5.0)]
        stats = pause_statistics(track_from(times, duration=10.0))
        assert stats.n_pauses == 2
        assert stats.total_pause == pytest.approx(1.3)
        assert stats.mean_pause == pytest.approx(0.65)
        assert stats.speech_rate == pytest.approx(0.4)

    def test_empty_with_override(self):
        stats = pause_statistics(AlignmentTrack((), 10.0))
        assert stats == alignment.PauseStats(0.0, 0, 0.0, 0.0)

    def test_invalid_duration(self):
        with pytest.raises(InvalidDurationError):
            pause_statistics(AlignmentTrack((WordTiming("a", 0, 1),), 0.0))

    @given(
        st.lists(
            st.tuples(
                st.floats(min_value=0, max_value=100, allow_nan=False),
                st.floats(min_value=0, max_value=2, allow_nan=False),
            ),
            max_size=40,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_consistency_invariant(self, spans):
        t = 0.0
        times = []
        for gap, dur in spans:
            t += gap
            times.append((t, t + dur))
            t += dur
        track = track_from(times, duration=t + 1.0)
        stats = pause_statistics(track)
        assert stats.n_pauses >= 0
        assert stats.total_pause >= 0
        assert abs(stats.mean_pause * stats.n_pauses - stats.total_pause) < 1e-9
        assert stats.speech_rate >= 0


class TestPairing:
    def test_equal_counts_pair_by_index(self):
        track = track_from([(0, 1), (2, 3)])
        kept, dropped = pair_tokens_to_track(["x", "y"], track)
        assert kept == ["x", "y"] and dropped == 0

    def test_extra_transcript_tokens_dropped(self):
        words = tuple(WordTiming(w, i, i + 0.5) for i, w in enumerate(["a", "b"]))
        track = AlignmentTrack(words, 3.0)
        kept, dropped = pair_tokens_to_track(["a", "unk", "b"], track)
        assert kept == ["a", "b"] and dropped == 1

    def test_impossible_pairing(self):
        words = tuple(WordTiming(w, i, i + 0.5) for i, w in enumerate(["a", "b", "c"]))
        track = AlignmentTrack(words, 4.0)
        with pytest.raises(AlignmentMismatchError):
            pair_tokens_to_track(["a", "b"], track)
