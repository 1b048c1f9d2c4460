from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tokenweave import (
    Channel,
    EmissionTrace,
    GroupingConfig,
    Modality,
    SerializationMethod,
    SerializedSequence,
    TagToken,
    TimedWord,
    Utterance,
    WordToken,
    bleu_corpus,
    count_switches,
    evaluate_corpus,
    inter_time,
    laal,
    switch_reduction,
    wer,
)
from tokenweave.metrics import format_table, normalize_words
from conftest import ASR, ES


# Expected distances verified against an exhaustive-alignment oracle
# (recursive minimum over substitution/insertion/deletion paths).
WER_CASES = [
    (["the", "cat", "sat"], ["the", "cat", "sat"], 0.0),
    (["the", "cat", "sat"], ["the", "cat"], 1 / 3),
    (["the", "cat"], ["the", "cat", "sat"], 0.5),
    (["a"], ["b"], 1.0),
    (["a", "b", "c", "d"], [], 1.0),
    (["x"], ["x", "x", "x"], 2.0),
    (["a", "b"], ["b", "a"], 1.0),
    (["a", "b"], ["a", "x", "y", "b"], 1.0),
    (["i", "saw", "the", "cat"], ["i", "saw", "a", "cat"], 0.25),
    (
        ["the", "quick", "brown", "fox", "jumps", "over", "the", "lazy", "dog"],
        ["the", "quick", "red", "fox", "jumped", "over", "lazy", "dogs"],
        4 / 9,
    ),
    (["a", "a", "b", "a"], ["a", "b", "a"], 0.25),
    (["The", "cat"], ["the", "cat"], 0.5),
    (["uno", "dos", "tres", "cuatro", "cinco"], ["uno", "tres", "dos", "cuatro"], 0.6),
    (["x", "y"], ["x", "y", "x", "y", "x", "y"], 2.0),
]


class TestWer:
    @pytest.mark.parametrize("ref,hyp,expected", WER_CASES)
    def test_oracle_cases(self, ref, hyp, expected):
        assert wer(ref, hyp) == pytest.approx(expected)

    def test_empty_reference_is_an_error(self):
        with pytest.raises(ValueError, match="reference"):
            wer([], ["a"])
        with pytest.raises(ValueError):
            wer([], [])

    def test_normalization(self):
        assert wer(["The", "cat"], ["the", "cat"], normalize=True) == 0.0
        assert wer(["Hello,", "world!"], ["hello", "world"], normalize=True) == 0.0
        # Normalization that empties the reference surfaces as an error too.
        with pytest.raises(ValueError):
            wer(["..."], ["a"], normalize=True)

    @given(st.lists(st.sampled_from("abc"), min_size=1, max_size=8),
           st.lists(st.sampled_from("abc"), max_size=8))
    def test_identity_and_scaled_symmetry(self, a, b):
        assert wer(a, a) == 0.0
        if b:
            assert wer(a, b) * len(a) == pytest.approx(wer(b, a) * len(b))


def test_normalize_words_strips_case_and_punctuation():
    assert normalize_words(["Hello,", "WORLD!", "..."]) == ["hello", "world"]


# Scores verified against a direct transcription of the corpus-BLEU formula
# (pooled clipped counts, uniform weights over realizable orders, BP).
TEN = [f"w{i}" for i in range(1, 11)]
TEN_SUB = TEN[:7] + ["x"] + TEN[8:]
BLEU_CASES = [
    ([["the", "cat", "sat", "on", "the", "mat"]], [["the", "cat", "sat", "on", "the", "mat"]], False, 100.0),
    ([["the", "cat"]], [["the", "cat"]], False, 100.0),
    ([["a", "b", "c", "d", "e"]], [["a", "b", "c", "d"]], False, 77.8800783071405),
    ([["x", "y", "z"]], [["a", "b", "c"]], False, 0.0),
    ([["the", "cat", "sat", "on", "the", "mat"]], [["the", "cat", "sat", "on", "a", "mat"]], False, 53.7284965911771),
    ([["a", "b", "c", "d", "e", "f", "g"]], [["a", "b", "c", "e", "f", "g"]], False, 0.0),
    ([TEN], [TEN_SUB], False, 70.71067811865474),
    ([["a", "a", "b"], ["c", "d", "e", "f", "g"]], [["a", "a", "a"], ["c", "d", "e", "f", "g"]], False, 85.99476570625983),
    ([["a", "b"], ["b", "c"]], [["a", "b"], ["b", "x"]], False, 61.237243569579455),
    ([["a", "b", "c", "d"]], [["a", "b", "c", "d", "e", "f"]], False, 50.813274815461476),
    ([["x", "y", "z"]], [["a", "b", "c"]], True, 45.18010018049224),
    ([TEN], [TEN_SUB], True, 74.19446627365011),
    ([["a", "b", "c", "d", "e", "f", "g"]], [["a", "b", "c", "e", "f", "g"]], True, 50.33210449798471),
]


class TestBleu:
    @pytest.mark.parametrize("refs,hyps,smooth,expected", BLEU_CASES)
    def test_oracle_cases(self, refs, hyps, smooth, expected):
        assert bleu_corpus(refs, hyps, smoothing=smooth) == pytest.approx(expected, abs=1e-9)

    def test_brevity_penalty_case_within_stated_tolerance(self):
        assert bleu_corpus([["a", "b", "c", "d", "e"]], [["a", "b", "c", "d"]]) == pytest.approx(
            77.88, abs=0.01
        )

    def test_errors(self):
        with pytest.raises(ValueError, match="references"):
            bleu_corpus([["a"]], [["a"], ["b"]])
        with pytest.raises(ValueError):
            bleu_corpus([], [])

    def test_empty_hypotheses_score_zero(self):
        assert bleu_corpus([["a", "b"]], [[]]) == 0.0

    @given(
        st.lists(
            st.tuples(
                st.lists(st.sampled_from("abcd"), min_size=1, max_size=6),
                st.lists(st.sampled_from("abcd"), min_size=1, max_size=6),
            ),
            min_size=1,
            max_size=5,
        ),
        st.randoms(use_true_random=False),
    )
    @settings(max_examples=60)
    def test_segment_order_invariance(self, pairs, rng):
        refs = [r for r, _ in pairs]
        hyps = [h for _, h in pairs]
        shuffled = list(pairs)
        rng.shuffle(shuffled)
        assert bleu_corpus(refs, hyps) == pytest.approx(
            bleu_corpus([r for r, _ in shuffled], [h for _, h in shuffled])
        )

    @given(st.lists(st.lists(st.sampled_from("abcd"), min_size=1, max_size=8), min_size=1, max_size=4))
    @settings(max_examples=60)
    def test_hundred_iff_exact_match(self, refs):
        assert bleu_corpus(refs, [list(r) for r in refs]) == 100.0
        perturbed = [list(r) for r in refs]
        perturbed[0] = perturbed[0] + ["zzz"]
        assert bleu_corpus(refs, perturbed) < 100.0


def _trace(delays, duration, ref_len, tag="#ES#"):
    return EmissionTrace(
        utt_id="t",
        tag=tag,
        entries=tuple((i, d) for i, d in enumerate(delays)),
        source_duration_ms=duration,
        ref_len=ref_len,
    )


# Hand-evaluated: d* = duration / max(ref_len, hyp_len); stop at the first
# delay reaching the duration (else at the last); average of d_i - (i-1)d*.
LAAL_CASES = [
    ([1000], 1000, 1, 1000.0),
    ([500, 1000], 1000, 2, 500.0),
    ([0, 500], 1000, 2, 0.0),
    ([300, 900], 1200, 2, 300.0),
    ([100, 200, 300, 400], 1200, 2, -200.0),
    ([600, 1300, 1400], 1200, 3, 750.0),
    ([2000], 1000, 1, 2000.0),
    ([250, 250], 500, 2, 125.0),
    ([400], 800, 4, 400.0),
    ([0], 100, 1, 0.0),
    ([100, 800, 900], 800, 3, 316.6666666666667),
    ([500, 1000, 1500, 2000], 1500, 4, 625.0),
]


class TestLaal:
    @pytest.mark.parametrize("delays,duration,ref_len,expected", LAAL_CASES)
    def test_oracle_cases(self, delays, duration, ref_len, expected):
        assert laal(_trace(delays, duration, ref_len)) == pytest.approx(expected, abs=0.5)

    def test_empty_trace_is_an_error(self):
        with pytest.raises(ValueError):
            laal(_trace([], 1000, 1))

    def test_trace_invariants(self):
        with pytest.raises(ValueError):
            _trace([500, 400], 1000, 2)  # decreasing delays
        with pytest.raises(ValueError):
            laal(_trace([1], 0, 1))  # duration below one ms
        with pytest.raises(ValueError):
            EmissionTrace("t", "#ES#", ((0, 1),), source_duration_ms=10, ref_len=-1)
        assert _trace([1, 2, 3], 10, 5).hyp_len == 3
        assert _trace([1, 2, 3], 10, 5).delays == (1, 2, 3)

    def test_lowering_a_delay_lowers_the_average(self):
        base = laal(_trace([400, 600, 800], 2000, 3))
        lower = laal(_trace([400, 500, 800], 2000, 3))
        assert lower < base


class TestSwitchCounting:
    def test_demo_counts(self, demo_utterance, demo_tags):
        assert count_switches(inter_time(demo_utterance, tags=demo_tags)) == 8
        assert count_switches(inter_time(demo_utterance, GroupingConfig(500), demo_tags)) == 6

    def test_single_channel_counts_one(self):
        u = Utterance("u", 100, (Channel(ASR, (TimedWord(1, "a"), TimedWord(2, "b"))),))
        assert count_switches(inter_time(u)) == 1

    def test_lower_bound_is_nonempty_channel_count(self, demo_utterance, demo_tags):
        seq = inter_time(demo_utterance, GroupingConfig(10_000), demo_tags)
        # One window: each channel appears exactly once.
        assert count_switches(seq) == 3

    def test_reduction_demo(self, demo_utterance, demo_tags):
        base = [inter_time(demo_utterance, tags=demo_tags)]
        variant = [inter_time(demo_utterance, GroupingConfig(500), demo_tags)]
        assert switch_reduction(base, variant) == 0.25

    def test_reduction_identity_is_zero(self, demo_utterance, demo_tags):
        base = [inter_time(demo_utterance, tags=demo_tags)]
        assert switch_reduction(base, base) == 0.0

    def test_reduction_zero_base_is_an_error(self):
        empty = SerializedSequence("u", (), SerializationMethod("inter_time"))
        with pytest.raises(ValueError, match="zero"):
            switch_reduction([empty], [empty])

    def test_reduction_requires_matching_ids(self, demo_utterance, demo_tags):
        base = [inter_time(demo_utterance, tags=demo_tags)]
        other = SerializedSequence("someone-else", base[0].tokens, base[0].method)
        with pytest.raises(ValueError, match="utterance ids"):
            switch_reduction(base, [other])


class TestEvaluateCorpus:
    def _perfect_hyps(self, corpus, tags):
        return {
            u.utt_id: {ch.tag.surface: [tw.word for tw in ch.words] for ch in u.channels}
            for u in corpus
        }

    def test_perfect_round_trip_scores(self, demo_utterance, demo_tags):
        report = evaluate_corpus([demo_utterance], self._perfect_hyps([demo_utterance], demo_tags))
        by_tag = {c.tag: c for c in report.channels}
        assert by_tag["#ASR#"].wer == 0.0
        assert by_tag["#ES#"].bleu == 100.0
        assert by_tag["#DE#"].bleu == 100.0
        assert report.overall_wer == 0.0
        assert report.overall_bleu == 100.0

    def test_missing_hypothesis_names_utterance(self, demo_utterance):
        with pytest.raises(ValueError, match="demo-001"):
            evaluate_corpus([demo_utterance], {})

    def test_extra_hypothesis_names_utterance(self, demo_utterance, demo_tags):
        hyps = self._perfect_hyps([demo_utterance], demo_tags)
        hyps["ghost"] = {}
        with pytest.raises(ValueError, match="ghost"):
            evaluate_corpus([demo_utterance], hyps)

    def test_empty_transcription_reference_is_an_error(self):
        u = Utterance("u", 100, (Channel(ASR, ()),))
        with pytest.raises(ValueError, match="empty reference"):
            evaluate_corpus([u], {"u": {"#ASR#": []}})

    def test_traces_produce_mean_laal(self, demo_utterance, demo_tags):
        hyps = self._perfect_hyps([demo_utterance], demo_tags)
        traces = [_trace([300, 900], 1200, 2, tag="#ES#")]
        report = evaluate_corpus([demo_utterance], hyps, traces=traces)
        by_tag = {c.tag: c for c in report.channels}
        assert by_tag["#ES#"].mean_laal_ms == pytest.approx(300.0)
        assert by_tag["#ASR#"].mean_laal_ms is None

    def test_normalize_flag(self):
        u = Utterance("u", 100, (Channel(ASR, (TimedWord(1, "Hello,"), TimedWord(2, "World!"))),))
        hyps = {"u": {"#ASR#": ["hello", "world"]}}
        assert evaluate_corpus([u], hyps).overall_wer == 1.0
        assert evaluate_corpus([u], hyps, normalize=True).overall_wer == 0.0

    def test_report_json_and_table(self, demo_utterance, demo_tags):
        report = evaluate_corpus([demo_utterance], self._perfect_hyps([demo_utterance], demo_tags))
        blob = report.to_json()
        assert blob["utterances"] == 1
        assert {c["tag"] for c in blob["channels"]} == {"#ASR#", "#ES#", "#DE#"}
        table = report.to_table()
        assert "#ASR#" in table and "WER" in table


def test_format_table_alignment():
    table = format_table(["a", "bb"], [["1", "2"], ["333", "4"]])
    lines = table.splitlines()
    assert lines[0].startswith("a")
    assert set(lines[1]) <= {"-", " "}
    assert len(lines) == 4
