from __future__ import annotations

import pytest

from tokenweave import (
    GroupingConfig,
    ReplayPolicy,
    SerializationMethod,
    SerializedSequence,
    SynthConfig,
    TagSet,
    TagToken,
    WordToken,
    assign_group,
    inter_time,
    latency_study,
    replay,
    synth_corpus,
    validate_utterance,
)
from tokenweave.formats import utterance_to_json
from tokenweave.simulate import (
    method_label,
    replay_policy_from_json,
    synth_config_from_json,
    synth_config_to_json,
)
from conftest import ASR, DE, ES


def _config(**overrides) -> SynthConfig:
    base = dict(
        seed=42,
        num_utterances=25,
        words_per_channel=(0, 30),
        word_rate_ms=(100, 400),
        translation_lag_ms=(0, 500),
        reorder_window_ms=150,
        channels=(ASR, ES, DE),
        vocab_size=200,
    )
    base.update(overrides)
    return SynthConfig(**base)


class TestSynthCorpus:
    def test_deterministic_for_a_seed(self):
        a = [utterance_to_json(u) for u in synth_corpus(_config())]
        b = [utterance_to_json(u) for u in synth_corpus(_config())]
        assert a == b

    def test_seeds_differ(self):
        a = [utterance_to_json(u) for u in synth_corpus(_config(seed=1))]
        b = [utterance_to_json(u) for u in synth_corpus(_config(seed=2))]
        assert a != b

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_every_utterance_validates(self, seed):
        tags = TagSet((ASR, ES, DE))
        for u in synth_corpus(_config(seed=seed)):
            assert validate_utterance(u, tags) == []
            assert u.duration_ms >= 1

    def test_zero_lag_zero_window_copies_anchor_times(self):
        cfg = _config(
            words_per_channel=(10, 10),
            translation_lag_ms=(0, 0),
            reorder_window_ms=0,
            channels=(ASR, ES),
            num_utterances=5,
        )
        for u in synth_corpus(cfg):
            asr_times = [tw.time for tw in u.channel("#ASR#").words]
            st_times = [tw.time for tw in u.channel("#ES#").words]
            assert st_times == asr_times

    def test_channel_times_are_monotone(self):
        for u in synth_corpus(_config(reorder_window_ms=400)):
            for ch in u.channels:
                times = [tw.time for tw in ch.words]
                assert times == sorted(times)

    def test_utt_ids_are_unique_and_seed_scoped(self):
        ids = [u.utt_id for u in synth_corpus(_config())]
        assert len(set(ids)) == len(ids)
        assert all(i.startswith("s42-") for i in ids)

    @pytest.mark.parametrize(
        "overrides",
        [
            {"words_per_channel": (5, 2)},
            {"word_rate_ms": (-1, 10)},
            {"word_rate_ms": (0, 0)},
            {"reorder_window_ms": -1},
            {"num_utterances": -1},
            {"vocab_size": 0},
            {"channels": ()},
        ],
    )
    def test_config_validation(self, overrides):
        with pytest.raises(ValueError):
            _config(**overrides)

    def test_config_json_round_trip(self):
        cfg = _config()
        assert synth_config_from_json(synth_config_to_json(cfg)) == cfg

    def test_config_json_rejects_other_versions(self):
        blob = synth_config_to_json(_config())
        blob["v"] = 2
        with pytest.raises(ValueError, match="version"):
            synth_config_from_json(blob)


class TestReplay:
    def test_ungrouped_translation_delays(self, demo_utterance, demo_tags):
        seq = inter_time(demo_utterance, tags=demo_tags)
        traces = replay(seq, ReplayPolicy(mode="origin_time"), source_duration_ms=1200)
        assert traces["#ES#"].delays == (300, 900)
        assert traces["#ASR#"].delays == (200, 400, 700)

    def test_grouped_translation_delays(self, demo_utterance, demo_tags):
        seq = inter_time(demo_utterance, GroupingConfig(500), demo_tags)
        traces = replay(seq, ReplayPolicy(mode="group_boundary"), source_duration_ms=1200)
        assert traces["#ES#"].delays == (500, 1000)
        assert traces["#DE#"].delays == (1000, 1000, 1500)

    def test_auto_mode_picks_by_provenance(self, demo_utterance, demo_tags):
        grouped = inter_time(demo_utterance, GroupingConfig(500), demo_tags)
        plain = inter_time(demo_utterance, tags=demo_tags)
        auto = ReplayPolicy(mode="auto")
        assert replay(grouped, auto, 1200)["#ES#"].delays == (500, 1000)
        assert replay(plain, auto, 1200)["#ES#"].delays == (300, 900)

    def test_boundary_mode_needs_grouping_provenance(self, demo_utterance, demo_tags):
        seq = inter_time(demo_utterance, tags=demo_tags)
        with pytest.raises(ValueError, match="not grouped"):
            replay(seq, ReplayPolicy(mode="group_boundary"), 1200)

    def test_missing_origin_time_is_an_error(self, demo_tags):
        seq = SerializedSequence(
            "u",
            (TagToken(ASR), WordToken("a")),
            SerializationMethod("inter_time"),
        )
        with pytest.raises(ValueError, match="origin time"):
            replay(seq, ReplayPolicy(), 1000)

    def test_empty_sequence_yields_no_traces(self):
        seq = SerializedSequence("u", (), SerializationMethod("inter_time"))
        assert replay(seq, ReplayPolicy(), 1000) == {}

    def test_per_token_overhead_counts_every_token(self, demo_utterance, demo_tags):
        seq = inter_time(demo_utterance, tags=demo_tags)
        traces = replay(seq, ReplayPolicy(mode="origin_time", overhead_ms=10), 1200)
        # Token ordinals include tag tokens: Estoy is token 3, feliz. token 13.
        assert traces["#ES#"].delays == (330, 1030)

    def test_duration_defaults_to_latest_delay(self, demo_utterance, demo_tags):
        seq = inter_time(demo_utterance, tags=demo_tags)
        traces = replay(seq, ReplayPolicy())
        assert traces["#DE#"].source_duration_ms == 1100

    def test_ref_len_matches_emitted_words(self, demo_utterance, demo_tags):
        seq = inter_time(demo_utterance, tags=demo_tags)
        traces = replay(seq, ReplayPolicy(), 1200)
        assert traces["#ASR#"].ref_len == 3
        assert traces["#ASR#"].hyp_len == 3

    def test_policy_validation(self):
        with pytest.raises(ValueError):
            ReplayPolicy(mode="banana")
        with pytest.raises(ValueError):
            ReplayPolicy(overhead_ms=-1)
        assert replay_policy_from_json({}) == ReplayPolicy()
        assert replay_policy_from_json({"mode": "origin_time", "overhead_ms": 5}) == ReplayPolicy(
            "origin_time", 5
        )

    def test_grouped_delay_dominates_by_at_most_one_window(self):
        tags = TagSet((ASR, ES, DE))
        step = 500
        for u in synth_corpus(_config(num_utterances=40)):
            plain = replay(inter_time(u, tags=tags), ReplayPolicy("origin_time"), u.duration_ms)
            grouped = replay(
                inter_time(u, GroupingConfig(step), tags),
                ReplayPolicy("group_boundary"),
                u.duration_ms,
            )
            for surface, base in plain.items():
                diffs = [
                    g - b for g, b in zip(grouped[surface].delays, sorted(base.delays))
                ]
                assert all(0 < d <= step for d in diffs)


class TestLatencyStudy:
    def test_labels(self):
        assert method_label(SerializationMethod("inter_time")) == "inter_time"
        assert method_label(SerializationMethod("inter_time", group_ms=500)) == "inter_time+500ms"
        assert method_label(SerializationMethod("inter_gamma", gamma=0.5)) == "inter_gamma(0.5)"

    def test_switch_counts_fall_as_windows_coarsen(self):
        tags = TagSet((ASR, ES, DE))
        corpus = synth_corpus(_config(words_per_channel=(5, 25)))
        report = latency_study(
            corpus,
            [
                SerializationMethod("inter_time"),
                SerializationMethod("inter_time", group_ms=500),
                SerializationMethod("inter_time", group_ms=1000),
            ],
            ReplayPolicy(),
            tags,
        )
        switches = [m["mean_switches"] for m in report["methods"]]
        assert switches[0] >= switches[1] >= switches[2]
        assert report["utterances"] == len(corpus)

    def test_single_method_lists_every_channel(self):
        tags = TagSet((ASR, ES, DE))
        corpus = synth_corpus(_config(words_per_channel=(1, 10), num_utterances=10))
        report = latency_study(corpus, [SerializationMethod("inter_time")], ReplayPolicy(), tags)
        (entry,) = report["methods"]
        assert [c["tag"] for c in entry["channels"]] == ["#ASR#", "#DE#", "#ES#"]

    def test_empty_corpus(self):
        report = latency_study([], [SerializationMethod("inter_time")], ReplayPolicy())
        assert report["methods"][0]["mean_switches"] == 0.0
        assert report["methods"][0]["channels"] == []
