"""Serialization policies: flatten a multi-channel utterance into one token stream.

Three policies are provided:

* timestamp interleaving (:func:`inter_time`): merge all channels, sort by
  emission time, and emit a channel tag whenever the channel changes;
* time-step grouping (:func:`group_and_reorder` via ``inter_time(...,
  grouping=...)``): bucket timestamps into fixed windows and emit each
  window's words channel-contiguously, trading a bounded latency increase
  for fewer channel switches;
* count-ratio interleaving (:func:`inter_gamma`): a two-channel baseline that
  alternates streams according to a ratio parameter instead of timestamps.

Every policy preserves each channel's internal word order and emits every
input word exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    Channel,
    GroupingConfig,
    SerializationMethod,
    SerializedSequence,
    SerializedToken,
    Tag,
    TagSet,
    TagToken,
    Utterance,
    WordToken,
)

__all__ = [
    "GammaConfig",
    "MergedWord",
    "merge_and_sort",
    "emit_with_tags",
    "assign_group",
    "group_and_reorder",
    "inter_time",
    "inter_gamma",
    "render_text",
    "serialize_utterance",
]


@dataclass(frozen=True, slots=True)
class GammaConfig:
    """Ratio parameter for count-based interleaving, in [0, 1].

    0 emits the whole transcription first, 1 the whole translation first,
    0.5 alternates one word at a time; in general the two streams mix at an
    asymptotic ratio of (1 - gamma) : gamma.
    """

    gamma: float

    def __post_init__(self) -> None:
        if not 0.0 <= float(self.gamma) <= 1.0:
            raise ValueError(f"gamma must be within [0, 1], got {self.gamma!r}")


@dataclass(frozen=True, slots=True)
class MergedWord:
    """One word in the merged cross-channel stream.

    Attributes:
        time: Effective sort timestamp; equals origin_time unless grouping
            substituted a window boundary.
        tag: Channel tag the word belongs to.
        word: Word surface.
        origin_time: The pre-grouping emission timestamp.
        channel_rank: Ordinal of the word within its own channel.
    """

    time: int
    tag: Tag
    word: str
    origin_time: int
    channel_rank: int


def merge_and_sort(u: Utterance, tags: TagSet | None = None) -> list[MergedWord]:
    """Concatenate all channel words and sort them by emission time.

    Ties are broken by tag priority (declaration order of `tags`, falling
    back to the utterance's channel order) and then by the word's position
    in its channel, making the merge fully deterministic.
    """
    if tags is not None:
        priority = {t.surface: i for i, t in enumerate(tags.tags)}
    else:
        priority = {ch.tag.surface: i for i, ch in enumerate(u.channels)}

    merged: list[MergedWord] = []
    for ch in u.channels:
        for rank, tw in enumerate(ch.words):
            merged.append(MergedWord(tw.time, ch.tag, tw.word, tw.time, rank))
    merged.sort(key=lambda mw: (mw.time, priority.get(mw.tag.surface, len(priority)), mw.channel_rank))
    return merged


def emit_with_tags(
    words: list[MergedWord],
    utt_id: str = "",
    method: SerializationMethod | None = None,
) -> SerializedSequence:
    """Walk merged words in order, emitting a tag token on every channel switch."""
    tokens: list[SerializedToken] = []
    prev_surface: str | None = None
    for mw in words:
        if mw.tag.surface != prev_surface:
            tokens.append(TagToken(mw.tag))
            prev_surface = mw.tag.surface
        tokens.append(WordToken(mw.word, origin_time=mw.origin_time))
    return SerializedSequence(
        utt_id=utt_id,
        tokens=tuple(tokens),
        method=method or SerializationMethod("inter_time"),
    )


def assign_group(time: int, step_ms: int) -> int:
    """Upper boundary of the grouping window containing `time`.

    Windows are half-open: the boundary ``t_s`` is the unique multiple of
    `step_ms` with ``t_s - step_ms <= time < t_s``.
    """
    if step_ms < 1:
        raise ValueError(f"step_ms must be >= 1, got {step_ms}")
    if time < 0:
        raise ValueError(f"time must be >= 0, got {time}")
    return step_ms * (time // step_ms + 1)


def group_and_reorder(words: list[MergedWord], step_ms: int) -> list[MergedWord]:
    """Bucket a time-sorted merge into fixed windows, one channel run per window.

    Each word's time becomes its window boundary.  Within a window, words are
    regrouped by channel in order of each channel's first appearance there,
    so a window renders as one contiguous block per channel.  Window order
    and per-channel word order are preserved; origin_time is retained.
    """
    if step_ms < 1:
        raise ValueError(f"step_ms must be >= 1, got {step_ms}")

    out: list[MergedWord] = []
    bucket: list[MergedWord] = []
    bucket_ts: int | None = None

    def flush() -> None:
        # First-appearance channel order inside the window.
        by_tag: dict[str, list[MergedWord]] = {}
        for mw in bucket:
            by_tag.setdefault(mw.tag.surface, []).append(mw)
        for run in by_tag.values():
            out.extend(run)

    for mw in words:
        ts = assign_group(mw.origin_time, step_ms)
        if bucket_ts is not None and ts != bucket_ts:
            flush()
            bucket = []
        bucket_ts = ts
        bucket.append(
            MergedWord(ts, mw.tag, mw.word, mw.origin_time, mw.channel_rank)
        )
    if bucket:
        flush()
    return out


def inter_time(
    u: Utterance,
    grouping: GroupingConfig | None = None,
    tags: TagSet | None = None,
) -> SerializedSequence:
    """Timestamp-ordered serialization, optionally with time-step grouping."""
    merged = merge_and_sort(u, tags)
    if grouping is not None and grouping.step_ms is not None:
        merged = group_and_reorder(merged, grouping.step_ms)
        method = SerializationMethod("inter_time", group_ms=grouping.step_ms)
    else:
        method = SerializationMethod("inter_time")
    return emit_with_tags(merged, utt_id=u.utt_id, method=method)


def inter_gamma(
    asr: Channel,
    st: Channel,
    gamma: float | GammaConfig,
    utt_id: str = "",
) -> SerializedSequence:
    """Two-channel count-ratio interleaving.

    Maintains counts of words emitted so far on each stream; while both
    streams have words left, the next transcription word is emitted iff

        (1 - gamma) * (1 + st_emitted) >= gamma * (1 + asr_emitted)

    (ties favor transcription, so the stream opens with the first channel),
    otherwise the next translation word.  Once a stream is exhausted the
    remainder of the other follows.  Tags are inserted on channel switches
    exactly as in the timestamp policy.
    """
    g = float(gamma.gamma if isinstance(gamma, GammaConfig) else GammaConfig(float(gamma)).gamma)

    merged: list[MergedWord] = []
    i = j = 0
    while i < len(asr.words) or j < len(st.words):
        if i < len(asr.words) and j < len(st.words):
            take_asr = (1.0 - g) * (1 + j) >= g * (1 + i)
        else:
            take_asr = i < len(asr.words)
        if take_asr:
            tw = asr.words[i]
            merged.append(MergedWord(tw.time, asr.tag, tw.word, tw.time, i))
            i += 1
        else:
            tw = st.words[j]
            merged.append(MergedWord(tw.time, st.tag, tw.word, tw.time, j))
            j += 1

    return emit_with_tags(
        merged, utt_id=utt_id, method=SerializationMethod("inter_gamma", gamma=g)
    )


def render_text(s: SerializedSequence) -> str:
    """Render a sequence as plain text: token surfaces joined by single spaces."""
    parts: list[str] = []
    for tok in s.tokens:
        parts.append(tok.tag.surface if isinstance(tok, TagToken) else tok.word)
    return " ".join(parts)


def serialize_utterance(
    u: Utterance,
    method: SerializationMethod,
    tags: TagSet | None = None,
) -> SerializedSequence:
    """Dispatch an utterance to the policy named by a method record.

    For the count-ratio policy the utterance must have exactly two channels;
    when their modalities differ, the transcription channel takes the
    transcription role regardless of declaration order.
    """
    if method.name == "inter_time":
        grouping = GroupingConfig(step_ms=method.group_ms)
        return inter_time(u, grouping=grouping, tags=tags)
    if method.name == "inter_gamma":
        if method.gamma is None:
            raise ValueError("inter_gamma requires a gamma value")
        if len(u.channels) != 2:
            raise ValueError(
                f"inter_gamma needs exactly two channels, utterance {u.utt_id!r} has {len(u.channels)}"
            )
        first, second = u.channels
        if first.tag.modality != second.tag.modality and second.tag.modality.value == "asr":
            first, second = second, first
        seq = inter_gamma(first, second, method.gamma, utt_id=u.utt_id)
        return seq
    raise ValueError(f"unknown serialization method {method.name!r}")
