"""Streaming demultiplexer: route a serialized token stream back to channels.

The consumer-side inverse of the serializer.  A :class:`DemuxState` tracks
the current channel while tokens are fed one at a time; words are routed to
the channel named by the most recent tag.  Malformed streams never abort:
unroutable words land in a reserved unknown bucket and every anomaly is
recorded as a diagnostic, so all decodable content survives.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .kernels import edit_distance
from .model import (
    Diagnostic,
    SerializedSequence,
    Tag,
    TagSet,
    TagToken,
    UNKNOWN_CHANNEL,
    Utterance,
    WordToken,
)

__all__ = ["DemuxState", "RoutedEvent", "DemuxResult", "feed", "demux_full", "diff_channels"]


@dataclass(frozen=True, slots=True)
class RoutedEvent:
    """One word routed to a channel.

    Attributes:
        tag: Destination tag, or None when the word fell in the unknown bucket.
        word: The routed word.
        token_index: Position of the word token in the serialized stream.
        emission_time: Propagated origin timestamp, when the stream carries one.
    """

    tag: Tag | None
    word: str
    token_index: int
    emission_time: int | None = None


@dataclass(slots=True)
class DemuxState:
    """Accumulator for one stream; grows monotonically as tokens are fed.

    One state per stream.  Distinct states share nothing, so separate
    streams may be demultiplexed concurrently.
    """

    current_tag: Tag | None = None
    current_known: bool = True
    words: dict[str, list[str]] = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    token_index: int = 0
    utt_id: str = ""

    def channel_key(self) -> str:
        if self.current_tag is None or not self.current_known:
            return UNKNOWN_CHANNEL
        return self.current_tag.surface


def feed(state: DemuxState, token: TagToken | WordToken | str, tags: TagSet) -> RoutedEvent | None:
    """Consume one token, updating `state`; returns the event for a routed word.

    Accepts model tokens or raw strings (a string matching a tag surface in
    `tags` counts as that tag).  Tag tokens switch the current channel and
    yield no event.  Error handling is diagnostic-only: a word before any tag
    or after an undeclared tag goes to the unknown bucket; a repeated
    identical tag is flagged but the stream stays decodable.
    """
    idx = state.token_index
    state.token_index += 1

    tag: Tag | None = None
    word: str | None = None
    origin: int | None = None
    if isinstance(token, TagToken):
        tag = token.tag
    elif isinstance(token, WordToken):
        word = token.word
        origin = token.origin_time
    else:
        looked = tags.get(token)
        if looked is not None:
            tag = looked
        else:
            word = token

    if tag is not None:
        known = tag.surface in tags
        if not known:
            state.diagnostics.append(
                Diagnostic(
                    "unknown-tag",
                    f"tag {tag.surface!r} is not in the tag set",
                    utt_id=state.utt_id,
                    tag=tag.surface,
                    index=idx,
                )
            )
        elif state.current_tag is not None and state.current_known and tag.surface == state.current_tag.surface:
            state.diagnostics.append(
                Diagnostic(
                    "redundant-tag",
                    f"tag {tag.surface!r} repeated without a channel switch",
                    utt_id=state.utt_id,
                    tag=tag.surface,
                    index=idx,
                )
            )
        state.current_tag = tag
        state.current_known = known
        return None

    assert word is not None
    if word == "":
        state.diagnostics.append(
            Diagnostic(
                "empty-token",
                "empty token (consecutive spaces in text input?)",
                utt_id=state.utt_id,
                index=idx,
            )
        )
        return None
    if state.current_tag is None:
        state.diagnostics.append(
            Diagnostic(
                "untagged-word",
                f"word {word!r} arrived before any tag",
                utt_id=state.utt_id,
                index=idx,
            )
        )
    key = state.channel_key()
    state.words.setdefault(key, []).append(word)
    routed_tag = state.current_tag if key != UNKNOWN_CHANNEL else None
    return RoutedEvent(tag=routed_tag, word=word, token_index=idx, emission_time=origin)


@dataclass(slots=True)
class DemuxResult:
    """Per-channel word lists plus everything the parse flagged."""

    words: dict[str, list[str]]
    diagnostics: list[Diagnostic]
    events: list[RoutedEvent]


def demux_full(
    stream: SerializedSequence | str | list,
    tags: TagSet,
    utt_id: str = "",
) -> DemuxResult:
    """Batch parse: fold :func:`feed` over a whole stream.

    `stream` may be a serialized sequence, a list of tokens, or a plain-text
    line (tokenized by splitting on single spaces; runs of spaces produce
    empty-token diagnostics).  Channels appear in the result exactly when
    their tag appeared in the stream, even if no words followed.
    """
    if isinstance(stream, SerializedSequence):
        tokens: list = list(stream.tokens)
        if not utt_id:
            utt_id = stream.utt_id
    elif isinstance(stream, str):
        tokens = stream.split(" ") if stream else []
    else:
        tokens = list(stream)

    state = DemuxState(utt_id=utt_id)
    events: list[RoutedEvent] = []
    for token in tokens:
        ev = feed(state, token, tags)
        if ev is not None:
            events.append(ev)
        elif state.current_known and state.current_tag is not None:
            # A declared tag appeared: materialize its channel even if no
            # words ever follow.
            state.words.setdefault(state.current_tag.surface, [])
    return DemuxResult(words=state.words, diagnostics=state.diagnostics, events=events)


def diff_channels(expected: Utterance, actual: dict[str, list[str]]) -> dict[str, int]:
    """Word edit distance per channel between an utterance and demuxed output.

    Channels present on only one side are charged their full length, so stray
    words (including the unknown bucket) and dropped channels always show up.
    """
    out: dict[str, int] = {}
    seen = set()
    for ch in expected.channels:
        ref = [tw.word for tw in ch.words]
        hyp = actual.get(ch.tag.surface, [])
        out[ch.tag.surface] = edit_distance(ref, hyp)
        seen.add(ch.tag.surface)
    for surface, words in actual.items():
        if surface not in seen and words:
            out[surface] = len(words)
    return out
