"""Core value types for multi-channel timed word streams.

A recording is represented as an :class:`Utterance` holding one channel per
output stream (a transcription or a translation), each channel being an
ordered list of words with millisecond emission timestamps.  Serializers
flatten an utterance into a single :class:`SerializedSequence` of channel-tag
tokens and word tokens; the demultiplexer inverts that encoding.

All types are immutable after construction.  Cheap local invariants (word
shape, timestamp sign, tag uniqueness) are enforced by the constructors;
structural cross-checks that must tolerate broken data live in
:func:`validate_utterance`, which reports diagnostics instead of raising.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

__all__ = [
    "Modality",
    "TimedWord",
    "Tag",
    "TagSet",
    "Channel",
    "Utterance",
    "TagToken",
    "WordToken",
    "SerializedToken",
    "SerializationMethod",
    "SerializedSequence",
    "GroupingConfig",
    "Diagnostic",
    "UNKNOWN_CHANNEL",
    "validate_utterance",
    "check_sequence",
]

# Bucket for words the demultiplexer cannot route to a declared tag.
# Reserved: TagSet construction rejects this surface.
UNKNOWN_CHANNEL = "<unknown>"


class Modality(enum.Enum):
    """Whether a channel carries source-language transcription or a translation."""

    TRANSCRIPTION = "asr"
    TRANSLATION = "st"


def _check_token_text(value: str, what: str) -> None:
    if not isinstance(value, str) or not value:
        raise ValueError(f"{what} must be a non-empty string, got {value!r}")
    if any(ch.isspace() for ch in value):
        raise ValueError(f"{what} must not contain whitespace: {value!r}")


@dataclass(frozen=True, slots=True)
class TimedWord:
    """A single word and the millisecond offset at which it is emitted.

    Attributes:
        time: Emission offset from utterance start, non-negative integer ms.
        word: The word surface; non-empty, no whitespace characters.
    """

    time: int
    word: str

    def __post_init__(self) -> None:
        if not isinstance(self.time, int) or isinstance(self.time, bool) or self.time < 0:
            raise ValueError(f"time must be a non-negative integer, got {self.time!r}")
        _check_token_text(self.word, "word")


@dataclass(frozen=True, slots=True)
class Tag:
    """A channel marker token.

    Attributes:
        id: Opaque channel identifier, unique within a TagSet.
        surface: Literal token string, e.g. ``"#ASR#"`` or ``"#ES#"``.
        modality: Transcription or translation.
        language: BCP-47-style language code.
    """

    id: str
    surface: str
    modality: Modality
    language: str

    def __post_init__(self) -> None:
        _check_token_text(self.surface, "tag surface")
        if not isinstance(self.modality, Modality):
            raise ValueError(f"modality must be a Modality, got {self.modality!r}")
        if not self.language:
            raise ValueError("language must be non-empty")


@dataclass(frozen=True, slots=True)
class TagSet:
    """Ordered collection of tags; declaration order is tie-break priority.

    When two words from different channels share a timestamp, the channel
    whose tag is declared earlier wins, so transcription tags conventionally
    come first.
    """

    tags: tuple[Tag, ...]

    def __post_init__(self) -> None:
        tags = tuple(self.tags)
        object.__setattr__(self, "tags", tags)
        if not tags:
            raise ValueError("a TagSet needs at least one tag")
        surfaces = [t.surface for t in tags]
        if len(set(surfaces)) != len(surfaces):
            raise ValueError(f"duplicate tag surfaces: {surfaces}")
        ids = [t.id for t in tags]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate tag ids: {ids}")
        if UNKNOWN_CHANNEL in surfaces:
            raise ValueError(f"tag surface {UNKNOWN_CHANNEL!r} is reserved")

    def __iter__(self):
        return iter(self.tags)

    def __contains__(self, surface: str) -> bool:
        return any(t.surface == surface for t in self.tags)

    def get(self, surface: str) -> Tag | None:
        for t in self.tags:
            if t.surface == surface:
                return t
        return None

    def priority(self, surface: str) -> int:
        """Index of `surface` in declaration order; len(tags) if unknown."""
        for i, t in enumerate(self.tags):
            if t.surface == surface:
                return i
        return len(self.tags)

    @property
    def surfaces(self) -> tuple[str, ...]:
        return tuple(t.surface for t in self.tags)


@dataclass(frozen=True, slots=True)
class Channel:
    """One tagged output stream: a tag plus its timed words.

    Words are expected non-decreasing in time (a streaming model's emission
    trace is monotone by construction), but a violating channel is still
    constructible so that :func:`validate_utterance` can report it.
    """

    tag: Tag
    words: tuple[TimedWord, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "words", tuple(self.words))

    def __len__(self) -> int:
        return len(self.words)


@dataclass(frozen=True, slots=True)
class Utterance:
    """All channels of one audio segment.

    Attributes:
        utt_id: Corpus-unique identifier.
        duration_ms: Source audio duration, positive integer ms.  Word times
            may exceed it: translation words routinely trail the audio.
        channels: One entry per output stream; tags must be pairwise distinct
            (reported by the validator, not the constructor).
    """

    utt_id: str
    duration_ms: int
    channels: tuple[Channel, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.duration_ms, int) or isinstance(self.duration_ms, bool) or self.duration_ms < 1:
            raise ValueError(f"duration_ms must be a positive integer, got {self.duration_ms!r}")
        object.__setattr__(self, "channels", tuple(self.channels))

    def channel(self, surface: str) -> Channel | None:
        for ch in self.channels:
            if ch.tag.surface == surface:
                return ch
        return None


@dataclass(frozen=True, slots=True)
class TagToken:
    """A channel-switch marker in a serialized stream."""

    tag: Tag


@dataclass(frozen=True, slots=True)
class WordToken:
    """A word in a serialized stream.

    origin_time is the pre-grouping emission timestamp, carried so latency
    can be replayed without the source utterance.  It never affects the
    textual rendering.
    """

    word: str
    origin_time: int | None = None

    def __post_init__(self) -> None:
        _check_token_text(self.word, "word")


SerializedToken = TagToken | WordToken


@dataclass(frozen=True, slots=True)
class SerializationMethod:
    """Provenance of a serialized sequence: which policy built it."""

    name: str
    gamma: float | None = None
    group_ms: int | None = None

    def to_json(self) -> dict:
        out: dict = {"name": self.name}
        if self.gamma is not None:
            out["gamma"] = self.gamma
        if self.group_ms is not None:
            out["group_ms"] = self.group_ms
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SerializationMethod":
        return cls(
            name=obj["name"],
            gamma=obj.get("gamma"),
            group_ms=obj.get("group_ms"),
        )


@dataclass(frozen=True, slots=True)
class SerializedSequence:
    """The flattened token stream a joint model would train on or emit.

    Invariants (enforced at construction): a non-empty sequence starts with
    a tag token, tags only appear on channel switches (never twice in a row,
    never equal to the previous tag), and every word token follows some tag.
    """

    utt_id: str
    tokens: tuple[SerializedToken, ...]
    method: SerializationMethod

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        problems = check_sequence(self.tokens)
        if problems:
            raise ValueError(f"invalid serialized sequence {self.utt_id!r}: {problems[0]}")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def word_tokens(self) -> tuple[WordToken, ...]:
        return tuple(t for t in self.tokens if isinstance(t, WordToken))


def check_sequence(tokens) -> list[str]:
    """Single linear scan over the serialized-sequence invariants.

    Returns one message per violation; an empty list means the token stream
    is well-formed.
    """
    problems: list[str] = []
    prev_tag: Tag | None = None
    prev_was_tag = False
    for i, tok in enumerate(tokens):
        if isinstance(tok, TagToken):
            if i == 0:
                pass
            elif prev_was_tag:
                problems.append(f"adjacent tag tokens at index {i}")
            elif prev_tag is not None and tok.tag.surface == prev_tag.surface:
                problems.append(f"tag {tok.tag.surface!r} repeated without a switch at index {i}")
            prev_tag = tok.tag
            prev_was_tag = True
        elif isinstance(tok, WordToken):
            if prev_tag is None:
                problems.append(f"word {tok.word!r} at index {i} precedes any tag")
            prev_was_tag = False
        else:
            problems.append(f"unknown token type at index {i}: {tok!r}")
    return problems


@dataclass(frozen=True, slots=True)
class GroupingConfig:
    """Time-step grouping window; ``step_ms=None`` disables grouping."""

    step_ms: int | None = None

    def __post_init__(self) -> None:
        if self.step_ms is not None:
            if not isinstance(self.step_ms, int) or isinstance(self.step_ms, bool) or self.step_ms < 1:
                raise ValueError(f"step_ms must be a positive integer, got {self.step_ms!r}")


@dataclass(frozen=True, slots=True)
class Diagnostic:
    """One validation or parse finding.  Diagnostics are data, not failures.

    Attributes:
        code: Stable machine-readable kind, e.g. ``"non-monotone-time"``.
        message: Human-readable description.
        utt_id: Utterance the finding belongs to, when known.
        tag: Channel tag surface involved, when applicable.
        index: Offending position (word index, token index, or line number).
    """

    code: str
    message: str
    utt_id: str | None = None
    tag: str | None = None
    index: int | None = None

    def to_json(self) -> dict:
        out: dict = {"code": self.code, "message": self.message}
        if self.utt_id is not None:
            out["utt_id"] = self.utt_id
        if self.tag is not None:
            out["tag"] = self.tag
        if self.index is not None:
            out["index"] = self.index
        return out


def validate_utterance(u: Utterance, tags: TagSet) -> list[Diagnostic]:
    """Check the structural invariants of an utterance against a tag set.

    Returns an empty list iff the utterance is fully valid: at least one
    channel, pairwise-distinct channel tags all belonging to `tags`,
    non-decreasing word times per channel, and no word colliding with a
    reserved tag surface.
    """
    diags: list[Diagnostic] = []
    if not u.channels:
        diags.append(Diagnostic("no-channels", "utterance has no channels", utt_id=u.utt_id))

    seen: dict[str, int] = {}
    surfaces = set(tags.surfaces)
    for ci, ch in enumerate(u.channels):
        s = ch.tag.surface
        if s in seen:
            diags.append(
                Diagnostic(
                    "duplicate-channel-tag",
                    f"tag {s!r} used by channels {seen[s]} and {ci}",
                    utt_id=u.utt_id,
                    tag=s,
                    index=ci,
                )
            )
        else:
            seen[s] = ci
        if s not in surfaces:
            diags.append(
                Diagnostic(
                    "unknown-channel-tag",
                    f"tag {s!r} is not in the tag set",
                    utt_id=u.utt_id,
                    tag=s,
                    index=ci,
                )
            )
        prev = None
        for wi, tw in enumerate(ch.words):
            if prev is not None and tw.time < prev:
                diags.append(
                    Diagnostic(
                        "non-monotone-time",
                        f"time {tw.time} after {prev} in channel {s!r}",
                        utt_id=u.utt_id,
                        tag=s,
                        index=wi,
                    )
                )
            prev = tw.time
            if tw.word in surfaces:
                diags.append(
                    Diagnostic(
                        "word-is-tag",
                        f"word at index {wi} equals tag surface {tw.word!r}",
                        utt_id=u.utt_id,
                        tag=s,
                        index=wi,
                    )
                )
    return diags
