"""Command-line front end: serialize, demux, score, and simulate as a pipeline.

Exit codes: 0 success, 1 the run completed but validation diagnostics were
emitted (bad input lines were skipped), 2 fatal error (usage, unreadable
file, domain violation).  Diagnostics go to standard error, one canonical
JSON object per line; primary results go to the requested output path, with
"-" meaning stdin/stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import formats
from .demux import demux_full
from .metrics import count_switches, evaluate_corpus, format_table, laal, switch_reduction
from .model import (
    Diagnostic,
    GroupingConfig,
    Modality,
    SerializationMethod,
    SerializedSequence,
    Tag,
    TagSet,
    Utterance,
    validate_utterance,
)
from .serialize import GammaConfig, serialize_utterance
from .simulate import (
    latency_study,
    method_label,
    replay_policy_from_json,
    synth_config_from_json,
    synth_corpus,
)

__all__ = ["main"]


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _emit_diags(diags: list[Diagnostic]) -> None:
    for d in diags:
        print(_dumps(d.to_json()), file=sys.stderr)


def _print(text: str) -> None:
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# build


def _method_from_args(args: argparse.Namespace) -> SerializationMethod:
    if args.method == "inter-time":
        if args.gamma is not None:
            raise ValueError("--gamma only applies to --method inter-gamma")
        if args.group_ms is not None:
            GroupingConfig(args.group_ms)
        return SerializationMethod("inter_time", group_ms=args.group_ms)
    # inter-gamma
    if args.group_ms is not None:
        raise ValueError("--group-ms only applies to --method inter-time")
    if args.gamma is None:
        raise ValueError("--method inter-gamma requires --gamma")
    GammaConfig(args.gamma)
    return SerializationMethod("inter_gamma", gamma=args.gamma)


def _build_line(payload: tuple[Utterance, SerializationMethod, TagSet]):
    """Serialize one utterance to its output line.  Top level for pickling."""
    u, method, tags = payload
    try:
        seq = serialize_utterance(u, method, tags)
        return u.utt_id, _dumps(formats.serialized_to_json(seq)), None
    except ValueError as exc:
        return u.utt_id, None, str(exc)


def cmd_build(args: argparse.Namespace) -> int:
    tags = formats.read_tag_set(args.tags)
    method = _method_from_args(args)
    corpus, diags = formats.read_corpus(args.input)

    work: list[Utterance] = []
    for u in corpus:
        problems = validate_utterance(u, tags)
        if problems:
            diags.extend(problems)
        else:
            work.append(u)

    payloads = [(u, method, tags) for u in work]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_build_line, payloads, chunksize=32))
    else:
        results = [_build_line(p) for p in payloads]

    lines = []
    for utt_id, line, err in results:
        if err is not None:
            diags.append(Diagnostic("serialize-error", err, utt_id=utt_id))
        else:
            lines.append(line)
    formats._write_lines(args.output, lines)
    _emit_diags(diags)
    return 1 if diags else 0


# ---------------------------------------------------------------------------
# demux


def cmd_demux(args: argparse.Namespace) -> int:
    tags = formats.read_tag_set(args.tags)
    diags: list[Diagnostic] = []
    records: list[tuple[str, dict]] = []

    if args.text:
        for lineno, line in formats.read_text_lines(args.input):
            if not line.strip():
                continue
            result = demux_full(line, tags, utt_id=f"line{lineno:06d}")
            diags.extend(result.diagnostics)
            records.append((f"line{lineno:06d}", result.words))
    else:
        seqs, diags = formats.read_serialized(args.input, tags)
        for s in seqs:
            result = demux_full(s, tags)
            diags.extend(result.diagnostics)
            records.append((s.utt_id, result.words))

    formats.write_channels(records, args.output)
    _emit_diags(diags)
    return 1 if diags else 0


# ---------------------------------------------------------------------------
# stats


def _tag_set_from_serialized_file(path: str) -> TagSet:
    """Recover the tag vocabulary of a build-written file.

    Tag tokens are exactly the positions whose origin_times entry is null,
    because the serializer stamps an origin time on every word.  Only files
    produced by `build` are guaranteed to satisfy this.
    """
    surfaces: dict[str, None] = {}
    for lineno, line in formats._read_lines(path):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            origins = obj.get("origin_times") or [None] * len(obj["tokens"])
            for text, origin in zip(obj["tokens"], origins):
                if origin is None:
                    surfaces.setdefault(text)
        except (ValueError, KeyError, TypeError):
            continue  # the real reader diagnoses this line
    # Modality and language are not recoverable from the stream and do not
    # matter for switch counting; "und" is the undetermined language code.
    return TagSet(
        tuple(
            Tag(id=s, surface=s, modality=Modality.TRANSCRIPTION, language="und")
            for s in surfaces
        )
    )


def cmd_stats(args: argparse.Namespace) -> int:
    base_tags = _tag_set_from_serialized_file(args.base)
    base, diags_b = formats.read_serialized(args.base, base_tags)
    variant_tags = _tag_set_from_serialized_file(args.variant)
    variant, diags_v = formats.read_serialized(args.variant, variant_tags)
    diags = diags_b + diags_v

    reduction = switch_reduction(base, variant)
    result = {
        "utterances": len(base),
        "base_switches": sum(count_switches(s) for s in base),
        "variant_switches": sum(count_switches(s) for s in variant),
        "reduction": reduction,
    }
    if args.table:
        _print(
            format_table(
                ["utterances", "base switches", "variant switches", "reduction"],
                [[str(result["utterances"]), str(result["base_switches"]), str(result["variant_switches"]), f"{reduction:.6f}"]],
            )
        )
    else:
        _print(_dumps(result))
    _emit_diags(diags)
    return 1 if diags else 0


# ---------------------------------------------------------------------------
# eval / laal


def cmd_eval(args: argparse.Namespace) -> int:
    refs, diags_r = formats.read_corpus(args.refs)
    hyps, diags_h = formats.read_channels(args.hyps)
    diags = diags_r + diags_h
    report = evaluate_corpus(refs, hyps, normalize=args.normalize)
    _print(report.to_table() if args.table else _dumps(report.to_json()))
    _emit_diags(diags)
    return 1 if diags else 0


def cmd_laal(args: argparse.Namespace) -> int:
    traces, diags = formats.read_traces(args.traces)
    by_tag: dict[str, list[float]] = {}
    for tr in traces:
        by_tag.setdefault(tr.tag, []).append(laal(tr))
    channels = [
        {"tag": tag, "mean_laal_ms": sum(vals) / len(vals), "traces": len(vals)}
        for tag, vals in sorted(by_tag.items())
    ]
    all_vals = [v for vals in by_tag.values() for v in vals]
    result = {
        "traces": len(traces),
        "channels": channels,
        "overall_mean_laal_ms": sum(all_vals) / len(all_vals) if all_vals else 0.0,
    }
    if args.table:
        rows = [[c["tag"], f"{c['mean_laal_ms']:.1f}", str(c["traces"])] for c in channels]
        _print(format_table(["tag", "mean LAAL (ms)", "traces"], rows))
    else:
        _print(_dumps(result))
    _emit_diags(diags)
    return 1 if diags else 0


# ---------------------------------------------------------------------------
# synth / study


def _load_json_doc(path: str) -> dict:
    fh, close = formats._open_read(path)
    try:
        try:
            return json.loads(fh.read())
        except UnicodeDecodeError as exc:
            raise ValueError(f"{path}: not valid UTF-8: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON: {exc}") from exc
    finally:
        if close:
            fh.close()


def cmd_synth(args: argparse.Namespace) -> int:
    obj = _load_json_doc(args.config)
    if args.seed is not None:
        obj = {**obj, "seed": args.seed}
    if "seed" not in obj:
        raise ValueError("no seed: provide --seed or a \"seed\" field in the config")
    config = synth_config_from_json(obj)
    formats.write_corpus(synth_corpus(config), args.output)
    return 0


def cmd_study(args: argparse.Namespace) -> int:
    obj = _load_json_doc(args.config)
    diags: list[Diagnostic] = []

    if "corpus" in obj and "synth" in obj:
        raise ValueError("study config must have exactly one of \"corpus\" or \"synth\"")
    if "corpus" in obj:
        corpus, diags = formats.read_corpus(obj["corpus"])
    elif "synth" in obj:
        corpus = synth_corpus(synth_config_from_json(obj["synth"]))
    else:
        raise ValueError("study config must have a \"corpus\" path or a \"synth\" section")

    methods = []
    for m in obj.get("methods", []):
        m = {**m, "name": str(m.get("name", "")).replace("-", "_")}
        methods.append(SerializationMethod.from_json(m))
    if not methods:
        raise ValueError("study config lists no methods")

    policy = replay_policy_from_json(obj.get("replay", {}))
    tags = formats.read_tag_set(obj["tags"]) if "tags" in obj else None

    report = latency_study(corpus, methods, policy, tags)

    fh, close = formats._open_write(args.output)
    try:
        fh.write(_dumps(report))
        fh.write("\n")
    finally:
        if close:
            fh.close()

    rows = []
    for entry in report["methods"]:
        for ch in entry["channels"]:
            rows.append(
                [entry["label"], ch["tag"], f"{ch['mean_laal_ms']:.1f}", f"{entry['mean_switches']:.2f}"]
            )
    _print(format_table(["method", "tag", "mean LAAL (ms)", "mean switches"], rows))
    _emit_diags(diags)
    return 1 if diags else 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tokenweave",
        description="Serialize multi-channel timed transcripts into single tagged "
        "token streams, split them back, and score the results.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="serialize a corpus into tagged token streams")
    p.add_argument("--method", required=True, choices=["inter-time", "inter-gamma"])
    p.add_argument("--gamma", type=float, default=None, help="balance in [0,1] (inter-gamma only)")
    p.add_argument("--group-ms", type=int, default=None, help="time-step grouping window (inter-time only)")
    p.add_argument("--tags", required=True, help="tag set JSON file")
    p.add_argument("--input", required=True, help="corpus JSONL, - for stdin")
    p.add_argument("--output", required=True, help="serialized JSONL, - for stdout")
    p.add_argument("--jobs", type=int, default=1, help="worker processes; output order is input order")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("demux", help="split serialized streams back into channels")
    p.add_argument("--tags", required=True, help="tag set JSON file")
    p.add_argument("--input", required=True, help="serialized JSONL (or plain text with --text)")
    p.add_argument("--output", required=True, help="channels JSONL, - for stdout")
    p.add_argument("--text", action="store_true", help="input is plain text, one stream per line")
    p.set_defaults(func=cmd_demux)

    p = sub.add_parser("stats", help="switch counts and reduction ratio between two builds")
    p.add_argument("--base", required=True, help="baseline serialized JSONL (build output)")
    p.add_argument("--variant", required=True, help="variant serialized JSONL (build output)")
    p.add_argument("--table", action="store_true", help="plain-text table instead of JSON")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("eval", help="WER/BLEU report of demuxed channels against a corpus")
    p.add_argument("--refs", required=True, help="reference corpus JSONL")
    p.add_argument("--hyps", required=True, help="demuxed channels JSONL")
    p.add_argument("--normalize", action="store_true", help="lowercase and strip punctuation")
    p.add_argument("--table", action="store_true", help="plain-text table instead of JSON")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("laal", help="latency report from emission traces")
    p.add_argument("--traces", required=True, help="traces JSONL")
    p.add_argument("--table", action="store_true", help="plain-text table instead of JSON")
    p.set_defaults(func=cmd_laal)

    p = sub.add_parser("synth", help="generate a synthetic corpus from a config")
    p.add_argument("--config", required=True, help="generator config JSON")
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    p.add_argument("--output", required=True, help="corpus JSONL, - for stdout")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("study", help="compare serialization methods: lagging and switches")
    p.add_argument("--config", required=True, help="study config JSON")
    p.add_argument("--output", required=True, help="report JSON, - for stdout")
    p.set_defaults(func=cmd_study)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyError as exc:
        print(f"error: missing field {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
