"""Command-line pipeline: segment detection traces into per-hand clips, fuse
the two hand streams into task steps, evaluate against references, calibrate
similarity thresholds, and render timelines.

Exit codes: 0 success, 1 validation failure, 2 IO/parse failure, 3 internal
invariant violation.
"""

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .clips import extract_clips, filter_short_clips, read_clipset, reconnect_clips, write_clipset
from .config import ConfigError, PipelineConfig, load_config
from .fsm import run_fsm, score_series
from .fusion import fuse_streams, read_segmentation, write_segmentation
from .metrics import (
    detection_eval,
    detection_rows_to_dict,
    f1_report,
    f1_scores_to_dict,
    format_detection_table,
    format_f1_table,
)
from .render import roc_svg, timeline_ascii, timeline_svg
from .similarity import (
    provider_from_spec,
    read_labeled_pairs,
    resolve_threshold,
    roc_auc,
    roc_curve,
    select_threshold_roc,
)
from .trace import HandSide, TraceParseError, canonicalize_trace, parse_trace

CONFIG_ENV_VAR = "HOISEG_CONFIG"


def _add_config_flags(parser):
    g = parser.add_argument_group("pipeline config (overrides the config file)")
    g.add_argument("--config", help=f"config JSON path (or ${CONFIG_ENV_VAR})")
    g.add_argument("--min-score", type=float, dest="min_score")
    g.add_argument("--window-len", type=int, dest="window_len")
    g.add_argument("--window-threshold", type=int, dest="window_threshold")
    g.add_argument("--strict-window", action="store_true", default=None, dest="strict_window")
    g.add_argument("--min-duration", type=float, dest="min_duration_s")
    g.add_argument("--boundary-fraction", type=float, dest="boundary_fraction")
    g.add_argument("--provider", dest="similarity_provider")
    g.add_argument("--sim-threshold", dest="sim_threshold")
    g.add_argument("--similarity-polarity", dest="similarity_polarity")
    g.add_argument("--reconnect-max-gap", type=float, dest="reconnect_max_gap_s")
    g.add_argument("--iosa-threshold", type=float, dest="iosa_threshold")
    g.add_argument("--attention-fallback", dest="attention_fallback")


_CONFIG_FIELDS = (
    "min_score", "window_len", "window_threshold", "strict_window",
    "min_duration_s", "boundary_fraction", "similarity_provider",
    "sim_threshold", "similarity_polarity", "reconnect_max_gap_s",
    "iosa_threshold", "attention_fallback",
)


def _build_config(args) -> PipelineConfig:
    path = args.config or os.environ.get(CONFIG_ENV_VAR)
    config = load_config(path) if path else PipelineConfig()
    overrides = {f: getattr(args, f, None) for f in _CONFIG_FIELDS}
    if isinstance(overrides.get("sim_threshold"), str):
        raw = overrides["sim_threshold"]
        if not raw.startswith("roc:"):
            try:
                overrides["sim_threshold"] = float(raw)
            except ValueError:
                pass  # leave for validate() to report
    return config.with_overrides(**overrides).validate()


def _write_json(payload: dict, dest: Path) -> None:
    dest.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _segment_trace(trace_path, config: PipelineConfig):
    """Shared segment stage: returns (trace, left ClipSet, right ClipSet,
    resolved sim threshold)."""
    provider = provider_from_spec(config.similarity_provider)
    sim_threshold = (
        resolve_threshold(config.sim_threshold, provider)
        if provider is not None
        else None
    )
    trace = canonicalize_trace(parse_trace(trace_path), config.min_score)
    window_len, window_threshold = config.window_params(trace.fps)
    clip_sets = {}
    for side in HandSide:
        states = run_fsm(
            score_series(trace, side),
            window_len,
            window_threshold,
            strict=config.strict_window,
        )
        clips = filter_short_clips(extract_clips(states, trace), config.min_duration_s)
        if provider is not None:
            clips = reconnect_clips(
                clips,
                provider,
                sim_threshold,
                boundary_fraction=config.boundary_fraction,
                polarity=config.similarity_polarity,
                max_gap_s=config.reconnect_max_gap_s,
            )
        clip_sets[side] = clips
    return trace, clip_sets[HandSide.LEFT], clip_sets[HandSide.RIGHT], sim_threshold


def _manifest(command, config, trace, inputs, outputs, resolved=None) -> dict:
    return {
        "tool": "hoiseg",
        "version": __version__,
        "command": command,
        "video_id": trace.video_id,
        "fps": trace.fps,
        "frame_count": trace.frame_count,
        "config": config.to_dict(),
        "config_hash": config.config_hash(),
        "resolved": resolved or {},
        "inputs": inputs,
        "outputs": outputs,
    }


def cmd_segment(args) -> int:
    config = _build_config(args)
    out_dir = Path(args.out_dir)
    trace, left, right, sim_threshold = _segment_trace(args.trace, config)
    out_dir.mkdir(parents=True, exist_ok=True)
    chash = config.config_hash()
    write_clipset(left, out_dir / "left_clips.json", chash)
    write_clipset(right, out_dir / "right_clips.json", chash)
    _write_json(
        _manifest(
            "segment", config, trace,
            inputs={"trace": str(args.trace)},
            outputs=["left_clips.json", "right_clips.json"],
            resolved={"sim_threshold": sim_threshold},
        ),
        out_dir / "manifest.json",
    )
    print(
        f"{trace.video_id}: {len(left)} left / {len(right)} right clips "
        f"-> {out_dir}"
    )
    return 0


def cmd_fuse(args) -> int:
    config = _build_config(args)
    left = read_clipset(args.left_clips)
    right = read_clipset(args.right_clips)
    trace = canonicalize_trace(parse_trace(args.trace), config.min_score)
    fused = fuse_streams(
        left,
        right,
        trace,
        iosa_threshold=config.iosa_threshold,
        attention_fallback=HandSide(config.attention_fallback),
    )
    write_segmentation(fused, args.out)
    print(f"{trace.video_id}: {len(fused)} steps -> {args.out}")
    return 0


def cmd_eval(args) -> int:
    if args.mode == "steps":
        predicted = read_segmentation(args.predicted)
        truth = read_segmentation(args.truth)
        scores = f1_report(predicted, truth)
        print(format_f1_table(scores))
        payload = f1_scores_to_dict(scores)
        payload["video_id"] = predicted.video_id
    else:
        predicted = parse_trace(args.predicted)
        truth = parse_trace(args.truth)
        rows = detection_eval(predicted, truth, iou_match=args.iou_match)
        print(format_detection_table(rows))
        payload = detection_rows_to_dict(rows, args.iou_match)
        payload["video_id"] = predicted.video_id
    if args.out:
        _write_json(payload, Path(args.out))
    return 0


def cmd_roc(args) -> int:
    provider = provider_from_spec(args.provider)
    if provider is None:
        raise ConfigError("roc needs a real similarity provider, not 'none'")
    pairs = read_labeled_pairs(args.pairs)
    if len(pairs) < 2:
        raise ValueError("need at least two labeled pairs for a ROC curve")
    grid = [i / (args.grid - 1) for i in range(args.grid)]
    curve = roc_curve(provider, pairs, thresholds=grid)
    threshold = select_threshold_roc(curve)
    auc = roc_auc(curve)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "curve.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("threshold,tpr,fpr\n")
        for p in curve:
            fh.write(f"{p.threshold!r},{p.tpr!r},{p.fpr!r}\n")
    chosen = max(curve, key=lambda p: (p.tpr - p.fpr, p.threshold))
    _write_json(
        {
            "threshold": threshold,
            "youden_j": chosen.tpr - chosen.fpr,
            "auc": auc,
            "positives": sum(1 for p in pairs if p.same),
            "negatives": sum(1 for p in pairs if not p.same),
        },
        out_dir / "selection.json",
    )
    (out_dir / "roc.svg").write_text(roc_svg(curve, threshold), encoding="utf-8")
    print(f"selected threshold {threshold!r} (AUC {auc:.3f}) -> {out_dir}")
    return 0


def cmd_render(args) -> int:
    segmentations = [read_segmentation(p) for p in args.segmentations]
    names = [Path(p).stem for p in args.segmentations]
    if args.ascii:
        print(timeline_ascii(segmentations, names), end="")
        return 0
    if not args.out:
        raise ConfigError("render needs --out FILE (or --ascii)")
    Path(args.out).write_text(timeline_svg(segmentations, names), encoding="utf-8")
    print(f"timeline -> {args.out}")
    return 0


def cmd_pipeline(args) -> int:
    config = _build_config(args)
    out_dir = Path(args.out_dir)
    trace, left, right, sim_threshold = _segment_trace(args.trace, config)
    fused = fuse_streams(
        left,
        right,
        trace,
        iosa_threshold=config.iosa_threshold,
        attention_fallback=HandSide(config.attention_fallback),
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    chash = config.config_hash()
    write_clipset(left, out_dir / "left_clips.json", chash)
    write_clipset(right, out_dir / "right_clips.json", chash)
    write_segmentation(fused, out_dir / "steps.json")
    (out_dir / "timeline.svg").write_text(
        timeline_svg([fused], [trace.video_id]), encoding="utf-8"
    )
    _write_json(
        _manifest(
            "pipeline", config, trace,
            inputs={"trace": str(args.trace)},
            outputs=[
                "left_clips.json", "right_clips.json", "steps.json", "timeline.svg",
            ],
            resolved={"sim_threshold": sim_threshold},
        ),
        out_dir / "manifest.json",
    )
    print(f"{trace.video_id}: {len(fused)} steps -> {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hoiseg",
        description="Decompose egocentric hand-object-interaction detection "
        "traces into task steps.",
    )
    parser.add_argument("--version", action="version", version=f"hoiseg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="trace -> per-hand clip sets")
    p.add_argument("trace", help="detection trace (JSONL)")
    p.add_argument("--out-dir", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("fuse", help="per-hand clip sets -> step segmentation")
    p.add_argument("left_clips")
    p.add_argument("right_clips")
    p.add_argument("trace")
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("eval", help="score predictions against a reference")
    p.add_argument("predicted")
    p.add_argument("truth")
    p.add_argument("--mode", choices=("steps", "detections"), default="steps")
    p.add_argument("--iou-match", type=float, default=0.5, dest="iou_match")
    p.add_argument("--out", help="also write the report as JSON")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("roc", help="calibrate the similarity threshold")
    p.add_argument("pairs", help="labeled pairs CSV (crop_a,crop_b,same)")
    p.add_argument("--provider", required=True)
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_roc)

    p = sub.add_parser("render", help="draw step timelines")
    p.add_argument("segmentations", nargs="+")
    p.add_argument("--out")
    p.add_argument("--ascii", action="store_true")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("pipeline", help="segment + fuse + render in one pass")
    p.add_argument("trace")
    p.add_argument("--out-dir", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (TraceParseError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - internal invariant breakage
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
