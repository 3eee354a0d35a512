"""Detection-trace data model: per-frame classified bounding boxes for one
egocentric video, plus parsing, canonicalization and box geometry.

The wire format is JSON Lines: a header line carrying video metadata
followed by one record per frame that has detections. Frames absent from
the stream mean "no detections that frame".
"""

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path


class HandSide(Enum):
    LEFT = "left"
    RIGHT = "right"


class DetectionClass(Enum):
    NORMAL_OBJECT = "normal_object"
    ACTIVE_OBJECT = "active_object"
    IDLE_LEFT_HAND = "idle_left_hand"
    IDLE_RIGHT_HAND = "idle_right_hand"
    ACTIVE_LEFT_HAND = "active_left_hand"
    ACTIVE_RIGHT_HAND = "active_right_hand"


_HAND_SIDE = {
    DetectionClass.IDLE_LEFT_HAND: HandSide.LEFT,
    DetectionClass.ACTIVE_LEFT_HAND: HandSide.LEFT,
    DetectionClass.IDLE_RIGHT_HAND: HandSide.RIGHT,
    DetectionClass.ACTIVE_RIGHT_HAND: HandSide.RIGHT,
}

_ACTIVE_HAND = {
    HandSide.LEFT: DetectionClass.ACTIVE_LEFT_HAND,
    HandSide.RIGHT: DetectionClass.ACTIVE_RIGHT_HAND,
}


def hand_side(label: DetectionClass):
    """Side of a hand class, None for object classes."""
    return _HAND_SIDE.get(label)


def active_hand_class(side: HandSide) -> DetectionClass:
    return _ACTIVE_HAND[side]


class TraceParseError(ValueError):
    """Malformed trace stream; carries the 1-based source line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box in image coordinates (y grows downward)."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        coords = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(c) for c in coords):
            raise ValueError(f"box coordinates must be finite: {coords}")
        if min(coords) < 0:
            raise ValueError(f"box coordinates must be >= 0: {coords}")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"box must have positive area: {coords}")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    @property
    def center_y(self) -> float:
        return (self.y_min + self.y_max) / 2.0

    def as_tuple(self):
        return (self.x_min, self.y_min, self.x_max, self.y_max)


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two boxes; 0.0 when disjoint."""
    iw = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    if iw <= 0:
        return 0.0
    ih = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


@dataclass(frozen=True)
class Detection:
    box: Box
    label: DetectionClass
    score: float
    crop_ref: str | None = None

    def __post_init__(self):
        if not (0.0 <= self.score <= 1.0):
            raise ValueError(f"score must be in [0, 1], got {self.score}")
        if self.label is DetectionClass.ACTIVE_OBJECT and not self.crop_ref:
            raise ValueError("active_object detections require a crop_ref")


@dataclass(frozen=True)
class FrameDetections:
    frame_index: int
    detections: tuple = ()

    def __post_init__(self):
        if self.frame_index < 0:
            raise ValueError(f"frame_index must be >= 0, got {self.frame_index}")
        object.__setattr__(self, "detections", tuple(self.detections))

    def of_class(self, label: DetectionClass):
        return [d for d in self.detections if d.label is label]

    def hand(self, side: HandSide):
        """The single hand detection for a side, or None. Assumes the frame
        is canonicalized (at most one hand per side)."""
        for d in self.detections:
            if hand_side(d.label) is side:
                return d
        return None


@dataclass(frozen=True)
class VideoTrace:
    video_id: str
    fps: float
    frame_count: int
    frames: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError(f"fps must be > 0, got {self.fps}")
        if self.frame_count < 0:
            raise ValueError(f"frame_count must be >= 0, got {self.frame_count}")
        ordered = tuple(sorted(self.frames, key=lambda f: f.frame_index))
        seen = set()
        for f in ordered:
            if f.frame_index in seen:
                raise ValueError(f"duplicate frame_index {f.frame_index}")
            if f.frame_index >= self.frame_count:
                raise ValueError(
                    f"frame_index {f.frame_index} outside frame_count {self.frame_count}"
                )
            seen.add(f.frame_index)
        object.__setattr__(self, "frames", ordered)

    def frame_lookup(self):
        return {f.frame_index: f for f in self.frames}


# ---------------------------------------------------------------------------
# JSONL wire format
# ---------------------------------------------------------------------------

def _parse_detection(obj, line):
    try:
        label = DetectionClass(obj["class"])
    except (KeyError, ValueError):
        raise TraceParseError(f"unknown detection class {obj.get('class')!r}", line)
    box = obj.get("box")
    if not isinstance(box, (list, tuple)) or len(box) != 4:
        raise TraceParseError(f"box must be a 4-element array, got {box!r}", line)
    try:
        return Detection(
            box=Box(*[float(v) for v in box]),
            label=label,
            score=float(obj.get("score", 0.0)),
            crop_ref=obj.get("crop_ref"),
        )
    except (TypeError, ValueError) as exc:
        raise TraceParseError(str(exc), line)


def _iter_lines(source):
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            yield from fh
        return
    for raw in source:
        yield raw.decode("utf-8") if isinstance(raw, bytes) else raw


def parse_trace(source) -> VideoTrace:
    """Parse a JSONL trace from a path, text/binary file object, or iterable
    of lines. Raises TraceParseError with the offending line number."""
    lines = _iter_lines(source)
    try:
        header_raw = next(lines)
    except StopIteration:
        raise TraceParseError("empty stream: missing header line", 1)
    try:
        header = json.loads(header_raw)
    except json.JSONDecodeError as exc:
        raise TraceParseError(f"invalid header JSON: {exc}", 1)
    for key in ("video_id", "fps", "frame_count"):
        if key not in header:
            raise TraceParseError(f"header missing {key!r}", 1)

    frames = []
    seen = set()
    for lineno, raw in enumerate(lines, start=2):
        if not raw.strip():
            continue
        try:
            rec = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise TraceParseError(f"invalid JSON: {exc}", lineno)
        if "frame" not in rec:
            raise TraceParseError("record missing 'frame'", lineno)
        idx = rec["frame"]
        if not isinstance(idx, int) or idx < 0:
            raise TraceParseError(f"frame must be a non-negative integer, got {idx!r}", lineno)
        if idx in seen:
            raise TraceParseError(f"duplicate frame_index {idx}", lineno)
        seen.add(idx)
        dets = [_parse_detection(d, lineno) for d in rec.get("detections", [])]
        frames.append(FrameDetections(frame_index=idx, detections=tuple(dets)))

    try:
        return VideoTrace(
            video_id=str(header["video_id"]),
            fps=float(header["fps"]),
            frame_count=int(header["frame_count"]),
            frames=tuple(frames),
        )
    except (TypeError, ValueError) as exc:
        raise TraceParseError(str(exc), 1)


def serialize_trace(trace: VideoTrace, dest) -> None:
    """Write a trace in the JSONL wire format (inverse of parse_trace)."""

    def _dump(fh):
        header = {
            "video_id": trace.video_id,
            "fps": trace.fps,
            "frame_count": trace.frame_count,
        }
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for frame in trace.frames:
            rec = {
                "frame": frame.frame_index,
                "detections": [
                    {
                        "class": d.label.value,
                        "score": d.score,
                        "box": list(d.box.as_tuple()),
                        "crop_ref": d.crop_ref,
                    }
                    for d in frame.detections
                ],
            }
            fh.write(json.dumps(rec, sort_keys=True) + "\n")

    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            _dump(fh)
    else:
        _dump(dest)


# ---------------------------------------------------------------------------
# Canonicalization
# ---------------------------------------------------------------------------

def canonicalize_frame(frame: FrameDetections, min_score: float = 0.8) -> FrameDetections:
    """Reduce a raw frame to the canonical form scoring relies on: drop
    detections below ``min_score``, keep at most one hand per side (highest
    score; ties to the lower x_min) and at most the two best active objects.

    Normal objects only pass the score filter. Surviving detections keep
    their original relative order, which makes the operation idempotent.
    """
    survivors = [d for d in frame.detections if d.score >= min_score]

    keep = set()
    for side in HandSide:
        hands = [d for d in survivors if hand_side(d.label) is side]
        if hands:
            best = min(hands, key=lambda d: (-d.score, d.box.x_min))
            keep.add(id(best))
    objects = sorted(
        (d for d in survivors if d.label is DetectionClass.ACTIVE_OBJECT),
        key=lambda d: (-d.score, d.box.x_min),
    )
    keep.update(id(d) for d in objects[:2])

    kept = tuple(
        d
        for d in survivors
        if d.label is DetectionClass.NORMAL_OBJECT or id(d) in keep
    )
    return replace(frame, detections=kept)


def canonicalize_trace(trace: VideoTrace, min_score: float = 0.8) -> VideoTrace:
    return replace(
        trace,
        frames=tuple(canonicalize_frame(f, min_score) for f in trace.frames),
    )
