"""Per-hand interaction scoring and the two-state (active/idle) hand status
machine driven by sliding-window score sums."""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .trace import (
    Detection,
    DetectionClass,
    FrameDetections,
    HandSide,
    VideoTrace,
    active_hand_class,
    iou,
)


class HandState:
    ACTIVE = "active"
    IDLE = "idle"


@dataclass(frozen=True)
class ScoreSeries:
    """Binary per-frame interaction evidence for one hand; length equals the
    trace's frame_count, missing frames score 0."""

    hand: HandSide
    scores: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.scores, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValueError("scores must be a 1-d array")
        if arr.size and arr.max() > 1:
            raise ValueError("scores must be binary (0 or 1)")
        object.__setattr__(self, "scores", arr)


@dataclass(frozen=True)
class HandStateTrace:
    """Frame-wise hand status; ``active[t]`` is True when the hand is in the
    active state at frame t."""

    hand: HandSide
    active: np.ndarray
    window_len: int
    threshold: int

    def __post_init__(self):
        if self.threshold > self.window_len:
            raise ValueError(
                f"threshold {self.threshold} must be <= window_len {self.window_len}"
            )
        object.__setattr__(self, "active", np.ascontiguousarray(self.active, dtype=bool))

    def states(self):
        return [HandState.ACTIVE if a else HandState.IDLE for a in self.active]


def frame_score(frame: FrameDetections, hand: HandSide) -> int:
    """1 when the frame holds an active hand of the given side overlapping at
    least one active object, else 0. Expects a canonicalized frame."""
    wanted = active_hand_class(hand)
    hand_det = None
    for d in frame.detections:
        if d.label is wanted:
            hand_det = d
            break
    if hand_det is None:
        return 0
    for d in frame.detections:
        if d.label is DetectionClass.ACTIVE_OBJECT and iou(hand_det.box, d.box) > 0:
            return 1
    return 0


def paired_crop(frame: FrameDetections, hand: HandSide) -> str | None:
    """crop_ref of the active object paired with the hand this frame: the
    best-overlapping one (ties by score, then x_min). None when the frame
    scores 0 for this hand."""
    wanted = active_hand_class(hand)
    hand_det: Detection | None = None
    for d in frame.detections:
        if d.label is wanted:
            hand_det = d
            break
    if hand_det is None:
        return None
    candidates = []
    for d in frame.detections:
        if d.label is DetectionClass.ACTIVE_OBJECT:
            overlap = iou(hand_det.box, d.box)
            if overlap > 0:
                candidates.append((-overlap, -d.score, d.box.x_min, d.crop_ref))
    if not candidates:
        return None
    return min(candidates)[3]


def score_series(trace: VideoTrace, hand: HandSide) -> ScoreSeries:
    """Binary score for every frame of a (canonicalized) trace."""
    scores = np.zeros(trace.frame_count, dtype=np.uint8)
    for frame in trace.frames:
        scores[frame.frame_index] = frame_score(frame, hand)
    return ScoreSeries(hand=hand, scores=scores)


def default_window_params(fps: float) -> tuple[int, int]:
    """Window length and threshold derived from the frame rate (fps/6 and
    fps/10, rounded half-up and clamped to >= 1)."""
    if fps <= 0:
        raise ValueError(f"fps must be > 0, got {fps}")
    window_len = max(1, math.floor(fps / 6 + 0.5))
    threshold = max(1, math.floor(fps / 10 + 0.5))
    return window_len, min(threshold, window_len)


def run_fsm(
    scores: ScoreSeries,
    window_len: int,
    threshold: int,
    strict: bool = False,
) -> HandStateTrace:
    """Derive the hand status trace: frame t is active when the score sum
    over the trailing window of ``window_len`` frames reaches ``threshold``
    (>= by default; > with ``strict``). Windows truncate at the sequence
    start."""
    if len(scores.scores) == 0:
        raise ValueError("scores must be non-empty")
    if not (1 <= threshold <= window_len):
        raise ValueError(
            f"need 1 <= threshold <= window_len, got threshold={threshold} "
            f"window_len={window_len}"
        )
    sums = kernels.window_sums(scores.scores, window_len)
    active = (sums > threshold) if strict else (sums >= threshold)
    return HandStateTrace(
        hand=scores.hand, active=active, window_len=window_len, threshold=threshold
    )
