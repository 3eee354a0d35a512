"""Fusion of the left- and right-hand clip streams into one ordered step
segmentation, using temporal IOSA (intersection over the smaller area) and a
positional hand-attention rule."""

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .clips import Clip, ClipSet
from .trace import HandSide, VideoTrace, hand_side


class SourceHand(Enum):
    LEFT = "left"
    RIGHT = "right"
    BOTH = "both"


_SOURCE_OF = {HandSide.LEFT: SourceHand.LEFT, HandSide.RIGHT: SourceHand.RIGHT}


@dataclass(frozen=True)
class StepSegment:
    start_frame: int
    end_frame: int
    source_hand: SourceHand
    label: str | None = None

    def __post_init__(self):
        if self.start_frame > self.end_frame:
            raise ValueError(
                f"segment start {self.start_frame} must be <= end {self.end_frame}"
            )

    @property
    def n_frames(self) -> int:
        return self.end_frame - self.start_frame + 1


@dataclass(frozen=True)
class StepSegmentation:
    video_id: str
    fps: float
    segments: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError(f"fps must be > 0, got {self.fps}")
        prev = None
        for seg in self.segments:
            if prev is not None and seg.start_frame <= prev.end_frame:
                raise ValueError(
                    f"segments must be sorted and non-overlapping: "
                    f"[{prev.start_frame},{prev.end_frame}] then "
                    f"[{seg.start_frame},{seg.end_frame}]"
                )
            prev = seg
        object.__setattr__(self, "segments", tuple(self.segments))

    def __len__(self):
        return len(self.segments)


@dataclass(frozen=True)
class AttentionVerdict:
    principal: HandSide
    confidence: float


def temporal_iosa(a, b) -> float:
    """Overlap of two inclusive frame intervals divided by the shorter
    interval's length; 0.0 when disjoint."""
    a_start, a_end = a
    b_start, b_end = b
    if a_start > a_end or b_start > b_end:
        raise ValueError(f"invalid interval: {a} vs {b}")
    inter = min(a_end, b_end) - max(a_start, b_start) + 1
    if inter <= 0:
        return 0.0
    smaller = min(a_end - a_start, b_end - b_start) + 1
    return inter / smaller


def predict_attention(
    trace: VideoTrace,
    a: Clip,
    b: Clip,
    fallback: HandSide = HandSide.RIGHT,
) -> AttentionVerdict:
    """Pick the principal hand of two temporally overlapping clips of
    different hands.

    Over the overlap frames where both hand boxes are detected, the hand
    sitting spatially higher in the image (smaller center y; y grows
    downward) on the majority of frames is principal, with the majority
    fraction as confidence. Frames where the centers tie count for neither.
    When the vote ties, or no overlap frame has both hands, ``fallback``
    wins (confidence 0.5 on a tie, 0.0 with no evidence).
    """
    if a.hand is b.hand:
        raise ValueError("attention needs clips from different hands")
    ov_start = max(a.start_frame, b.start_frame)
    ov_end = min(a.end_frame, b.end_frame)
    if ov_start > ov_end:
        raise ValueError("attention needs temporally overlapping clips")

    lookup = trace.frame_lookup()
    wins = {a.hand: 0, b.hand: 0}
    for t in range(ov_start, ov_end + 1):
        frame = lookup.get(t)
        if frame is None:
            continue
        box_a = box_b = None
        for det in frame.detections:
            side = hand_side(det.label)
            if side is a.hand:
                box_a = det.box
            elif side is b.hand:
                box_b = det.box
        if box_a is None or box_b is None:
            continue
        if box_a.center_y < box_b.center_y:
            wins[a.hand] += 1
        elif box_b.center_y < box_a.center_y:
            wins[b.hand] += 1

    total = wins[a.hand] + wins[b.hand]
    if wins[a.hand] != wins[b.hand]:
        principal = a.hand if wins[a.hand] > wins[b.hand] else b.hand
        return AttentionVerdict(principal, wins[principal] / total)
    return AttentionVerdict(fallback, 0.5 if total else 0.0)


def fuse_streams(
    left: ClipSet,
    right: ClipSet,
    trace: VideoTrace,
    iosa_threshold: float = 0.5,
    attention_fallback: HandSide = HandSide.RIGHT,
) -> StepSegmentation:
    """Merge the two per-hand clip streams into one step segmentation.

    Cross-hand clip pairs that overlap in time are visited highest-IOSA
    first (ties by earlier overlap start). A pair whose IOSA reaches
    ``iosa_threshold`` collapses into a single step spanning the principal
    hand's clip (source ``both``); the secondary clip is absorbed. Clips left
    over pass through as single-hand steps, and any residual overlap between
    surviving intervals is resolved by splitting at the overlap midpoint, so
    the output is always sorted and non-overlapping and never covers a frame
    no input clip covered.
    """
    if left.hand is not HandSide.LEFT or right.hand is not HandSide.RIGHT:
        raise ValueError("fuse_streams expects a left ClipSet then a right ClipSet")
    if left.fps != right.fps or left.fps != trace.fps:
        raise ValueError(
            f"fps mismatch: left {left.fps}, right {right.fps}, trace {trace.fps}"
        )

    pairs = []
    for i, lc in enumerate(left.clips):
        for j, rc in enumerate(right.clips):
            iosa = temporal_iosa(
                (lc.start_frame, lc.end_frame), (rc.start_frame, rc.end_frame)
            )
            if iosa > 0.0:
                ov_start = max(lc.start_frame, rc.start_frame)
                pairs.append((-iosa, ov_start, i, j))
    pairs.sort()

    consumed_left = set()
    consumed_right = set()
    fused = []
    for neg_iosa, _, i, j in pairs:
        if i in consumed_left or j in consumed_right:
            continue
        if -neg_iosa < iosa_threshold:
            continue
        lc, rc = left.clips[i], right.clips[j]
        verdict = predict_attention(trace, lc, rc, fallback=attention_fallback)
        principal = lc if verdict.principal is HandSide.LEFT else rc
        fused.append(
            StepSegment(principal.start_frame, principal.end_frame, SourceHand.BOTH)
        )
        consumed_left.add(i)
        consumed_right.add(j)

    for i, lc in enumerate(left.clips):
        if i not in consumed_left:
            fused.append(StepSegment(lc.start_frame, lc.end_frame, SourceHand.LEFT))
    for j, rc in enumerate(right.clips):
        if j not in consumed_right:
            fused.append(StepSegment(rc.start_frame, rc.end_frame, SourceHand.RIGHT))

    fused.sort(key=lambda s: (s.start_frame, s.end_frame, s.source_hand.value))

    resolved: list[StepSegment] = []
    for seg in fused:
        while resolved and seg.start_frame <= resolved[-1].end_frame:
            prev = resolved.pop()
            ov_start = seg.start_frame
            ov_end = min(prev.end_frame, seg.end_frame)
            mid = ov_start + (ov_end - ov_start + 1) // 2
            if mid - 1 >= prev.start_frame:
                resolved.append(
                    StepSegment(prev.start_frame, mid - 1, prev.source_hand, prev.label)
                )
            seg = StepSegment(mid, seg.end_frame, seg.source_hand, seg.label)
        resolved.append(seg)

    try:
        return StepSegmentation(
            video_id=trace.video_id, fps=trace.fps, segments=tuple(resolved)
        )
    except ValueError as exc:  # would be a bug in the resolution sweep above
        raise RuntimeError(f"fusion produced an invalid segmentation: {exc}")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def segmentation_to_dict(seg: StepSegmentation) -> dict:
    return {
        "video_id": seg.video_id,
        "fps": seg.fps,
        "segments": [
            {
                "start_frame": s.start_frame,
                "end_frame": s.end_frame,
                "source_hand": s.source_hand.value,
                "label": s.label,
            }
            for s in seg.segments
        ],
    }


def write_segmentation(seg: StepSegmentation, dest) -> None:
    payload = json.dumps(segmentation_to_dict(seg), indent=2, sort_keys=True)
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(payload + "\n", encoding="utf-8")
    else:
        dest.write(payload + "\n")


def read_segmentation(source) -> StepSegmentation:
    if isinstance(source, (str, Path)):
        data = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        data = json.load(source)
    segments = tuple(
        StepSegment(
            start_frame=int(s["start_frame"]),
            end_frame=int(s["end_frame"]),
            source_hand=SourceHand(s["source_hand"]),
            label=s.get("label"),
        )
        for s in data["segments"]
    )
    return StepSegmentation(
        video_id=str(data["video_id"]), fps=float(data["fps"]), segments=segments
    )
