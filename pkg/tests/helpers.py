"""Shared builders for synthetic traces, clips and segmentations."""

import numpy as np

from hoiseg.clips import Clip, ClipSet
from hoiseg.fusion import SourceHand, StepSegment, StepSegmentation
from hoiseg.trace import (
    Box,
    Detection,
    DetectionClass,
    FrameDetections,
    HandSide,
    VideoTrace,
)

LEFT_HAND_BOX = Box(100, 70, 160, 130)     # center y = 100
LEFT_OBJ_BOX = Box(140, 90, 200, 150)      # overlaps the left hand
RIGHT_HAND_BOX = Box(300, 270, 360, 330)   # center y = 300
RIGHT_OBJ_BOX = Box(340, 290, 400, 350)    # overlaps the right hand


def hand_det(side, active=True, box=None, score=0.95):
    if box is None:
        box = LEFT_HAND_BOX if side is HandSide.LEFT else RIGHT_HAND_BOX
    if side is HandSide.LEFT:
        label = DetectionClass.ACTIVE_LEFT_HAND if active else DetectionClass.IDLE_LEFT_HAND
    else:
        label = DetectionClass.ACTIVE_RIGHT_HAND if active else DetectionClass.IDLE_RIGHT_HAND
    return Detection(box=box, label=label, score=score)


def obj_det(crop_ref, box=None, score=0.95, active=True):
    return Detection(
        box=box if box is not None else LEFT_OBJ_BOX,
        label=DetectionClass.ACTIVE_OBJECT if active else DetectionClass.NORMAL_OBJECT,
        score=score,
        crop_ref=crop_ref if active else None,
    )


def interaction_frame(t, sides, crop_prefix="crop", crop_ref_fn=None):
    """Frame with an active hand + overlapping active object per side."""
    if crop_ref_fn is None:
        crop_ref_fn = lambda side, t: f"{crop_prefix}/{side.value}/{t:05d}"
    dets = []
    for side in sides:
        if side is HandSide.LEFT:
            dets.append(hand_det(HandSide.LEFT))
            dets.append(obj_det(crop_ref_fn(side, t), LEFT_OBJ_BOX))
        else:
            dets.append(hand_det(HandSide.RIGHT))
            dets.append(obj_det(crop_ref_fn(side, t), RIGHT_OBJ_BOX))
    return FrameDetections(frame_index=t, detections=tuple(dets))


def trace_from_score_intervals(
    left_intervals=(),
    right_intervals=(),
    frame_count=None,
    fps=30.0,
    video_id="synthetic",
    crop_prefix="crop",
    crop_ref_fn=None,
):
    """Trace whose per-hand frame scores are 1 exactly on the given inclusive
    intervals."""
    left_frames = {t for s, e in left_intervals for t in range(s, e + 1)}
    right_frames = {t for s, e in right_intervals for t in range(s, e + 1)}
    if frame_count is None:
        frame_count = max(left_frames | right_frames, default=0) + 1
    frames = []
    for t in sorted(left_frames | right_frames):
        sides = []
        if t in left_frames:
            sides.append(HandSide.LEFT)
        if t in right_frames:
            sides.append(HandSide.RIGHT)
        frames.append(interaction_frame(t, sides, crop_prefix, crop_ref_fn))
    return VideoTrace(
        video_id=video_id, fps=fps, frame_count=frame_count, frames=tuple(frames)
    )


def make_clip(hand, start, end, crops=None):
    if crops is None:
        crops = tuple(f"{hand.value}/{t:05d}" for t in range(start, end + 1))
    return Clip(hand=hand, start_frame=start, end_frame=end, object_crops=crops)


def random_intervals(rng, max_count=6, span=400, min_len=1, max_len=60):
    """Sorted, non-overlapping inclusive intervals."""
    intervals = []
    cursor = int(rng.integers(0, 20))
    for _ in range(int(rng.integers(0, max_count + 1))):
        length = int(rng.integers(min_len, max_len + 1))
        start = cursor + int(rng.integers(1, 40))
        end = start + length - 1
        if end >= span:
            break
        intervals.append((start, end))
        cursor = end + 1
    return intervals


def random_clipset(rng, hand, fps=30.0, **kwargs):
    clips = tuple(
        Clip(hand=hand, start_frame=s, end_frame=e)
        for s, e in random_intervals(rng, **kwargs)
    )
    return ClipSet(hand=hand, fps=fps, clips=clips)


def random_segmentation(rng, video_id="vid", fps=30.0, max_count=10, **kwargs):
    source_cycle = [SourceHand.LEFT, SourceHand.RIGHT, SourceHand.BOTH]
    segments = tuple(
        StepSegment(s, e, source_cycle[i % 3])
        for i, (s, e) in enumerate(random_intervals(rng, max_count=max_count, **kwargs))
    )
    return StepSegmentation(video_id=video_id, fps=fps, segments=segments)


def segmentation_from_intervals(intervals, video_id="vid", fps=30.0):
    segments = tuple(
        StepSegment(s, e, SourceHand.BOTH) for s, e in intervals
    )
    return StepSegmentation(video_id=video_id, fps=fps, segments=segments)


def empty_trace(frame_count, fps=30.0, video_id="empty"):
    return VideoTrace(video_id=video_id, fps=fps, frame_count=frame_count)


def as_bool_array(bits):
    return np.array([bool(int(b)) for b in bits], dtype=bool)
