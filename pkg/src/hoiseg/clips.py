"""Per-hand clip extraction from hand status traces, short-clip filtering,
and similarity-based reconnection of over-segmented adjacent clips."""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from .fsm import HandStateTrace, paired_crop
from .kernels import run_bounds
from .trace import HandSide, VideoTrace

logger = logging.getLogger(__name__)


class NoCropsError(ValueError):
    """A clip pair cannot be compared because one side has no object crops."""


@dataclass(frozen=True)
class Clip:
    """Maximal run of active frames for one hand, with the crop refs of the
    object paired with the hand on each scoring frame (in frame order)."""

    hand: HandSide
    start_frame: int
    end_frame: int
    object_crops: tuple = ()

    def __post_init__(self):
        if self.start_frame > self.end_frame:
            raise ValueError(
                f"clip start {self.start_frame} must be <= end {self.end_frame}"
            )
        object.__setattr__(self, "object_crops", tuple(self.object_crops))

    @property
    def n_frames(self) -> int:
        return self.end_frame - self.start_frame + 1

    def duration_s(self, fps: float) -> float:
        return self.n_frames / fps


@dataclass(frozen=True)
class ClipSet:
    hand: HandSide
    fps: float
    clips: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError(f"fps must be > 0, got {self.fps}")
        ordered = tuple(self.clips)
        prev = None
        for clip in ordered:
            if clip.hand is not self.hand:
                raise ValueError(f"clip hand {clip.hand} does not match set {self.hand}")
            if prev is not None and clip.start_frame <= prev.end_frame:
                raise ValueError(
                    f"clips must be sorted and non-overlapping: "
                    f"[{prev.start_frame},{prev.end_frame}] then "
                    f"[{clip.start_frame},{clip.end_frame}]"
                )
            prev = clip
        object.__setattr__(self, "clips", ordered)

    def __len__(self):
        return len(self.clips)


def extract_clips(
    states: HandStateTrace,
    trace: VideoTrace | None = None,
    fps: float | None = None,
) -> ClipSet:
    """One Clip per maximal run of active frames. When ``trace`` is given the
    per-frame paired object crops are attached and fps is taken from it."""
    if trace is not None:
        if len(states.active) != trace.frame_count:
            raise ValueError(
                f"state trace length {len(states.active)} does not match "
                f"frame_count {trace.frame_count}"
            )
        fps = trace.fps
    if fps is None:
        raise ValueError("fps required: pass a trace or an explicit fps")

    starts, ends = run_bounds(states.active)
    lookup = trace.frame_lookup() if trace is not None else {}
    clips = []
    for s, e in zip(starts.tolist(), ends.tolist()):
        crops = []
        if trace is not None:
            for t in range(s, e + 1):
                frame = lookup.get(t)
                if frame is None:
                    continue
                ref = paired_crop(frame, states.hand)
                if ref is not None:
                    crops.append(ref)
            if not crops:
                logger.warning(
                    "clip [%d, %d] (%s hand) has no paired object crops",
                    s, e, states.hand.value,
                )
        clips.append(Clip(states.hand, s, e, tuple(crops)))
    return ClipSet(hand=states.hand, fps=fps, clips=tuple(clips))


def filter_short_clips(clip_set: ClipSet, min_duration_s: float = 0.5) -> ClipSet:
    """Drop clips shorter than ``min_duration_s`` (clips of exactly that
    duration stay)."""
    if min_duration_s < 0:
        raise ValueError(f"min_duration_s must be >= 0, got {min_duration_s}")
    kept = tuple(
        c for c in clip_set.clips if c.duration_s(clip_set.fps) >= min_duration_s
    )
    return ClipSet(hand=clip_set.hand, fps=clip_set.fps, clips=kept)


def clip_pair_similarity(a: Clip, b: Clip, provider, boundary_fraction: float = 0.2) -> float:
    """Mean pairwise similarity between the trailing boundary crops of ``a``
    and the leading boundary crops of ``b``.

    Each side contributes ceil(boundary_fraction * number of crops) crops, so
    single-crop clips still participate. Raises NoCropsError when either clip
    has no crops at all.
    """
    if not (0.0 < boundary_fraction <= 1.0):
        raise ValueError(
            f"boundary_fraction must be in (0, 1], got {boundary_fraction}"
        )
    if not a.object_crops or not b.object_crops:
        raise NoCropsError(
            f"cannot compare clips [{a.start_frame},{a.end_frame}] and "
            f"[{b.start_frame},{b.end_frame}]: missing object crops"
        )
    x = math.ceil(boundary_fraction * len(a.object_crops))
    y = math.ceil(boundary_fraction * len(b.object_crops))
    tail = a.object_crops[-x:]
    head = b.object_crops[:y]
    total = 0.0
    for ca in tail:
        for cb in head:
            total += provider.query(ca, cb)
    return total / (x * y)


def reconnect_clips(
    clip_set: ClipSet,
    provider,
    sim_threshold: float,
    boundary_fraction: float = 0.2,
    polarity: str = "similarity",
    max_gap_s: float | None = None,
) -> ClipSet:
    """Merge adjacent clips whose boundary crops look like the same object,
    repairing over-segmentation.

    Adjacent pairs are visited left to right; a merge produces a clip
    spanning both (the gap between them absorbed) with the crop lists
    concatenated, and the merged clip is then compared against the next
    original clip using the merged list's tail. With the default
    ``similarity`` polarity a pair merges when its mean boundary similarity
    is >= ``sim_threshold``; ``distance`` polarity inverts the comparison for
    providers that return dissimilarity. Pairs separated by more than
    ``max_gap_s`` seconds are never merged (None disables the gap check).
    Pairs that cannot be compared (NoCropsError) stay split.
    """
    if polarity not in ("similarity", "distance"):
        raise ValueError(f"polarity must be 'similarity' or 'distance', got {polarity!r}")
    if not clip_set.clips:
        return clip_set

    merged = [clip_set.clips[0]]
    for nxt in clip_set.clips[1:]:
        cur = merged[-1]
        gap_s = (nxt.start_frame - cur.end_frame - 1) / clip_set.fps
        if max_gap_s is not None and gap_s > max_gap_s:
            merged.append(nxt)
            continue
        try:
            mean_sim = clip_pair_similarity(cur, nxt, provider, boundary_fraction)
        except NoCropsError:
            merged.append(nxt)
            continue
        same_object = (
            mean_sim >= sim_threshold if polarity == "similarity" else mean_sim < sim_threshold
        )
        if same_object:
            merged[-1] = Clip(
                hand=cur.hand,
                start_frame=cur.start_frame,
                end_frame=nxt.end_frame,
                object_crops=cur.object_crops + nxt.object_crops,
            )
        else:
            merged.append(nxt)
    return ClipSet(hand=clip_set.hand, fps=clip_set.fps, clips=tuple(merged))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def clipset_to_dict(clip_set: ClipSet, config_hash: str = "") -> dict:
    return {
        "hand": clip_set.hand.value,
        "fps": clip_set.fps,
        "config_hash": config_hash,
        "clips": [
            {
                "hand": c.hand.value,
                "start_frame": c.start_frame,
                "end_frame": c.end_frame,
                "crop_refs": list(c.object_crops),
            }
            for c in clip_set.clips
        ],
    }


def write_clipset(clip_set: ClipSet, dest, config_hash: str = "") -> None:
    payload = json.dumps(clipset_to_dict(clip_set, config_hash), indent=2, sort_keys=True)
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(payload + "\n", encoding="utf-8")
    else:
        dest.write(payload + "\n")


def read_clipset(source) -> ClipSet:
    if isinstance(source, (str, Path)):
        data = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        data = json.load(source)
    hand = HandSide(data["hand"])
    clips = tuple(
        Clip(
            hand=HandSide(c["hand"]),
            start_frame=int(c["start_frame"]),
            end_frame=int(c["end_frame"]),
            object_crops=tuple(c.get("crop_refs", [])),
        )
        for c in data["clips"]
    )
    return ClipSet(hand=hand, fps=float(data["fps"]), clips=clips)
