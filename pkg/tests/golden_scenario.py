"""Scripted six-step two-hand activity used by the end-to-end tests.

The script encodes, via per-frame detections at 30 fps:

  step 1  left-only interaction
  step 2  right-only interaction
  step 3  right-hand interaction deliberately split by a 14-frame score
          dropout; the two clips are reconnected by crop similarity
  step 4  both hands on overlapping intervals (IOSA 1.0 >= 0.5); the left
          hand sits higher in the image, so its longer clip wins the merge
  step 5  left-only interaction
  step 6  right-only interaction

With window parameters derived from 30 fps (window 5, threshold 3) a solid
score run [a, b] turns into an active-state run [a+2, b+2], which is how the
expected step boundaries below were derived.
"""

from helpers import trace_from_score_intervals

FPS = 30.0
FRAME_COUNT = 1020

LEFT_SCORE_INTERVALS = [(28, 147), (568, 700), (763, 853)]
RIGHT_SCORE_INTERVALS = [(208, 327), (388, 448), (463, 507), (598, 670), (898, 988)]

# (start, end, source_hand) after the full segment + fuse pipeline
EXPECTED_STEPS = [
    (30, 149, "left"),
    (210, 329, "right"),
    (390, 509, "right"),   # reconnected from [390,450] + [465,509]
    (570, 702, "both"),    # IOSA merge, left (higher) hand principal
    (765, 855, "left"),
    (900, 990, "right"),
]

# constant-similarity provider repairs the step-3 split; the 1 s gap cap
# keeps far-apart same-hand clips (separate steps) from merging too
GOLDEN_CONFIG = {
    "similarity_provider": "constant:0.9",
    "sim_threshold": 0.5,
    "reconnect_max_gap_s": 1.0,
}


def build_golden_trace():
    return trace_from_score_intervals(
        left_intervals=LEFT_SCORE_INTERVALS,
        right_intervals=RIGHT_SCORE_INTERVALS,
        frame_count=FRAME_COUNT,
        fps=FPS,
        video_id="golden-6step",
    )
