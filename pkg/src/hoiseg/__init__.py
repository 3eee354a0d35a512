"""hoiseg: task-step segmentation of egocentric video from per-frame
hand-object-interaction detection traces.

The pipeline: parse a detection trace, score each frame per hand, drive a
two-state hand status machine over sliding-window score sums, cut per-hand
clips, drop sub-half-second clips, reconnect over-segmented neighbors via
crop similarity, and fuse the two hand streams into one ordered list of task
steps. Evaluation (segmental F1 and detection TP/FP tables) and a CLI wrap
the whole thing.
"""

__version__ = "0.1.0"

from .clips import (
    Clip,
    ClipSet,
    NoCropsError,
    clip_pair_similarity,
    extract_clips,
    filter_short_clips,
    read_clipset,
    reconnect_clips,
    write_clipset,
)
from .config import ConfigError, PipelineConfig, load_config
from .fsm import (
    HandState,
    HandStateTrace,
    ScoreSeries,
    default_window_params,
    frame_score,
    run_fsm,
    score_series,
)
from .fusion import (
    AttentionVerdict,
    SourceHand,
    StepSegment,
    StepSegmentation,
    fuse_streams,
    predict_attention,
    read_segmentation,
    temporal_iosa,
    write_segmentation,
)
from .metrics import (
    DetectionEvalRow,
    SegmentalScore,
    detection_eval,
    f1_report,
    segmental_f1,
)
from .similarity import (
    ConstantProvider,
    HistogramProvider,
    LabeledPair,
    MatrixProvider,
    RocPoint,
    SimilarityProvider,
    UnknownCropRef,
    load_matrix_provider,
    provider_from_spec,
    read_labeled_pairs,
    resolve_threshold,
    roc_auc,
    roc_curve,
    select_threshold_roc,
)
from .trace import (
    Box,
    Detection,
    DetectionClass,
    FrameDetections,
    HandSide,
    TraceParseError,
    VideoTrace,
    canonicalize_frame,
    canonicalize_trace,
    iou,
    parse_trace,
    serialize_trace,
)
