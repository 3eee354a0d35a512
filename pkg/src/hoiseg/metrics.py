"""Evaluation: segmental F1 at temporal-IOU thresholds for step
segmentations, and per-category TP/FP/TPR/precision for detection traces."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .fusion import StepSegmentation
from .trace import DetectionClass, VideoTrace, hand_side, iou

DEFAULT_F1_THRESHOLDS = (0.10, 0.30, 0.50)


@dataclass(frozen=True)
class SegmentalScore:
    k: float
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


@dataclass(frozen=True)
class DetectionEvalRow:
    category: str  # "AH" (active hands), "AO" (active objects), "HOI"
    instances: int
    tp: int
    fp: int
    tpr: float
    precision: float
    precision_defined: bool = True


def _interval_iou_matrix(pred_segments, truth_segments):
    n, m = len(pred_segments), len(truth_segments)
    out = np.zeros((n, m), dtype=np.float64)
    for i, p in enumerate(pred_segments):
        for j, t in enumerate(truth_segments):
            inter = min(p.end_frame, t.end_frame) - max(p.start_frame, t.start_frame) + 1
            if inter <= 0:
                continue
            union = p.n_frames + t.n_frames - inter
            out[i, j] = inter / union
    return out


def segmental_f1(
    predicted: StepSegmentation, truth: StepSegmentation, k: float
) -> SegmentalScore:
    """Segmental F1 at temporal-IOU threshold ``k``.

    Predicted segments are visited in temporal order; each one claims the
    still-unmatched truth segment with the highest temporal IOU and counts as
    a true positive when that IOU >= k (otherwise the prediction is a false
    positive and the truth segment stays available). Unmatched truth segments
    are false negatives. Matching ignores labels.
    """
    if predicted.video_id != truth.video_id:
        raise ValueError(
            f"video_id mismatch: {predicted.video_id!r} vs {truth.video_id!r}"
        )
    if predicted.fps != truth.fps:
        raise ValueError(f"fps mismatch: {predicted.fps} vs {truth.fps}")
    if not (0.0 < k <= 1.0):
        raise ValueError(f"k must be in (0, 1], got {k}")

    iou_matrix = _interval_iou_matrix(predicted.segments, truth.segments)
    assigned = kernels.greedy_match_ordered(iou_matrix, k)
    tp = int((assigned >= 0).sum())
    fp = len(predicted.segments) - tp
    fn = len(truth.segments) - tp
    precision = tp / (tp + fp) if (tp + fp) else 0.0
    recall = tp / (tp + fn) if (tp + fn) else 0.0
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
    return SegmentalScore(k=k, precision=precision, recall=recall, f1=f1, tp=tp, fp=fp, fn=fn)


def f1_report(
    predicted: StepSegmentation,
    truth: StepSegmentation,
    thresholds=DEFAULT_F1_THRESHOLDS,
) -> list[SegmentalScore]:
    return [segmental_f1(predicted, truth, k) for k in thresholds]


def format_f1_table(scores, name: str = "steps") -> str:
    header = "".join(f"{'F1@' + format(s.k * 100, '.0f') + '%':>10}" for s in scores)
    row = "".join(f"{format(s.f1 * 100, '.2f') + '%':>10}" for s in scores)
    width = max(len(name), 12)
    return f"{'':<{width}}{header}\n{name:<{width}}{row}"


def f1_scores_to_dict(scores) -> dict:
    return {
        "mode": "steps",
        "scores": [
            {
                "k": s.k,
                "precision": s.precision,
                "recall": s.recall,
                "f1": s.f1,
                "tp": s.tp,
                "fp": s.fp,
                "fn": s.fn,
            }
            for s in scores
        ],
    }


# ---------------------------------------------------------------------------
# Detection evaluation
# ---------------------------------------------------------------------------

def _match_boxes(pred_dets, truth_dets, iou_match):
    """Greedy one-to-one matching by descending IOU; returns {pred_idx:
    truth_idx}."""
    if not pred_dets or not truth_dets:
        return {}
    pred_boxes = np.array([d.box.as_tuple() for d in pred_dets])
    truth_boxes = np.array([d.box.as_tuple() for d in truth_dets])
    iou_matrix = kernels.box_iou_matrix(pred_boxes, truth_boxes)
    assigned = kernels.greedy_match_global(iou_matrix, iou_match)
    return {i: int(j) for i, j in enumerate(assigned) if j >= 0}


def _hoi_pairs(hands, objects):
    """(hand_idx, object_idx) pairs whose boxes overlap."""
    return [
        (hi, oi)
        for hi, h in enumerate(hands)
        for oi, o in enumerate(objects)
        if iou(h.box, o.box) > 0
    ]


def detection_eval(
    predicted: VideoTrace, truth: VideoTrace, iou_match: float = 0.5
) -> list[DetectionEvalRow]:
    """Frame-wise detection scoring for active hands (AH), active objects
    (AO) and hand-object interactions (HOI).

    Hand boxes match only within the same class (a predicted left hand never
    matches a right-hand truth); matching is greedy highest-IOU one-to-one at
    ``iou_match``. An HOI instance is an overlapping (active hand, active
    object) pair; a predicted pair is correct when both of its boxes matched
    truth boxes that also overlap each other.
    """
    if not (0.0 < iou_match <= 1.0):
        raise ValueError(f"iou_match must be in (0, 1], got {iou_match}")
    if predicted.frame_count != truth.frame_count:
        raise ValueError(
            f"frame_count mismatch: {predicted.frame_count} vs {truth.frame_count}"
        )

    pred_frames = predicted.frame_lookup()
    truth_frames = truth.frame_lookup()
    counts = {cat: {"instances": 0, "tp": 0, "fp": 0} for cat in ("AH", "AO", "HOI")}

    hand_classes = [c for c in DetectionClass if hand_side(c) is not None]
    active_hand_classes = [
        DetectionClass.ACTIVE_LEFT_HAND,
        DetectionClass.ACTIVE_RIGHT_HAND,
    ]

    for t in sorted(set(pred_frames) | set(truth_frames)):
        pf = pred_frames.get(t)
        tf = truth_frames.get(t)
        pred_dets = list(pf.detections) if pf else []
        truth_dets = list(tf.detections) if tf else []

        hand_match = {}  # pred Detection id -> truth Detection
        for cls in active_hand_classes:
            p = [d for d in pred_dets if d.label is cls]
            q = [d for d in truth_dets if d.label is cls]
            assign = _match_boxes(p, q, iou_match)
            for pi, qi in assign.items():
                hand_match[id(p[pi])] = q[qi]
            counts["AH"]["instances"] += len(q)
            counts["AH"]["tp"] += len(assign)
            counts["AH"]["fp"] += len(p) - len(assign)

        p_obj = [d for d in pred_dets if d.label is DetectionClass.ACTIVE_OBJECT]
        q_obj = [d for d in truth_dets if d.label is DetectionClass.ACTIVE_OBJECT]
        obj_assign = _match_boxes(p_obj, q_obj, iou_match)
        obj_match = {id(p_obj[pi]): q_obj[qi] for pi, qi in obj_assign.items()}
        counts["AO"]["instances"] += len(q_obj)
        counts["AO"]["tp"] += len(obj_assign)
        counts["AO"]["fp"] += len(p_obj) - len(obj_assign)

        p_hands = [d for d in pred_dets if d.label in active_hand_classes]
        q_hands = [d for d in truth_dets if d.label in active_hand_classes]
        truth_pairs = {
            (id(q_hands[hi]), id(q_obj[oi])) for hi, oi in _hoi_pairs(q_hands, q_obj)
        }
        counts["HOI"]["instances"] += len(truth_pairs)
        claimed = set()
        for hi, oi in _hoi_pairs(p_hands, p_obj):
            th = hand_match.get(id(p_hands[hi]))
            to = obj_match.get(id(p_obj[oi]))
            key = (id(th), id(to)) if th is not None and to is not None else None
            if key is not None and key in truth_pairs and key not in claimed:
                counts["HOI"]["tp"] += 1
                claimed.add(key)
            else:
                counts["HOI"]["fp"] += 1

    rows = []
    for cat in ("AH", "AO", "HOI"):
        c = counts[cat]
        predicted_n = c["tp"] + c["fp"]
        rows.append(
            DetectionEvalRow(
                category=cat,
                instances=c["instances"],
                tp=c["tp"],
                fp=c["fp"],
                tpr=c["tp"] / c["instances"] if c["instances"] else 0.0,
                precision=c["tp"] / predicted_n if predicted_n else 0.0,
                precision_defined=predicted_n > 0,
            )
        )
    return rows


def format_detection_table(rows) -> str:
    cols = [f"{r.instances} {r.category}" for r in rows]
    widths = [max(len(c), 9) for c in cols]
    lines = ["".join([f"{'':<10}"] + [f"{c:>{w + 2}}" for c, w in zip(cols, widths)])]
    for field_name, fmt in (
        ("tp", "d"),
        ("fp", "d"),
        ("tpr", ".2%"),
        ("precision", ".2%"),
    ):
        label = {"tp": "TP", "fp": "FP", "tpr": "TPR", "precision": "Precision"}[field_name]
        cells = []
        for r, w in zip(rows, widths):
            value = format(getattr(r, field_name), fmt)
            if field_name == "precision" and not r.precision_defined:
                value += "*"
            cells.append(f"{value:>{w + 2}}")
        lines.append("".join([f"{label:<10}"] + cells))
    if any(not r.precision_defined for r in rows):
        lines.append("* undefined (no predictions), reported as 0")
    return "\n".join(lines)


def detection_rows_to_dict(rows, iou_match: float) -> dict:
    return {
        "mode": "detections",
        "iou_match": iou_match,
        "rows": [
            {
                "category": r.category,
                "instances": r.instances,
                "tp": r.tp,
                "fp": r.fp,
                "tpr": r.tpr,
                "precision": r.precision,
                "precision_defined": r.precision_defined,
            }
            for r in rows
        ],
    }
