"""Deterministic SVG and ASCII rendering of step timelines and ROC curves.

No timestamps, no randomness, pinned float formatting: the same inputs
always produce byte-identical output.
"""

import logging

logger = logging.getLogger(__name__)

SEGMENT_FILL = {"left": "#3b7dd8", "right": "#d9822b", "both": "#7b5ea7"}

_ASCII_GLYPH = {"left": "L", "right": "R", "both": "#"}


def _fmt(value: float) -> str:
    return format(value, ".2f")


def _nice_tick_step(span_frames: int, target_ticks: int = 8) -> int:
    raw = max(1, span_frames // target_ticks)
    magnitude = 1
    while magnitude * 10 <= raw:
        magnitude *= 10
    for mult in (1, 2, 5, 10):
        if magnitude * mult >= raw:
            return magnitude * mult
    return magnitude * 10


def _total_frames(segmentations) -> int:
    totals = [
        max((s.end_frame + 1 for s in seg.segments), default=1)
        for seg in segmentations
    ]
    if len(set(totals)) > 1:
        logger.warning("timeline inputs differ in duration: %s", totals)
    return max(totals)


def timeline_svg(segmentations, names=None, width=960, row_height=28) -> str:
    """Stacked timeline: one horizontal track per segmentation, colored by
    source hand, with a frame/second axis underneath."""
    if not segmentations:
        raise ValueError("nothing to render")
    if names is None:
        names = [f"track {i + 1}" for i in range(len(segmentations))]
    total = _total_frames(segmentations)
    fps = segmentations[0].fps
    label_w = 110
    plot_w = width - label_w - 10
    axis_h = 34
    height = row_height * len(segmentations) + axis_h + 10

    def x_of(frame: float) -> float:
        return label_w + plot_w * frame / total

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" font-family="monospace" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for row, (seg, name) in enumerate(zip(segmentations, names)):
        y = 5 + row * row_height
        parts.append(
            f'<text x="4" y="{y + row_height / 2 + 4:.1f}">{name}</text>'
        )
        parts.append(
            f'<rect x="{label_w}" y="{y}" width="{plot_w}" '
            f'height="{row_height - 6}" fill="#f2f2f2"/>'
        )
        for s in seg.segments:
            x0 = x_of(s.start_frame)
            x1 = x_of(s.end_frame + 1)
            fill = SEGMENT_FILL[s.source_hand.value]
            title = f"[{s.start_frame},{s.end_frame}] {s.source_hand.value}"
            if s.label:
                title += f" {s.label}"
            parts.append(
                f'<rect x="{_fmt(x0)}" y="{y}" width="{_fmt(x1 - x0)}" '
                f'height="{row_height - 6}" fill="{fill}">'
                f"<title>{title}</title></rect>"
            )
    axis_y = 5 + len(segmentations) * row_height + 4
    parts.append(
        f'<line x1="{label_w}" y1="{axis_y}" x2="{label_w + plot_w}" '
        f'y2="{axis_y}" stroke="#333333"/>'
    )
    step = _nice_tick_step(total)
    tick = 0
    while tick <= total:
        x = x_of(tick)
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{axis_y}" x2="{_fmt(x)}" '
            f'y2="{axis_y + 4}" stroke="#333333"/>'
        )
        parts.append(
            f'<text x="{_fmt(x)}" y="{axis_y + 15}" text-anchor="middle">{tick}</text>'
        )
        parts.append(
            f'<text x="{_fmt(x)}" y="{axis_y + 27}" text-anchor="middle">'
            f"{_fmt(tick / fps)}s</text>"
        )
        tick += step
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def timeline_ascii(segmentations, names=None, width=80) -> str:
    """Plain-text fallback for the stacked timeline."""
    if not segmentations:
        raise ValueError("nothing to render")
    if names is None:
        names = [f"track {i + 1}" for i in range(len(segmentations))]
    total = _total_frames(segmentations)
    name_w = max(len(n) for n in names) + 2
    lines = []
    for seg, name in zip(segmentations, names):
        cells = ["."] * width
        for s in seg.segments:
            c0 = int(s.start_frame * width / total)
            c1 = int((s.end_frame + 1) * width / total)
            c1 = max(c1, c0 + 1)
            glyph = _ASCII_GLYPH[s.source_hand.value]
            for c in range(c0, min(c1, width)):
                cells[c] = glyph
        lines.append(f"{name:<{name_w}}|{''.join(cells)}|")
    lines.append(f"{'':<{name_w}} 0{'':>{width - len(str(total)) - 1}}{total}")
    return "\n".join(lines) + "\n"


def roc_svg(curve, chosen_threshold=None, size=420) -> str:
    """ROC curve as an SVG line plot with the chosen operating point marked."""
    if not curve:
        raise ValueError("empty ROC curve")
    margin = 40
    plot = size - 2 * margin

    def px(fpr):
        return margin + plot * fpr

    def py(tpr):
        return margin + plot * (1.0 - tpr)

    pts = sorted({(p.fpr, p.tpr) for p in curve} | {(0.0, 0.0), (1.0, 1.0)})
    path = " ".join(f"{_fmt(px(f))},{_fmt(py(t))}" for f, t in pts)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'font-family="monospace" font-size="11">',
        f'<rect width="{size}" height="{size}" fill="#ffffff"/>',
        f'<rect x="{margin}" y="{margin}" width="{plot}" height="{plot}" '
        f'fill="none" stroke="#333333"/>',
        f'<line x1="{_fmt(px(0))}" y1="{_fmt(py(0))}" x2="{_fmt(px(1))}" '
        f'y2="{_fmt(py(1))}" stroke="#bbbbbb" stroke-dasharray="4 3"/>',
        f'<polyline points="{path}" fill="none" stroke="#3b7dd8" stroke-width="1.5"/>',
        f'<text x="{margin + plot / 2:.1f}" y="{size - 8}" text-anchor="middle">'
        "false positive rate</text>",
        f'<text x="12" y="{margin + plot / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 12 {margin + plot / 2:.1f})">true positive rate</text>',
    ]
    if chosen_threshold is not None:
        match = [p for p in curve if p.threshold == chosen_threshold]
        if match:
            p = match[0]
            parts.append(
                f'<circle cx="{_fmt(px(p.fpr))}" cy="{_fmt(py(p.tpr))}" r="4" '
                f'fill="#d9822b"/>'
            )
            parts.append(
                f'<text x="{_fmt(px(p.fpr) + 8)}" y="{_fmt(py(p.tpr) - 6)}">'
                f"threshold={_fmt(chosen_threshold)}</text>"
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
