"""Pluggable pairwise crop-similarity providers and ROC-based threshold
calibration.

A provider answers ``query(crop_ref_a, crop_ref_b) -> similarity in [0, 1]``
and must be symmetric with unit self-similarity. Two concrete sources ship
here: a precomputed dense matrix (the vehicle for similarities exported from
any external model) and a self-contained color-histogram baseline over a
directory of crop images.
"""

import csv
import json
import threading
from abc import ABC, abstractmethod
from pathlib import Path
from typing import NamedTuple

import numpy as np


class UnknownCropRef(KeyError):
    pass


class SimilarityProvider(ABC):
    @abstractmethod
    def query(self, crop_a: str, crop_b: str) -> float:
        """Similarity in [0, 1]; symmetric; 1.0 for identical crops."""


class ConstantProvider(SimilarityProvider):
    """Returns the same similarity for every pair (1.0 on identical refs)."""

    def __init__(self, value: float):
        if not (0.0 <= value <= 1.0):
            raise ValueError(f"similarity must be in [0, 1], got {value}")
        self.value = value

    def query(self, crop_a, crop_b):
        return 1.0 if crop_a == crop_b else self.value


class MatrixProvider(SimilarityProvider):
    """Lookup provider over a dense symmetric similarity matrix.

    The input matrix must be symmetric within 1e-6 with a unit diagonal
    within 1e-6; it is symmetrized and its diagonal pinned to exactly 1.0 so
    the provider invariants hold exactly.
    """

    def __init__(self, crop_refs, matrix):
        refs = list(crop_refs)
        m = np.asarray(matrix, dtype=np.float64)
        n = len(refs)
        if len(set(refs)) != n:
            raise ValueError("crop_refs must be unique")
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} does not match {n} crop_refs")
        if m.size:
            if np.abs(m - m.T).max() > 1e-6:
                raise ValueError("matrix must be symmetric within 1e-6")
            if np.abs(np.diagonal(m) - 1.0).max() > 1e-6:
                raise ValueError("matrix diagonal must be 1.0 within 1e-6")
            if m.min() < 0.0 or m.max() > 1.0 + 1e-9:
                raise ValueError("similarities must lie in [0, 1]")
        m = (m + m.T) / 2.0
        np.fill_diagonal(m, 1.0)
        self._index = {ref: i for i, ref in enumerate(refs)}
        self._matrix = m

    def query(self, crop_a, crop_b):
        try:
            i = self._index[crop_a]
            j = self._index[crop_b]
        except KeyError as exc:
            raise UnknownCropRef(str(exc))
        return float(self._matrix[i, j])


def load_matrix_provider(source) -> MatrixProvider:
    """Read a {"crop_refs": [...], "matrix": [[...]]} JSON file."""
    if isinstance(source, (str, Path)):
        data = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        data = json.load(source)
    return MatrixProvider(data["crop_refs"], data["matrix"])


class HistogramProvider(SimilarityProvider):
    """Joint RGB color-histogram intersection over crop images.

    Each crop is summarized by a bins^3 joint histogram normalized to sum 1;
    similarity is the histogram intersection (sum of bin-wise minima), which
    is 1.0 for identical pixel multisets and 0.0 for crops occupying disjoint
    color cells. Invariant to any spatial permutation of pixels. Histograms
    are cached per crop_ref behind a lock, so concurrent queries behave as if
    serialized.
    """

    def __init__(self, crop_root, bins: int = 8):
        if bins < 2:
            raise ValueError(f"bins must be >= 2, got {bins}")
        self.crop_root = Path(crop_root)
        if not self.crop_root.is_dir():
            raise ValueError(f"crop store {self.crop_root} is not a directory")
        self.bins = bins
        self._cache: dict[str, tuple] = {}
        self._lock = threading.Lock()

    def _histogram(self, crop_ref):
        """Integer cell counts plus the pixel total (kept exact so that the
        intersection of identical histograms is exactly 1.0)."""
        with self._lock:
            cached = self._cache.get(crop_ref)
        if cached is not None:
            return cached
        path = self.crop_root / crop_ref
        if not path.is_file():
            raise UnknownCropRef(f"no crop image at {path}")
        from PIL import Image

        with Image.open(path) as img:
            pixels = np.asarray(img.convert("RGB"), dtype=np.int64)
        binned = pixels * self.bins // 256
        cells = (binned[..., 0] * self.bins + binned[..., 1]) * self.bins + binned[..., 2]
        counts = np.bincount(cells.ravel(), minlength=self.bins ** 3)
        entry = (counts, int(counts.sum()))
        with self._lock:
            self._cache[crop_ref] = entry
        return entry

    def query(self, crop_a, crop_b):
        counts_a, n_a = self._histogram(crop_a)
        counts_b, n_b = self._histogram(crop_b)
        # sum of min(count_a/n_a, count_b/n_b) done in exact integer math
        overlap = int(np.minimum(counts_a * n_b, counts_b * n_a).sum())
        return overlap / (n_a * n_b)


def provider_from_spec(spec: str, base_dir=None) -> SimilarityProvider | None:
    """Build a provider from a config string.

    Accepted forms: ``none``, ``constant:<value>``, ``matrix:<path>``,
    ``histogram:<dir>`` or ``histogram:<dir>:<bins>``. Relative paths resolve
    against ``base_dir`` when given.
    """
    spec = spec.strip()
    if spec == "none":
        return None

    def _resolve(p):
        p = Path(p)
        if base_dir is not None and not p.is_absolute():
            p = Path(base_dir) / p
        return p

    kind, _, rest = spec.partition(":")
    if kind == "constant" and rest:
        return ConstantProvider(float(rest))
    if kind == "matrix" and rest:
        return load_matrix_provider(_resolve(rest))
    if kind == "histogram" and rest:
        root, _, bins = rest.rpartition(":")
        if root and bins.isdigit():
            return HistogramProvider(_resolve(root), bins=int(bins))
        return HistogramProvider(_resolve(rest))
    raise ValueError(f"unknown similarity provider spec {spec!r}")


# ---------------------------------------------------------------------------
# ROC calibration
# ---------------------------------------------------------------------------

class LabeledPair(NamedTuple):
    crop_a: str
    crop_b: str
    same: bool


class RocPoint(NamedTuple):
    threshold: float
    tpr: float
    fpr: float


def read_labeled_pairs(source) -> list[LabeledPair]:
    """Read a crop_a,crop_b,same CSV (same is 0/1)."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
    else:
        rows = list(csv.DictReader(source))
    pairs = []
    for row in rows:
        try:
            pairs.append(
                LabeledPair(row["crop_a"], row["crop_b"], bool(int(row["same"])))
            )
        except (KeyError, TypeError, ValueError):
            raise ValueError(f"bad labeled-pair row: {row!r}")
    if not pairs:
        raise ValueError("labeled pair set is empty")
    return pairs


def roc_curve(provider, pairs, thresholds=None) -> list[RocPoint]:
    """TPR/FPR of same-object classification (similarity >= threshold) over a
    threshold grid, returned in ascending threshold order."""
    labels = np.array([p.same for p in pairs], dtype=bool)
    n_pos = int(labels.sum())
    n_neg = int(labels.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise ValueError(
            f"need both positive and negative pairs, got {n_pos} positives "
            f"and {n_neg} negatives"
        )
    sims = np.array([provider.query(p.crop_a, p.crop_b) for p in pairs])
    if thresholds is None:
        thresholds = np.linspace(0.0, 1.0, 101)
    thresholds = np.sort(np.asarray(thresholds, dtype=np.float64))
    predicted = sims[None, :] >= thresholds[:, None]
    tp = (predicted & labels[None, :]).sum(axis=1)
    fp = (predicted & ~labels[None, :]).sum(axis=1)
    return [
        RocPoint(float(t), tp_i / n_pos, fp_i / n_neg)
        for t, tp_i, fp_i in zip(thresholds, tp, fp)
    ]


def select_threshold_roc(curve) -> float:
    """Threshold maximizing Youden's J (TPR - FPR); ties go to the larger
    threshold."""
    if not curve:
        raise ValueError("empty ROC curve")
    best = max(curve, key=lambda p: (p.tpr - p.fpr, p.threshold))
    return best.threshold


def roc_auc(curve) -> float:
    """Area under the curve (trapezoidal, with (0,0) and (1,1) anchors)."""
    pts = sorted({(p.fpr, p.tpr) for p in curve} | {(0.0, 0.0), (1.0, 1.0)})
    fpr = np.array([p[0] for p in pts])
    tpr = np.array([p[1] for p in pts])
    widths = np.diff(fpr)
    return float(np.sum(widths * (tpr[1:] + tpr[:-1]) / 2.0))


def resolve_threshold(spec, provider) -> float:
    """Resolve a sim-threshold config value: a number, or ``roc:<pairs.csv>``
    to calibrate against a labeled pair file using the given provider."""
    if isinstance(spec, (int, float)):
        return float(spec)
    text = str(spec).strip()
    if text.startswith("roc:"):
        if provider is None:
            raise ValueError("roc threshold calibration requires a similarity provider")
        pairs = read_labeled_pairs(text[len("roc:"):])
        return select_threshold_roc(roc_curve(provider, pairs))
    return float(text)
