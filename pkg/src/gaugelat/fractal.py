"""Box-counting dimension of spectra and empirical band-union measure."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import SpectrumSweep

__all__ = [
    "DimensionFit",
    "box_counting_dimension",
    "box_counts",
    "resolution_limit",
    "spectrum_dimension",
    "bandwidth_measure",
    "cantor_points",
]

S_MIN = 2.0**-10
S_MAX = 2.0**-3
SPACING_FACTOR = 4.0
SCALES_PER_OCTAVE = 4


@dataclass(frozen=True)
class DimensionFit:
    scales: np.ndarray
    counts: np.ndarray
    D: float
    residual: float
    degenerate: bool = False


def _normalize(points):
    x = np.sort(np.asarray(points, dtype=float).ravel())
    span = x[-1] - x[0] if x.size else 0.0
    if x.size == 0 or span <= 0:
        return None
    return (x - x[0]) / span


def resolution_limit(x, tol: float = 1e-9) -> float:
    """Median spacing between distinct levels of a normalized set.

    Spacings below ``tol`` (degenerate levels) are dropped first, so exact
    degeneracies do not pretend the set is resolved more finely than it is.
    """
    g = np.diff(x)
    g = g[g > tol]
    return float(np.median(g)) if g.size else 1.0


def box_counts(x, scales) -> np.ndarray:
    """Occupied boxes of size s on the grid anchored at 0, for each s."""
    out = []
    for s in scales:
        nbox = int(np.ceil(1.0 / s - 1e-12))
        idx = np.minimum(np.floor(x / s + 1e-12).astype(np.int64), nbox - 1)
        out.append(np.unique(idx).size)
    return np.array(out)


def box_counting_dimension(points, num_scales: int | None = None, scale_range=(S_MIN, S_MAX),
                           spacing_factor: float = SPACING_FACTOR) -> DimensionFit:
    """Slope of log N(s) against log(1/s) for a set of reals.

    Points are mapped affinely onto [0, 1]. Box sizes are spaced
    geometrically over ``scale_range`` (default 4 per octave); sizes below
    ``spacing_factor`` times the median distinct-level spacing are dropped
    because the finite set cannot resolve them.
    """
    x = _normalize(points)
    if x is None:
        return DimensionFit(np.array([]), np.array([]), 0.0, 0.0, True)
    smin, smax = sorted(scale_range)
    if num_scales is None:
        num_scales = int(round(SCALES_PER_OCTAVE * np.log2(smax / smin))) + 1
    scales = np.geomspace(smax, smin, num_scales)
    floor = spacing_factor * resolution_limit(x)
    keep = scales >= floor
    if keep.sum() < 3:
        keep = np.zeros_like(keep)
        keep[:3] = True
    scales = scales[keep]
    counts = box_counts(x, scales)
    X = np.log(1.0 / scales)
    Y = np.log(counts)
    coef, res, *_ = np.polyfit(X, Y, 1, full=True)
    D = float(coef[0])
    resid = float(np.sqrt(res[0] / len(X))) if len(res) else 0.0
    return DimensionFit(scales, counts, D, resid, False)


def spectrum_dimension(sweep: SpectrumSweep, value, **kw) -> DimensionFit:
    return box_counting_dimension(sweep.at(value), **kw)


def bandwidth_measure(eigenvalues, gap_threshold: float | None = None, factor: float = 3.0) -> float:
    """Total length of the runs whose consecutive gaps stay below the threshold.

    The default threshold is ``factor`` times the median gap between
    distinct levels (degenerate pairs, common on rings, are skipped).
    """
    w = np.sort(np.asarray(eigenvalues, dtype=float))
    if w.size < 2:
        return 0.0
    g = np.diff(w)
    if gap_threshold is None:
        if g.size < 2:
            return 0.0  # one gap sets no in-band spacing scale
        distinct = g[g > 1e-9 * max(w[-1] - w[0], 1e-300)]
        thr = factor * np.median(distinct) if distinct.size else 0.0
    else:
        thr = gap_threshold
    # gaps inside a run are summed; a gap at or above the threshold splits runs
    return float(g[g < thr].sum())


def cantor_points(depth: int, both_ends: bool = False) -> np.ndarray:
    """Left endpoints (2**depth points) of the middle-thirds intervals at a depth.

    With ``both_ends`` the right endpoints are included too.
    """
    left = np.array([0.0])
    width = 1.0
    for _ in range(depth):
        width /= 3
        left = np.concatenate([left, left + 2 * width])
    left = np.sort(left)
    return np.sort(np.concatenate([left, left + width])) if both_ends else left
