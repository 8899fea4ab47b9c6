"""Box-counting dimension estimation of clouds and their line shadows.

The box count at scale delta is the number of occupied cells of the grid
delta * Z^n anchored at the origin (no random offsets: determinism beats
estimator variance here).  Scales are powers of the cloud's natural base so
grids align with self-similarity and reference counts are exact.

The fitted slope of log N against log delta stands in for Hausdorff
dimension.  The stand-in is honest but one-sided: box-counting dimension
upper-bounds Hausdorff dimension; every report carries that caveat.
"""

from dataclasses import dataclass

import numpy as np

from .errors import LowQualityFit, UnderResolved
from . import norms
from .norms import HyperplaneNormal

DIMENSION_CAVEAT = (
    "box-counting estimate; upper-bounds Hausdorff dimension, equal only on "
    "self-similar references"
)
MIN_SCALES = 4
MIN_R2 = 0.98


@dataclass(frozen=True)
class DimensionEstimate:
    """Scales, counts and the fitted log-log slope with its quality."""

    scales: np.ndarray
    counts: np.ndarray
    slope: float
    r2: float
    caveat: str = DIMENSION_CAVEAT

    def __post_init__(self):
        s = np.asarray(self.scales, dtype=float)
        c = np.asarray(self.counts, dtype=int)
        s.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "scales", s)
        object.__setattr__(self, "counts", c)


def _occupied_cells(points, delta):
    idx = np.floor(points / delta).astype(np.int64)
    if idx.shape[1] == 1:
        return len(np.unique(idx[:, 0]))
    # mix the integer coordinates into a single key per point
    idx = idx - idx.min(axis=0)
    spans = idx.max(axis=0).astype(np.int64) + 1
    key = idx[:, 0]
    for j in range(1, idx.shape[1]):
        key = key * spans[j] + idx[:, j]
    return len(np.unique(key))


def box_count(cloud, delta):
    """Number of occupied cells of the grid delta * Z^n."""
    delta = float(delta)
    if delta < 2.0 * cloud.resolution:
        raise UnderResolved(
            f"delta {delta:g} below twice the cloud resolution {cloud.resolution:g}"
        )
    return _occupied_cells(cloud.points, delta)


def admissible_scales(cloud, max_scales=12):
    """Powers base^-k admissible under the resolution guard, coarse first."""
    out = []
    for k in range(1, max_scales + 1):
        delta = float(cloud.base) ** (-k)
        if delta < 2.0 * cloud.resolution:
            break
        out.append(delta)
    return out


def fit_loglog(scales, counts):
    """Least-squares slope of log N against log delta, without refusal."""
    scales = np.asarray(scales, dtype=float)
    counts = np.asarray(counts, dtype=float)
    xs = np.log(scales)
    ys = np.log(counts)
    coeffs = np.polyfit(xs, ys, 1)
    fitted = np.polyval(coeffs, xs)
    ss_res = float(np.sum((ys - fitted) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return DimensionEstimate(scales=scales, counts=counts.astype(int), slope=float(-coeffs[0]), r2=r2)


def estimate_dim(cloud, scales=None, min_r2=MIN_R2):
    """Box-count over a ladder of scales and fit the dimension.

    Refuses with LowQualityFit when the fit explains less than ``min_r2`` of
    the variance; refuses with UnderResolved when fewer than four admissible
    scales exist.
    """
    if scales is None:
        scales = admissible_scales(cloud)
    scales = sorted((float(s) for s in scales), reverse=True)
    scales = [s for s in scales if s >= 2.0 * cloud.resolution]
    if len(scales) < MIN_SCALES:
        raise UnderResolved("need at least four admissible scales")
    counts = [box_count(cloud, s) for s in scales]
    est = fit_loglog(scales, counts)
    if est.r2 < min_r2:
        raise LowQualityFit(f"log-log fit r2 {est.r2:.4f} below {min_r2}")
    return est


# ---------------------------------------------------------------------------
# shadows
# ---------------------------------------------------------------------------

def _shadow_coordinates(norm, cloud, w):
    """Arc-length coordinate on w-perp of every projected cloud point.

    Projecting x along u = G^{-1}(w) and reading the coordinate against the
    canonical unit direction v of w-perp collapses to a single linear
    functional <x, v - (<u,v>/<u,w>) w>, applied to all points at once.
    """
    if not isinstance(w, HyperplaneNormal):
        w = HyperplaneNormal(w)
    v = w.line_direction()
    if norm.kind == "euclidean":
        return cloud.points @ v
    u = norms.inverse_gauss(norm, w.w).coords
    functional = v - (float(np.dot(u, v)) / float(np.dot(u, w.w))) * w.w
    return cloud.points @ functional


def projected_counts(norm, cloud, w, delta):
    """Occupied delta-bins of the cloud's shadow on the line w-perp."""
    delta = float(delta)
    if cloud.dim != 2:
        raise ValueError("projected_counts expects a planar cloud")
    if delta < 2.0 * cloud.resolution:
        raise UnderResolved(
            f"delta {delta:g} below twice the cloud resolution {cloud.resolution:g}"
        )
    coords = _shadow_coordinates(norm, cloud, w)
    return len(np.unique(np.floor(coords / delta).astype(np.int64)))


def projector_counts(projector, cloud, delta):
    """Occupied delta-bins of the image of a planar rank-one projector."""
    delta = float(delta)
    if delta < 2.0 * cloud.resolution:
        raise UnderResolved("delta below twice the cloud resolution")
    img = projector.apply(cloud.points)
    # arc-length coordinate along the actual image line (the target label of
    # a gmap-induced family may name a different plane)
    direction = None
    for probe in (np.array([1.0, 0.0]), np.array([0.0, 1.0])):
        cand = projector.matrix @ probe
        if np.linalg.norm(cand) > 1e-9:
            direction = norms.canonicalize_direction(cand / np.linalg.norm(cand))
            break
    if direction is None:
        return 1
    coords = img @ direction
    return len(np.unique(np.floor(coords / delta).astype(np.int64)))


def favard_proxy(cloud, directions, delta, norm=None):
    """Mean shadow length over a direction grid at resolution delta.

    For each angle the hyperplane normal is (cos a, sin a); the shadow
    length is the occupied-bin count times delta.  ``norm`` defaults to the
    Euclidean norm; a strictly convex model reuses its projection family.
    """
    if norm is None:
        norm = norms.euclidean(2)
    angles = getattr(directions, "angles", directions)
    lengths = [
        projected_counts(norm, cloud, HyperplaneNormal.from_angle(a), delta) * float(delta)
        for a in np.asarray(angles, dtype=float)
    ]
    return float(np.mean(lengths))
