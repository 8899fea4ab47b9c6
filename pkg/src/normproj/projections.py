"""Closest-point projections onto hyperplanes and general linear families.

For a strictly convex C^1 norm the closest-point projection onto a
hyperplane w-perp is *linear*: every point is moved along the fixed
direction u = G^{-1}(w) (the support point of w) until it hits the plane.
``project_hyperplane`` implements that reduction, ``project_hyperplane_direct``
recomputes the same point by direct norm minimization and serves as the
independent cross-check.

Beyond norms, any assignment g of hyperplanes to hyperplanes induces a family
of linear surjective projections P_V = (Euclidean projection onto g(V)); the
map g is recovered from a family as the orthogonal complement of the kernel.
The intertwiner of two linear maps with equal kernels realizes the change of
target plane explicitly.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import brentq

from .errors import DegenerateSplitting, KernelMismatch
from . import norms
from .norms import HyperplaneNormal, canonicalize_direction, unit_vector
from .searches import golden_section_min, quadratic_polish, ternary_min


@dataclass(frozen=True)
class LinearProjector:
    """Linear projection onto ``target`` (a hyperplane) along ``kernel_dir``."""

    target: HyperplaneNormal
    kernel_dir: np.ndarray
    matrix: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.kernel_dir, dtype=float)
        m = np.asarray(self.matrix, dtype=float)
        k.flags.writeable = False
        m.flags.writeable = False
        object.__setattr__(self, "kernel_dir", k)
        object.__setattr__(self, "matrix", m)

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.matrix.T

    def idempotency_defect(self):
        return float(np.max(np.abs(self.matrix @ self.matrix - self.matrix)))


def projector_from_kernel(w, u):
    """The projector onto w-perp with kernel span(u): x - (<x,w>/<u,w>) u."""
    if not isinstance(w, HyperplaneNormal):
        w = HyperplaneNormal(w)
    u = np.asarray(u, dtype=float)
    denom = float(np.dot(u, w.w))
    if abs(denom) < 1e-14:
        raise DegenerateSplitting("kernel direction lies in the target plane")
    if denom < 0:
        u = -u
        denom = -denom
    n = w.dim
    matrix = np.eye(n) - np.outer(u, w.w) / denom
    return LinearProjector(target=w, kernel_dir=u / np.linalg.norm(u), matrix=matrix)


def project_hyperplane(norm, w, x):
    """Closest point of w-perp to ``x`` in the given norm (linear route).

    The projection direction is the support point u = G^{-1}(w); the result
    is x - (<x,w>/<u,w>) u, which lies on w-perp and is independent of x in
    its direction of travel.
    """
    if not isinstance(w, HyperplaneNormal):
        w = HyperplaneNormal(w)
    u = norms.inverse_gauss(norm, w.w).coords
    return projector_from_kernel(w, u).apply(np.asarray(x, dtype=float))


def _line_min(norm, x, direction, lo, hi):
    """Minimize s -> ||x - s*direction|| on [lo, hi].

    Golden-section brackets the convex objective; the last digits come from
    a root of the analytic slope -<grad ||.||, direction>, since value-only
    search stalls at sqrt(eps) which is above the cross-check budget.
    """

    def cost(s):
        return float(norms.eval_norm(norm, x - s * direction))

    def slope(s):
        return -float(np.dot(norms.norm_gradient(norm, x - s * direction), direction))

    s_star, _ = golden_section_min(cost, lo, hi, tol=1e-6)
    width = 1e-4 * (1.0 + abs(s_star))
    a, b = s_star - width, s_star + width
    sa, sb = slope(a), slope(b)
    if sa < 0.0 < sb:
        return brentq(slope, a, b, xtol=1e-13)
    return quadratic_polish(cost, s_star, delta=1e-5 * (1.0 + abs(s_star)))


def _direct_2d(norm, w, x):
    v = w.line_direction()
    lo_r, hi_r = norms.sphere_radius_bounds(norm)
    span = (1.0 + hi_r / lo_r) * (float(np.linalg.norm(x)) + 1.0)
    center = float(np.dot(x, v))
    s_star = _line_min(norm, x, v, center - span, center + span)
    return s_star * v


def _direct_nd(norm, w, x):
    # coordinate descent over an orthonormal basis of w-perp; the objective
    # is convex, so sweeps of line minimizations converge
    basis = null_space(w.w[None, :])  # (n, n-1), orthonormal columns
    coeff = basis.T @ x
    span = 4.0 * (float(np.linalg.norm(x)) + 1.0) * norm.dim
    for _ in range(200):
        moved = 0.0
        residual = x - basis @ coeff
        for j in range(basis.shape[1]):
            base = residual + coeff[j] * basis[:, j]
            s_new = _line_min(norm, base, basis[:, j], coeff[j] - span, coeff[j] + span)
            moved = max(moved, abs(s_new - coeff[j]))
            residual = base - s_new * basis[:, j]
            coeff[j] = s_new
        span = max(10.0 * moved, 1e-8)
        if moved < 1e-12:
            break
    return basis @ coeff


def project_hyperplane_direct(norm, w, x):
    """Closest point of w-perp by direct norm minimization (oracle route)."""
    if not isinstance(w, HyperplaneNormal):
        w = HyperplaneNormal(w)
    x = np.asarray(x, dtype=float)
    if norm.dim == 2:
        return _direct_2d(norm, w, x)
    return _direct_nd(norm, w, x)


# ---------------------------------------------------------------------------
# families of linear projections over the hyperplane Grassmannian
# ---------------------------------------------------------------------------

@dataclass
class ProjectionFamily:
    """A projector for every hyperplane, plus the map that generated it."""

    projector_of: object          # HyperplaneNormal -> LinearProjector
    gmap: object                  # HyperplaneNormal -> HyperplaneNormal
    provenance: str = "from_gmap"
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def projector(self, V):
        if not isinstance(V, HyperplaneNormal):
            V = HyperplaneNormal(V)
        return self.projector_of(V)


def associated_g(family, V):
    """The hyperplane orthogonal to the family's kernel at V, canonicalized."""
    proj = family.projector(V)
    u = proj.kernel_dir
    return HyperplaneNormal(canonicalize_direction(u / np.linalg.norm(u)))


def family_from_norm(norm):
    """The closest-point projection family of a strictly convex C^1 norm."""

    def projector_of(V):
        u = norms.inverse_gauss(norm, V.w).coords
        return projector_from_kernel(V, u)

    def gmap(V):
        u = norms.inverse_gauss(norm, V.w).coords
        return HyperplaneNormal(u)

    return ProjectionFamily(projector_of=projector_of, gmap=gmap, provenance="from_norm")


def family_from_gmap(gmap):
    """Family projecting orthogonally onto g(V), labeled by V.

    The kernel at V is the normal of g(V), so the associated map of the
    returned family reproduces ``gmap`` pointwise; no continuity of ``gmap``
    is required.
    """

    def projector_of(V):
        target = gmap(V)
        wprime = target.w
        n = len(wprime)
        matrix = np.eye(n) - np.outer(wprime, wprime)
        return LinearProjector(target=V, kernel_dir=wprime, matrix=matrix)

    return ProjectionFamily(projector_of=projector_of, gmap=gmap, provenance="from_gmap")


def angle_family(alpha):
    """Planar family splitting each line L against L rotated by alpha(L).

    ``alpha`` maps the line angle in [0, pi) to an angle in (0, pi); the
    projection onto L kills the rotated line.  The associated map has a
    fixed point exactly where alpha(L) = pi/2.
    """

    def projector_of(V):
        line_angle = float(np.mod(V.angle + 0.5 * np.pi, np.pi))
        a = float(alpha(line_angle))
        if not 0.0 < a < np.pi:
            raise DegenerateSplitting(f"alpha must lie in (0, pi), got {a}")
        kernel = unit_vector(line_angle + a)
        return projector_from_kernel(V, kernel)

    def gmap(V):
        return associated_g_from_projector(projector_of(V))

    return ProjectionFamily(projector_of=projector_of, gmap=gmap, provenance="angle_family")


def associated_g_from_projector(proj):
    u = proj.kernel_dir
    return HyperplaneNormal(canonicalize_direction(u))


# ---------------------------------------------------------------------------
# inner-product conjugation and L^p lines (general codimension specials)
# ---------------------------------------------------------------------------

def conjugate_projection(Q, basis, x):
    """Closest-point projection onto span(basis) for the Q-inner-product norm.

    Conjugates the Euclidean orthogonal projection by the isometry
    Psi = Q^(1/2): the result is Psi^-1 P_eucl(Psi V) Psi x.  ``basis`` is an
    (n, m) matrix whose columns span the target subspace.
    """
    model = norms.inner_product(Q)
    sqrt_q, _, inv_sqrt_q = norms._q_matrices(model)
    basis = np.asarray(basis, dtype=float)
    if basis.ndim == 1:
        basis = basis[:, None]
    mapped = sqrt_q @ basis
    ortho, _ = np.linalg.qr(mapped)
    proj_eucl = ortho @ ortho.T
    return inv_sqrt_q @ (proj_eucl @ (sqrt_q @ np.asarray(x, dtype=float)))


def project_line_lp(p, v, x):
    """Closest point of the line span(v) to ``x`` in the L^p norm.

    Solved by ternary search on t -> ||x - t v||_p to 1e-10; for p != 2 in
    dimension >= 3 this map is genuinely nonlinear in x.
    """
    p = float(p)
    if not (1.0 < p < np.inf):
        raise ValueError("p must lie in (1, inf)")
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    x = np.asarray(x, dtype=float)
    n = len(x)
    bound = (n + 1.0) * float(np.linalg.norm(x)) + 1.0

    def cost(t):
        return float(np.sum(np.abs(x - t * v) ** p))

    t_star, _ = ternary_min(cost, -bound, bound, tol=1e-10)
    t_star = quadratic_polish(cost, t_star, delta=1e-5 * (1.0 + abs(t_star)))
    return t_star * v


def linearity_defect(projector, samples=100, seed=0x5EED, dim=3):
    """Worst scale-free additivity violation of a projection map.

    Samples (x, y, c) and measures |P(x + c y) - P(x) - c P(y)| divided by
    1 + |x| + |c||y|; a linear map scores ~0, a genuinely nonlinear closest-
    point map scores well above any floating tolerance.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        x = rng.standard_normal(dim)
        y = rng.standard_normal(dim)
        c = rng.uniform(-2.0, 2.0)
        lhs = projector(x + c * y)
        rhs = projector(x) + c * projector(y)
        scale = 1.0 + np.linalg.norm(x) + abs(c) * np.linalg.norm(y)
        worst = max(worst, float(np.linalg.norm(lhs - rhs)) / scale)
    return worst


# ---------------------------------------------------------------------------
# intertwiner of equal-kernel linear maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Intertwiner:
    """Bijection h between the ranges of two maps with h(f(x)) = g(x)."""

    matrix: np.ndarray          # acts on range(f) inside the f-codomain
    range_f: np.ndarray         # orthonormal basis of range(f), columns
    range_g: np.ndarray         # orthonormal basis of range(g), columns

    def apply(self, y):
        return np.asarray(y, dtype=float) @ self.matrix.T


def construct_intertwiner(f, g, tol=1e-10):
    """Build h with h o f = g from two linear maps sharing a kernel.

    ``f`` and ``g`` are matrices with the same column count.  Kernel equality
    is verified by mutual containment of null-space bases; on mismatch the
    construction refuses with KernelMismatch.  h is assembled on a basis of
    the common row space: h(f w_j) = g w_j.
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape[1] != g.shape[1]:
        raise KernelMismatch("maps must share a domain")
    nf = null_space(f, rcond=tol)
    ng = null_space(g, rcond=tol)
    scale_f = max(1.0, float(np.linalg.norm(f, 2)))
    scale_g = max(1.0, float(np.linalg.norm(g, 2)))
    if nf.shape[1] != ng.shape[1]:
        raise KernelMismatch("kernel dimensions differ")
    if nf.size and float(np.max(np.abs(g @ nf))) > tol * scale_g:
        raise KernelMismatch("ker f is not contained in ker g")
    if ng.size and float(np.max(np.abs(f @ ng))) > tol * scale_f:
        raise KernelMismatch("ker g is not contained in ker f")

    # complement of the kernel: the row space of f
    u_f, s_f, vt_f = np.linalg.svd(f)
    top = float(s_f.max()) if s_f.size else 1.0
    rank = int(np.sum(s_f > tol * max(top, 1.0)))
    w_basis = vt_f[:rank].T                      # (n, rank)
    fw = f @ w_basis                             # (d, rank), full column rank
    gw = g @ w_basis                             # (m, rank)
    h = gw @ np.linalg.pinv(fw)

    range_f = np.linalg.qr(fw)[0]
    range_g = np.linalg.qr(gw)[0] if rank else np.zeros((g.shape[0], 0))
    return Intertwiner(matrix=h, range_f=range_f, range_g=range_g)
