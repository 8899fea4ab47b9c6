import math

import numpy as np
import pytest

from normproj import norms
from normproj.errors import ModelNotReady, NotSmoothHere, NotStrictlyConvex
from normproj.norms import HyperplaneNormal, SupportTable


def closed_form_models():
    return [
        norms.euclidean(2),
        norms.lp(1.5),
        norms.lp(3.0),
        norms.lp(8.0),
        norms.inner_product(np.diag([1.0, 4.0])),
    ]


# -- evaluation ------------------------------------------------------------

def test_eval_examples():
    assert norms.eval_norm(norms.euclidean(2), np.array([3.0, 4.0])) == pytest.approx(5.0)
    got = norms.eval_norm(norms.lp(3.0), np.array([1.0, 1.0]))
    assert got == pytest.approx(2.0 ** (1.0 / 3.0), abs=1e-12)
    got = norms.eval_norm(norms.inner_product(np.diag([1.0, 4.0])), np.array([1.0, 1.0]))
    assert got == pytest.approx(math.sqrt(5.0), abs=1e-12)


def test_eval_zero_iff_origin():
    for model in closed_form_models():
        assert norms.eval_norm(model, np.zeros(2)) == 0.0
        assert norms.eval_norm(model, np.array([1e-8, 0.0])) > 0.0


def test_homogeneity_and_symmetry(rng):
    for model in closed_form_models():
        xs = rng.standard_normal((1000, 2))
        cs = rng.uniform(0.1, 10.0, size=1000)
        base = np.asarray(norms.eval_norm(model, xs))
        scaled = np.asarray(norms.eval_norm(model, xs * cs[:, None]))
        assert np.max(np.abs(scaled - cs * base)) <= 1e-12 * np.max(scaled)
        neg = np.asarray(norms.eval_norm(model, -xs))
        assert np.max(np.abs(neg - base)) <= 1e-12 * np.max(base)


def test_homogeneity_support_table(ce_norm, rng):
    xs = rng.standard_normal((1000, 2))
    cs = rng.uniform(0.1, 10.0, size=1000)
    for x, c in zip(xs, cs):
        base = norms.eval_norm(ce_norm, x)
        assert norms.eval_norm(ce_norm, c * x) == pytest.approx(c * base, rel=1e-12)
        assert norms.eval_norm(ce_norm, -x) == pytest.approx(base, rel=1e-12)


def test_construction_rejects_non_strictly_convex():
    with pytest.raises(NotStrictlyConvex):
        norms.lp(1.0)
    with pytest.raises(NotStrictlyConvex):
        norms.lp(np.inf)
    with pytest.raises(NotStrictlyConvex):
        norms.inner_product(np.diag([1.0, 0.0]))
    with pytest.raises(NotStrictlyConvex):
        norms.inner_product(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_support_table_not_ready():
    model = norms.NormModel(kind="support_table", dim=2)
    with pytest.raises(ModelNotReady):
        norms.eval_norm(model, np.array([1.0, 0.0]))


# -- Gauss map ---------------------------------------------------------------

def _finite_difference_normal(model, x, step=1e-6):
    """Independent oracle: normalized central-difference gradient."""
    grad = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = step
        grad[i] = (norms.eval_norm(model, x + e) - norms.eval_norm(model, x - e)) / (2 * step)
    return grad / np.linalg.norm(grad)


def test_gauss_examples():
    for ang in (0.3, 1.2, 4.0):
        v = norms.unit_vector(ang)
        assert np.allclose(norms.gauss_map(norms.euclidean(2), v), v, atol=1e-15)
    assert np.allclose(norms.gauss_map(norms.lp(3.0), np.array([1.0, 0.0])), [1.0, 0.0])
    x = np.array([1.0, 1.0]) / 2.0 ** (1.0 / 3.0)
    got = norms.gauss_map(norms.lp(3.0), x)
    assert np.allclose(got, np.array([1.0, 1.0]) / math.sqrt(2.0), atol=1e-12)
    assert np.allclose(got, _finite_difference_normal(norms.lp(3.0), x), atol=1e-5)


def test_gauss_outward(rng, ce_norm):
    for model in closed_form_models() + [ce_norm]:
        for _ in range(20):
            x = norms.sphere_point(model, rng.standard_normal(2)).coords
            assert float(np.dot(x, norms.gauss_map(model, x))) > 0.0


def test_gauss_antipodality(rng, ce_norm):
    for model in closed_form_models() + [ce_norm]:
        for _ in range(50):
            v = norms.sphere_point(model, rng.standard_normal(2)).coords
            defect = np.linalg.norm(norms.gauss_map(model, -v) + norms.gauss_map(model, v))
            assert defect <= 1e-12


# -- inverse Gauss -----------------------------------------------------------

def _golden_support_oracle(model, w):
    """Independent maximization of <x(phi), w> over the angle sweep."""
    from normproj.searches import golden_section_max

    def score(phi):
        x = norms.sphere_point(model, norms.unit_vector(phi)).coords
        return float(np.dot(x, w))

    theta = math.atan2(w[1], w[0])
    phi, _ = golden_section_max(score, theta - 1.2, theta + 1.2, tol=1e-12)
    return norms.sphere_point(model, norms.unit_vector(phi)).coords


def test_inverse_gauss_examples():
    w = norms.unit_vector(0.8)
    assert np.allclose(norms.inverse_gauss(norms.euclidean(2), w).coords, w, atol=1e-14)

    w = np.array([1.0, 1.0]) / math.sqrt(2.0)
    got = norms.inverse_gauss(norms.lp(3.0), w).coords
    expect = np.array([1.0, 1.0]) / 2.0 ** (1.0 / 3.0)
    assert np.allclose(got, expect, atol=1e-12)
    assert np.allclose(got, _golden_support_oracle(norms.lp(3.0), w), atol=1e-7)

    q = np.diag([1.0, 4.0])
    model = norms.inner_product(q)
    w = norms.unit_vector(1.1)
    qi = np.linalg.inv(q)
    expect = qi @ w / math.sqrt(w @ qi @ w)  # Lagrange multiplier solution
    assert np.allclose(norms.inverse_gauss(model, w).coords, expect, atol=1e-12)


def test_sphere_point_invariant(rng, ce_norm):
    for model in closed_form_models() + [ce_norm]:
        for _ in range(20):
            p = norms.sphere_point(model, rng.standard_normal(2))
            assert abs(float(norms.eval_norm(model, p.coords)) - 1.0) <= 1e-12


def test_gauss_roundtrip_all_models(ce_norm):
    angles = 2.0 * np.pi * (np.arange(256) + 0.5) / 256
    for model in closed_form_models() + [ce_norm]:
        worst = 0.0
        for ang in angles:
            w = norms.unit_vector(ang)
            x = norms.inverse_gauss(model, w)
            g = norms.gauss_map(model, x.coords)
            err = abs(math.atan2(w[0] * g[1] - w[1] * g[0], float(np.dot(w, g))))
            worst = max(worst, err)
        assert worst <= 1e-8, f"{model.kind} roundtrip {worst:.2e}"


# -- sweep diagnostics -------------------------------------------------------

def test_check_gauss_properties_examples():
    rep = norms.check_gauss_properties(norms.euclidean(2), 1024)
    assert rep.antipodality_defect == 0.0
    assert rep.monotone
    assert rep.min_inner == pytest.approx(1.0, abs=1e-15)

    rep = norms.check_gauss_properties(norms.lp(1.5), 1024)
    assert rep.antipodality_defect <= 1e-12
    assert rep.monotone
    assert rep.min_inner > 0.0

    rep = norms.check_gauss_properties(norms.lp(8.0), 2048)
    assert rep.monotone
    assert rep.winding == pytest.approx(2.0 * np.pi, abs=1e-9)


def test_check_gauss_properties_guards():
    with pytest.raises(ValueError):
        norms.check_gauss_properties(norms.euclidean(3), 64)
    with pytest.raises(ValueError):
        norms.check_gauss_properties(norms.euclidean(2), 8)


def test_fixed_points_euclidean():
    far, near = norms.find_gauss_fixed_points(norms.euclidean(2))
    assert np.allclose(far.coords, [1.0, 0.0])
    assert np.allclose(near.coords, [0.0, 1.0])
    assert norms.gauss_fixed_point_defect(norms.euclidean(2), far) <= 1e-12


def test_fixed_points_ellipse():
    model = norms.inner_product(np.diag([1.0, 4.0]))
    far, near = norms.find_gauss_fixed_points(model)
    assert np.allclose(far.coords, [1.0, 0.0], atol=1e-6)
    assert np.allclose(np.abs(near.coords), [0.0, 0.5], atol=1e-6)
    assert norms.gauss_fixed_point_defect(model, far) <= 1e-6
    assert norms.gauss_fixed_point_defect(model, near) <= 1e-6


def test_fixed_points_lp4_dense_oracle():
    model = norms.lp(4.0)
    far, near = norms.find_gauss_fixed_points(model)
    assert far.polar_angle == pytest.approx(np.pi / 4.0, abs=1e-6)
    assert near.polar_angle == pytest.approx(0.0, abs=1e-6)
    # dense sampling oracle for the farthest point
    t = np.linspace(0.0, np.pi, 20001)
    radii = 1.0 / np.asarray(norms.eval_norm(model, norms.unit_vector(t)))
    assert abs(t[np.argmax(radii)] - np.pi / 4.0) <= 2e-4
    assert norms.gauss_fixed_point_defect(model, far) <= 1e-6
    assert norms.gauss_fixed_point_defect(model, near) <= 1e-6


def test_fixed_points_counterexample(ce_norm):
    far, near = norms.find_gauss_fixed_points(ce_norm)
    assert norms.gauss_fixed_point_defect(ce_norm, far) <= 1e-6
    assert norms.gauss_fixed_point_defect(ce_norm, near) <= 1e-6
    assert np.linalg.norm(far.coords) > np.linalg.norm(near.coords)


# -- hyperplane normals ------------------------------------------------------

def test_hyperplane_canonicalization(rng):
    for _ in range(100):
        v = rng.standard_normal(2)
        a, b = HyperplaneNormal(v), HyperplaneNormal(-v)
        assert np.allclose(a.w, b.w, atol=0.0)
        assert np.linalg.norm(a.w) == pytest.approx(1.0, abs=1e-15)
    w = HyperplaneNormal.from_angle(2.0)  # cos < 0: flipped representative
    assert w.w[0] > 0.0
    assert 0.0 <= w.angle < np.pi


def test_hyperplane_rejects_zero():
    with pytest.raises(ValueError):
        HyperplaneNormal(np.zeros(2))


# -- support tables ---------------------------------------------------------

def test_support_table_csv_roundtrip(tmp_path, ce_norm):
    path = tmp_path / "table.csv"
    table = ce_norm.support
    table.to_csv(path, version_line="# normproj test")
    loaded = SupportTable.from_csv(path)
    assert np.allclose(loaded.phi, table.phi, atol=1e-12)
    assert np.allclose(loaded.h, table.h, atol=1e-12)
    assert np.allclose(loaded.dh, table.dh, atol=1e-12)
    loaded.validate()


def test_support_table_corner_not_smooth():
    # cross-polytope: corners at the axes make the normal multivalued there
    n = 512
    phi = 2.0 * np.pi * np.arange(n) / n
    h = np.maximum(np.abs(np.cos(phi)), np.abs(np.sin(phi)))
    step = 2.0 * np.pi / n
    dh = (np.roll(h, -1) - np.roll(h, 1)) / (2.0 * step)  # periodic differences
    table = SupportTable(phi=phi, h=h, dh=dh)
    model = norms.NormModel(kind="support_table", dim=2, support=table)
    with pytest.raises(NotSmoothHere):
        norms.gauss_map(model, np.array([1.0, 0.0]))


def test_support_table_validation_rejects_asymmetry(ce_norm):
    table = ce_norm.support
    h = table.h.copy()
    h[10] += 1e-3
    broken = SupportTable(phi=table.phi.copy(), h=h, dh=table.dh.copy())
    with pytest.raises(NotStrictlyConvex):
        broken.validate()
