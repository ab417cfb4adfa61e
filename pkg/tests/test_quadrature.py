import math

import numpy as np
import pytest

from wedgewh.errors import AccuracyError
from wedgewh.quadrature import (
    Arc,
    InvertedTail,
    Line,
    Panel,
    Ray,
    adaptive_integrate,
    fixed_rule,
    gauss_legendre,
    graded_breaks,
    panels_from_breaks,
    path_distance,
    refine,
)


def test_gauss_legendre_exact_for_polynomials():
    x, w = gauss_legendre(8)
    assert np.all((x > 0) & (x < 1))
    for p in range(16):
        assert np.sum(w * x**p) == pytest.approx(1 / (p + 1), rel=1e-14)


def test_line_integral_of_polynomial():
    seg = [Line(-1 + 0j, 2 + 1j)]
    rule = adaptive_integrate(lambda z: z**2, seg, [Panel(0, 0.0, 1.0)])
    exact = ((2 + 1j) ** 3 - (-1) ** 3) / 3
    assert abs(rule.value - exact) < 1e-13
    assert np.allclose(rule.fz, rule.z**2)


def test_full_circle_residue():
    seg = [Arc(0.3 + 0.1j, 1.0, 0.0, 2 * math.pi)]
    rule = adaptive_integrate(lambda z: 1 / (z - 0.5), seg, [Panel(0, 0.0, 1.0)])
    assert abs(rule.value - 2j * math.pi) < 1e-12


def test_inverted_tail_matches_closed_form():
    # integral of 1/(z - i)^2 over [L, inf) is 1/(L - i)
    seg = [InvertedTail(0.0, 2.0, 1)]
    rule = adaptive_integrate(lambda z: 1 / (z - 1j) ** 2, seg, [Panel(0, 0.0, 1.0)])
    assert abs(rule.value - 1 / (2 - 1j)) < 1e-13


def test_ray_orientation():
    out = Ray(0j, 1j, 3.0)
    back = Ray(0j, 1j, 3.0, inbound=True)
    v1 = adaptive_integrate(lambda z: z, [out], [Panel(0, 0.0, 3.0)]).value
    v2 = adaptive_integrate(lambda z: z, [back], [Panel(0, 0.0, 3.0)]).value
    assert abs(v1 - (3j) ** 2 / 2) < 1e-13
    assert abs(v1 + v2) < 1e-13


def test_budget_exhaustion_raises_with_best_value():
    seg = [Line(-1 + 0j, 1 + 0j)]
    with pytest.raises(AccuracyError) as info:
        adaptive_integrate(lambda z: np.abs(z.real) ** 0.01, seg, [Panel(0, 0.0, 1.0)], budget=200, tol_rel=1e-15)
    assert info.value.args


def test_nonfinite_integrand_raises():
    seg = [Line(-1 + 0j, 1 + 0j)]
    with pytest.raises(AccuracyError):
        adaptive_integrate(lambda z: np.full(z.shape, np.nan + 0j), seg, [Panel(0, 0.0, 1.0)])


def test_graded_breaks_cluster_at_focus():
    b = graded_breaks(0.0, 10.0, 3.0, 1e-3, 1.0)
    assert b[0] == 0.0 and b[-1] == 10.0
    assert np.all(np.diff(b) > 0)
    assert np.max(np.diff(b)) <= 1.0 + 1e-12
    i = int(np.argmin(np.abs(b - 3.0)))
    assert b[i] == pytest.approx(3.0)
    assert b[i + 1] - b[i] == pytest.approx(1e-3)


def test_panels_and_refine():
    panels = panels_from_breaks(0, np.array([0.0, 0.5, 1.0]))
    assert len(panels) == 2
    finer = refine(panels)
    assert len(finer) == 4 and finer[1].b == pytest.approx(0.5)
    z, w = fixed_rule([Line(0j, 1 + 0j)], finer, n=6)
    assert np.sum(w * z**5) == pytest.approx(1 / 6, rel=1e-14)


def test_distances():
    segs = [Line(-1 + 0j, 1 + 0j), Arc(0j, 2.0, 0.0, math.pi)]
    assert path_distance(segs, 0.5 + 0.25j) == pytest.approx(0.25)
    assert path_distance(segs, 3j) == pytest.approx(1.0)
    assert InvertedTail(0.1, 2.0, -1).distance(-5 + 0.4j) == pytest.approx(0.3)
