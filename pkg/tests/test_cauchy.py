import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wedgewh.cauchy import (
    ContourSpec,
    Factor,
    Function1D,
    Indentation,
    K_factor,
    K_factor_reference,
    Plane,
    Sign,
    TailModel,
    bracket,
    cauchy_integral,
    factorize_log,
    winding_check,
)
from wedgewh.errors import AccuracyError, BranchCrossingError, ConfigurationError, ProximityError, UsageError
from wedgewh.kernel import K_minus_circ, K_plus_circ, forcing_P, kernel_K, log_K_circ


def lorentz(c):
    return lambda z: 1 / (z**2 + c**2)


def test_plus_part_partial_fractions():
    c, alpha = 2.0, 3j
    res = cauchy_integral(lorentz(c), ContourSpec(offset=-1e-3), alpha, Sign.PLUS)
    exact = -1 / (2j * c * (alpha + 1j * c))
    assert abs(res.value - exact) < 1e-12
    assert res.error_estimate >= 0 and res.evaluations > 0


def test_zero_integrand():
    res = cauchy_integral(lambda z: np.zeros_like(z), ContourSpec(offset=-0.5), 0.3j, "PLUS")
    assert res.value == 0


def test_sum_split_reconstructs():
    f, alpha = lorentz(2.0), 0.1 + 0.05j
    plus = cauchy_integral(f, ContourSpec(offset=-0.5), alpha, Sign.PLUS).value
    minus = cauchy_integral(f, ContourSpec(offset=0.5), alpha, Sign.MINUS).value
    assert abs(plus + minus - f(alpha)) < 1e-12


def test_nondecaying_integrand_rejected(ref_params):
    with pytest.raises(AccuracyError):
        bracket(lambda a1, a2: np.ones_like(a2), Plane.ALPHA2, Sign.PLUS, ref_params, (0.1, 0.1))


def test_on_contour_is_proximity_error():
    with pytest.raises(ProximityError):
        cauchy_integral(lorentz(2.0), ContourSpec(offset=0.0), 0.7, Sign.PLUS)


def test_descent_rejected_for_cauchy():
    with pytest.raises(UsageError):
        cauchy_integral(lorentz(2.0), ContourSpec(offset=-0.1, tail_model=TailModel.DESCENT), 0.0, Sign.PLUS)


def test_function1d_strip_enforced():
    f = Function1D(lorentz(2.0), strip=(-1.0, 1.0))
    with pytest.raises(UsageError):
        cauchy_integral(f, ContourSpec(offset=-1.5), 0.0, Sign.PLUS)
    assert abs(cauchy_integral(f, ContourSpec(offset=-0.5), 0.0, Sign.PLUS).value - 1 / 8) < 1e-12


def test_bracket_split_of_product(ref_params):
    p = ref_params

    def F(a1, a2):
        return forcing_P(p, a1, a2) / (a2**2 + 9)

    for a in [(0.3 + 0.1j, 0.2 - 0.05j), (-1.2, 0.7 + 0.1j)]:
        for plane in Plane:
            s = bracket(F, plane, Sign.PLUS, p, a).value + bracket(F, plane, Sign.MINUS, p, a).value
            assert abs(s - F(*a)) < 1e-6 * abs(F(*a))


def test_factorize_log_trivial():
    plus, minus = factorize_log(lambda z: np.ones_like(z), ContourSpec(offset=-0.1), ContourSpec(offset=0.1), 0.0)
    assert plus == 1 and minus == 1


def test_factorize_log_multiplicative(ref_params):
    p = ref_params
    a1 = 2 + 0.2j
    g = lambda z: K_minus_circ(p, np.full(np.shape(z), a1), z)
    low = ContourSpec.for_params(p, -p.eps / 2)
    high = ContourSpec.for_params(p, p.eps / 2)
    rng = np.random.default_rng(11)
    pts = rng.uniform(-5, 5, 100) + 1j * rng.uniform(-0.45, 0.45, 100) * p.eps
    for a in pts:
        plus, minus = factorize_log(g, low, high, a, tol_rel=1e-10, tol_abs=1e-12)
        assert abs(plus * minus / g(a) - 1) < 1e-6


def test_winding_check():
    winding_check(np.array([0, 1j, 2j]))
    with pytest.raises(BranchCrossingError):
        winding_check(np.array([3j, -3.2j]))


FROZEN = {
    (Factor.MM, 2 + 0.2j, -0.5j): 0.7578392010308692 - 0.26017924731557507j,
    (Factor.MP, 2 + 0.2j, 0.5j): 0.7578392010308691 - 0.26017924731557507j,
}


@pytest.mark.parametrize("key", list(FROZEN))
def test_factor_regression(ref_params, key):
    which, a1, a2 = key
    assert abs(K_factor(ref_params, which, a1, a2) - FROZEN[key]) < 1e-12
    assert abs(K_factor_reference(ref_params, which, a1, a2) - FROZEN[key]) < 1e-12


def test_factor_product_is_kernel(ref_params):
    p = ref_params
    rng = np.random.default_rng(5)
    n = 100
    a1 = rng.uniform(-3, 3, n) + 1j * rng.uniform(-0.9, 0.9, n) * p.eps
    a2 = rng.uniform(-3, 3, n) + 1j * rng.uniform(-0.9, 0.9, n) * p.eps
    prod = np.ones(n, dtype=complex)
    for which in Factor:
        prod *= K_factor(p, which, a1, a2)
    assert np.max(np.abs(prod / kernel_K(p, a1, a2) - 1)) < 1e-6


def test_factor_pairs_rebuild_circ(ref_params):
    p = ref_params
    a1 = np.full(5, 0.4 - 0.1j)
    a2 = np.linspace(-2, 2, 5) + 0.3j * p.eps
    assert np.allclose(K_factor(p, "MM", a1, a2) * K_factor(p, "MP", a1, a2), K_minus_circ(p, a1, a2), rtol=1e-10)
    assert np.allclose(K_factor(p, "PM", a1, a2) * K_factor(p, "PP", a1, a2), K_plus_circ(p, a1, a2), rtol=1e-10)


@pytest.mark.parametrize("which, a2", [("MM", -1e3j), ("MP", 1e3j), ("PM", -1e3j), ("PP", 1e3j), ("MM", 1e3), ("PP", -1e3)])
def test_factor_limits(ref_params, which, a2):
    assert abs(K_factor(ref_params, which, 0.5 + 0.1j, a2) - 1) < 1e-2


def test_continuation_consistency(ref_params):
    # the plus part from a lower contour continues the one from a higher contour
    p = ref_params
    for a2 in [0.3 + 0.1j * p.eps, -1.0, 2 + 0.5j * p.eps]:
        v1 = K_factor_reference(p, "PP", 1j * 0.3, a2, offset=-p.eps / 2)
        v2 = K_factor_reference(p, "PP", 1j * 0.3, a2, offset=-p.eps / 4)
        assert abs(v1 - v2) < 1e-6


def test_degenerate_factors_are_one(deg_params):
    for which in Factor:
        assert abs(K_factor(deg_params, which, 0.3 + 0.01j, -0.7 + 0.02j) - 1) < 1e-10


@settings(max_examples=20)
@given(st.floats(-4, 4), st.floats(-4, 4), st.floats(-0.9, 0.9))
def test_minus_factors_mirror(ref_params, x1, x2, y2):
    # K-circ is even in alpha2, so K--(a1, -z) = K-+(a1, z)
    p = ref_params
    a1, z = complex(x1, 0.3 * p.eps), complex(x2, y2 * p.eps)
    assert abs(K_factor(p, "MM", a1, -z) - K_factor(p, "MP", a1, z)) < 1e-10


def test_overlapping_indentations_rejected():
    spec = ContourSpec(offset=0.0, indentations=(Indentation(0.0, 0.5, "ABOVE"), Indentation(0.6, 0.5, "ABOVE")))
    with pytest.raises(ConfigurationError):
        cauchy_integral(lorentz(2.0), spec, 3j, Sign.PLUS)


def test_indentation_changes_side():
    # indenting below a point moves it above the contour: the plus part then sees f's pole
    f = lambda z: 1 / (z - 0.05j) / (z + 3j)
    ind = ContourSpec(offset=0.0, indentations=(Indentation(0.05j, 0.2, "BELOW"),))
    plain = ContourSpec(offset=-0.5)
    a = 2j
    assert abs(cauchy_integral(f, ind, a, Sign.PLUS).value - cauchy_integral(f, plain, a, Sign.PLUS).value) < 1e-12


def test_contour_json_roundtrip():
    spec = ContourSpec(offset=-0.2, truncation=12.0, node_budget=999, tail_model="RECIPROCAL",
                       indentations=(Indentation(1 + 0.1j, 0.3, "BELOW"),))
    assert ContourSpec.from_json(spec.to_json()) == spec
    with pytest.raises(ConfigurationError):
        ContourSpec.from_dict({"offset": 0.0})


def test_reciprocal_tail_is_approximate(ref_params):
    # the c/z fit removes most of the truncation error but not all of it
    p = ref_params
    g = lambda z: log_K_circ(p, "-", np.full(np.shape(z), 0.5 + 0j), z)
    a = 0.3 + 0.1j
    exact = cauchy_integral(g, ContourSpec.for_params(p, -p.eps / 2, node_budget=200000), a, Sign.PLUS).value
    recip = cauchy_integral(g, ContourSpec.for_params(p, -p.eps / 2, tail_model="RECIPROCAL", node_budget=200000), a, Sign.PLUS).value
    bare = cauchy_integral(g, ContourSpec.for_params(p, -p.eps / 2, tail_model="NONE", node_budget=200000), a, Sign.PLUS).value
    assert abs(recip - exact) < abs(bare - exact)
    assert abs(recip - exact) < 1e-3
