import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wedgewh.complexfn import RegionKind, RegionSpec, kappa, mylog, mysqrt, region_contains
from wedgewh.errors import DomainError, UsageError

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, finite, finite)


def test_mysqrt_examples():
    assert mysqrt(-1) == 1j
    assert mysqrt(0) == 0
    # on the cut: i * principal sqrt(-4)
    assert mysqrt(4) == 1j * cmath.sqrt(-4) == -2


def test_mysqrt_cut_value_follows_defining_identity():
    # i*sqrt(-x) on the cut coincides with the limit from below the axis
    x = 2.5
    assert abs(mysqrt(x) - mysqrt(complex(x, -1e-14))) < 1e-6
    assert abs(mysqrt(x) - mysqrt(complex(x, 1e-14))) > 1.0


def test_mylog_examples():
    assert mylog(1) == 0
    # oracle: log(e^{-i pi/4} z) + i pi/4 with the principal log
    for z in (1j, -1):
        ref = cmath.log(cmath.exp(-0.25j * math.pi) * z) + 0.25j * math.pi
        assert abs(mylog(z) - ref) < 1e-15
    assert abs(mylog(1j) - 0.5j * math.pi) < 1e-15
    assert abs(mylog(-1) - 1j * math.pi) < 1e-15
    # points on the cut ray take the 5 pi/4 end of the argument range
    assert mylog(-1 - 1j).imag == pytest.approx(1.25 * math.pi, abs=1e-15)


def test_mylog_rejects_zero():
    with pytest.raises(DomainError):
        mylog(0)
    with pytest.raises(DomainError):
        mylog(np.array([1.0, 0.0]))


def test_mylog_cut_and_continuity():
    # jump only across arg = -3 pi/4
    r = 2.0
    below = mylog(r * cmath.exp(1j * (-0.75 * math.pi - 1e-9)))
    above = mylog(r * cmath.exp(1j * (-0.75 * math.pi + 1e-9)))
    assert abs(abs(below.imag - above.imag) - 2 * math.pi) < 1e-6
    th = np.linspace(-0.75 * math.pi + 1e-6, 1.25 * math.pi, 200001)
    vals = mylog(3.0 * np.exp(1j * th))
    assert np.max(np.abs(np.diff(vals))) < 1e-4
    # steps of 1e-9 off the cut stay continuous to 1e-8
    z0 = 1.0 - 1.0j
    steps = mylog(z0 + 1e-9 * np.arange(100))
    assert np.max(np.abs(np.diff(steps))) < 1e-8


def test_kappa_examples():
    assert kappa(3 + 1j, 0) == 3 + 1j
    z = np.array([0.3 + 0.1j, -2.0 + 0.5j, 4.0 - 1.0j])
    assert np.array_equal(kappa(1 + 1j, z), kappa(1 + 1j, -z))
    v = kappa(1 + 1j, 2 - 0.2j)
    assert v.imag > 0
    assert v == pytest.approx(0.6670484298787178 + 2.0987981341243045j, rel=1e-14)


def test_kappa_domain():
    with pytest.raises(DomainError):
        kappa(1 - 1j, 0)


@given(complexes)
def test_mysqrt_squares_back(z):
    w = mysqrt(z)
    assert w.imag >= 0
    assert abs(w * w - z) <= 1e-12 * max(1.0, abs(z))


def test_mysqrt_random_annulus():
    rng = np.random.default_rng(1)
    r = 10 ** rng.uniform(-3, 3, 10000)
    z = r * np.exp(1j * rng.uniform(-math.pi, math.pi, 10000))
    w = mysqrt(z)
    assert np.max(np.abs(w * w - z) / np.abs(z)) < 1e-12
    off_axis = ~((z.imag == 0) & (z.real >= 0))
    assert np.all(w.imag[off_axis] > 0)


@given(complexes.filter(lambda z: abs(z) > 1e-300))
def test_mylog_inverts_exp(z):
    w = mylog(z)
    assert -0.75 * math.pi < w.imag <= 1.25 * math.pi
    assert abs(cmath.exp(w) - z) <= 1e-12 * abs(z)


@given(
    st.floats(0.1, 5), st.floats(0.05, 3), st.builds(complex, st.floats(-50, 50), st.floats(-50, 50))
)
def test_kappa_identities(kr, ki, z):
    k = complex(kr, ki)
    v = kappa(k, z)
    assert abs(v * v + z * z - k * k) <= 1e-12 * max(1.0, abs(k * k), abs(z * z))
    assert kappa(k, -z) == v
    assert v.imag >= 0


def test_region_examples():
    eps = 0.3
    assert region_contains(RegionSpec(RegionKind.UHP, -eps), 1j)
    assert not region_contains(RegionSpec(RegionKind.STRIP, -eps, eps), 2 + 2 * eps * 1j)
    assert region_contains(RegionSpec(RegionKind.D_PM, -eps, -eps), (1j, -1j))


def test_region_boundaries_are_open():
    assert not region_contains(RegionSpec(RegionKind.UHP, 0.0), 1.0)
    assert not region_contains(RegionSpec(RegionKind.STRIP, -1, 1), 1j)


def test_region_dimension_mismatch():
    with pytest.raises(UsageError):
        region_contains(RegionSpec(RegionKind.UHP, 0.0), (1j, 1j))
    with pytest.raises(UsageError):
        region_contains(RegionSpec(RegionKind.D_PP, 0.0, 0.0), 1j)
    with pytest.raises(UsageError):
        RegionSpec(RegionKind.STRIP, 1.0, -1.0)


def test_circ_regions():
    s = RegionSpec(RegionKind.D_PCIRC, -0.5, 0.5)
    assert region_contains(s, (10j, 0.1j))
    assert not region_contains(s, (10j, 0.6j))
    assert not region_contains(s, (-1j, 0.1j))
    m = RegionSpec(RegionKind.D_CIRCM, -0.5, 0.5)
    assert region_contains(m, (0.0, -7j))
