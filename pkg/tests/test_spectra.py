import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wedgewh import acceptance, cauchy, fields, spectra
from wedgewh.cauchy import ContourSpec, Plane, Sign
from wedgewh.errors import ConfigurationError, PoleError, ProbeError
from wedgewh.kernel import K_minus_circ, forcing_P
from wedgewh.spectra import CandidateTerm, Direction, SpectralCandidate

PROBE5 = 5


@pytest.fixture(scope="module")
def cand(ref_params):
    return acceptance.sample_candidate(ref_params)


def test_degenerate_ansatz_is_minus_forcing(deg_params):
    a1 = np.array([0.2 + 0.05j, -1.0, 3 - 0.1j])
    a2 = np.array([1.0, 0.3j * deg_params.eps, -2 + 0.01j])
    assert np.all(spectra.radlow_ansatz(deg_params, a1, a2) == -forcing_P(deg_params, a1, a2))


def test_forward_transform_of_incident_wave(deg_params):
    # the incident wave restricted to the quadrant transforms to -P
    p = deg_params

    def inc(x1, x2):
        X1, X2 = np.meshgrid(x1, x2)
        return fields.incident_field(p, X1, X2)

    for a in [(0.3 + 0.1j, 0.2 + 0.05j), (-0.5 + 0.2j, 1.0 + 0.1j)]:
        val = fields.forward_quarter_transform(inc, *a)
        assert abs(val + forcing_P(p, *a)) < 1e-8


def test_ansatz_regression(ref_params):
    assert abs(spectra.radlow_ansatz(ref_params, 1j, 1j) - (0.07579505232098269 + 0.2055400429464403j)) < 1e-12


def test_phi34_regression(ref_params):
    p = ref_params
    x, y = spectra.probe_set(p)[PROBE5]
    val = spectra.phi_34_from_psi(p, lambda a, b: spectra.radlow_ansatz(p, a, b), x, y)
    assert abs(val - (-0.4204199506728563 - 0.27537007542701764j)) < 1e-12


def test_inner_plus_regression_and_bracket(ref_params, cand):
    p = ref_params
    x, y = spectra.probe_set(p)[PROBE5]
    val = spectra.inner_plus(p, cand, x, y)
    assert abs(val - (0.2289130248545124 - 0.08704161706522749j)) < 1e-12
    F = lambda a1, a2: cand(a1, a2) / K_minus_circ(p, a1, a2)
    numeric = cauchy.bracket(F, Plane.ALPHA1, Sign.PLUS, p, (x, y), tol_rel=1e-13).value
    assert abs(numeric - val) < 1e-10
    minus = spectra.inner_minus(p, cand, x, y)
    assert abs(val + minus - F(x, y)) < 1e-12


def test_correction_regression(ref_params, cand):
    val = spectra.correction_term(ref_params, cand, 1j, 1j)
    assert abs(val - (9.874214312811241e-05 - 0.004775352297981244j)) < 1e-12


@pytest.mark.slow
def test_correction_against_nested_reference(ref_params, cand):
    # independent route: every factor from its own adaptive integral
    p = ref_params
    x, y = 1j, 1j

    def H(z):
        z = np.atleast_1d(z)
        out = np.empty(z.shape, complex)
        for i, t in enumerate(z.ravel()):
            num = cauchy.K_factor_reference(p, "MP", p.a1, t)
            den = cauchy.K_factor_reference(p, "PM", x, t)
            out.ravel()[i] = num / den * spectra.inner_plus(p, cand, x, t)
        return out

    spec = ContourSpec.for_params(p, -p.eps / 2, node_budget=160000)
    r = cauchy.cauchy_integral(H, spec, y, Sign.PLUS, tol_rel=1e-12)
    pref = 1 / (cauchy.K_factor_reference(p, "PP", x, y) * cauchy.K_factor_reference(p, "MP", p.a1, y))
    assert abs(-pref * r.value - spectra.correction_term(p, cand, x, y)) < 1e-10


def test_zero_candidate_has_no_correction(ref_params):
    z = SpectralCandidate.zero()
    assert spectra.correction_term(ref_params, z, 0.3, 0.2) == 0
    assert spectra.inner_plus(ref_params, z, 0.3, 0.2) == 0


def test_compatibility_is_affine(ref_params, cand):
    p = ref_params
    x, y = spectra.probe_set(p)[3]
    r0 = spectra.compatibility_residual(p, SpectralCandidate.zero(), x, y)
    r1 = spectra.compatibility_residual(p, cand, x, y)
    r2 = spectra.compatibility_residual(p, cand.scaled(2), x, y)
    assert abs((r2 - r0) - 2 * (r1 - r0)) < 1e-10


def test_p_term_removable_point(ref_params):
    p = ref_params
    x = 0.5 + 0.1j
    near = [complex(spectra.p_term_mismatch(p, x, p.a2 + d)) for d in (1e-2, 1e-4, 1e-7)]
    assert all(np.isfinite(v) for v in near)
    assert abs(near[1] - near[2]) < 1e-3 * abs(near[0]) + 1e-12
    at = complex(spectra.p_term_mismatch(p, x, p.a2))
    assert abs(at - near[2]) < 1e-6
    with pytest.raises(PoleError):
        spectra.p_term_mismatch(p, p.a1, 0.2)


def test_p_term_against_reference(ref_params):
    p = ref_params
    for x, y in spectra.probe_set(p)[::8]:
        ref = acceptance.p_term_reference(p, x, y)
        assert abs(spectra.p_term_mismatch(p, x, y) - ref) < 1e-10


@settings(max_examples=25)
@given(st.floats(-3, 3), st.floats(-0.9, 0.9), st.floats(-3, 3), st.floats(-0.9, 0.9))
def test_pole_removal_identity(ref_params, x1, y1, x2, y2):
    p = ref_params
    a1, a2 = complex(x1, y1 * p.eps), complex(x2, y2 * p.eps)
    plus, minus = spectra.pole_removal_split_alpha1(p, a1, a2)
    whole = forcing_P(p, a1, a2) / K_minus_circ(p, a1, a2)
    assert abs(plus + minus - whole) <= 1e-10 * max(1.0, abs(whole))


def test_pole_removal_degenerate(deg_params):
    plus, minus = spectra.pole_removal_split_alpha1(deg_params, 0.3, 0.4)
    assert minus == 0
    assert plus == pytest.approx(forcing_P(deg_params, 0.3, 0.4))


def test_E1_is_wh_residual_over_kernel(ref_params, cand):
    # any Phi-circ perturbation d moves E1 by d / K-circ
    p = ref_params
    x, y = spectra.strip_probes(p)[7]
    psi = lambda a, b: spectra.radlow_ansatz(p, a, b)
    phi_m = lambda a, b: spectra.phi_34_from_psi(p, psi, a, b) - cand(a, b)
    e0 = spectra.E1_residual(p, cand, psi, phi_m, x, y)
    d = 1e-3 * (1 + 2j)
    e1 = spectra.E1_residual(p, cand, psi, lambda a, b: phi_m(a, b) + d, x, y)
    assert abs(e0) < 1e-12
    assert abs((e0 - e1) - d / K_minus_circ(p, x, y)) < 1e-12


def test_forcing_decay(ref_params):
    f = lambda a, b: -forcing_P(ref_params, a, b)
    assert spectra.decay_rate_probe(f, Direction.ALPHA1) == pytest.approx(-1, abs=0.01)
    assert spectra.decay_rate_probe(f, "ALPHA2") == pytest.approx(-1, abs=0.01)
    assert spectra.decay_rate_probe(f, Direction.JOINT) == pytest.approx(-2, abs=0.01)


def test_decay_probe_failure():
    with pytest.raises(ProbeError):
        spectra.decay_rate_probe(lambda a, b: 0.0, Direction.ALPHA1)


def test_candidate_json(cand):
    assert SpectralCandidate.from_json(cand.to_json()) == cand
    assert SpectralCandidate.from_dict({}).is_zero


@pytest.mark.parametrize(
    "data",
    [{"terms": [{"coeff": [1, 0]}]}, {"kind": "ZERO", "terms": [
        {"coeff": [1, 0], "pole1": [0, -1], "order1": 1, "pole2": [0, 1], "order2": 1}]}, {"kind": "BOGUS"}],
)
def test_malformed_candidate(data):
    with pytest.raises(ConfigurationError):
        SpectralCandidate.from_dict(data)


def test_candidate_poles_checked(ref_params):
    bad = CandidateTerm(1, 0.1j, 1, 2j, 1)
    with pytest.raises(ConfigurationError):
        bad.check(ref_params)
    with pytest.raises(ConfigurationError):
        CandidateTerm(1, -2j, 0, 2j, 1)


def test_fit_candidate_reduces_residual(ref_params, cand):
    p = ref_params
    probes = spectra.probe_set(p)[::4]
    r0 = max(abs(spectra.compatibility_residual(p, SpectralCandidate.zero(), x, y)) for x, y in probes)
    fitted, sup = spectra.fit_candidate(p, list(cand.terms), probes)
    assert sup <= r0 + 1e-12
