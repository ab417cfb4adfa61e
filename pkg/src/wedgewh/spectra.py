"""The two-variable Wiener-Hopf system and its diagnostics.

Sign convention: every function here returns ``Psi++`` itself. The
factorised equation reads ``-Psi++ = P/(factors) + correction``, so the
minus sign is folded into :func:`radlow_ansatz` and :func:`correction_term`
and ``psi_pp = radlow_ansatz + correction_term``.

The unknown ``Phi+-`` is represented by a :class:`SpectralCandidate`, a sum of
terms ``c / ((alpha1 - p1)^n1 (alpha2 - p2)^m2)`` with ``p1`` below the strip
and ``p2`` above it. For such terms the inner alpha1-plane bracket of
``Phi+- / K-circ`` has a closed form (partial fractions of
``1/K-circ = 1 + (kappa1 - kappa2)/(kappa2 - alpha1)``), so only the outer
alpha2-plane bracket is computed by quadrature.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .cauchy import ContourSpec, Sign, auto_offset, cauchy_integral, K_factor
from .complexfn import kappa
from .errors import ConfigurationError, PoleError, ProbeError, UsageError
from .kernel import K_minus_circ, K_plus_circ, WaveParams, forcing_P, kernel_K


class CandidateKind(str, enum.Enum):
    ZERO = "ZERO"
    RATIONAL_BASIS = "RATIONAL_BASIS"


class Direction(str, enum.Enum):
    ALPHA1 = "ALPHA1"
    ALPHA2 = "ALPHA2"
    JOINT = "JOINT"


@dataclass(frozen=True)
class CandidateTerm:
    coeff: complex
    pole1: complex
    order1: int
    pole2: complex
    order2: int

    def __post_init__(self):
        for name in ("coeff", "pole1", "pole2"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if int(self.order1) < 1 or int(self.order2) < 1:
            raise ConfigurationError("candidate term orders must be >= 1")

    def check(self, params: WaveParams) -> None:
        if not self.pole1.imag < -params.eps:
            raise ConfigurationError(f"pole1={self.pole1} must satisfy Im < -eps={-params.eps:.4g}")
        if not self.pole2.imag > params.eps:
            raise ConfigurationError(f"pole2={self.pole2} must satisfy Im > eps={params.eps:.4g}")

    def __call__(self, alpha1, alpha2):
        return self.coeff / ((alpha1 - self.pole1) ** self.order1 * (alpha2 - self.pole2) ** self.order2)

    def to_dict(self) -> dict:
        return {
            "coeff": [self.coeff.real, self.coeff.imag],
            "pole1": [self.pole1.real, self.pole1.imag],
            "order1": int(self.order1),
            "pole2": [self.pole2.real, self.pole2.imag],
            "order2": int(self.order2),
        }


@dataclass(frozen=True)
class SpectralCandidate:
    """Trial ``Phi+-``: analytic in ``UHP(-eps)`` in alpha1 and ``LHP(eps)`` in alpha2."""

    kind: CandidateKind = CandidateKind.ZERO
    terms: tuple[CandidateTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", CandidateKind(self.kind))
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.kind is CandidateKind.ZERO and self.terms:
            raise ConfigurationError("a ZERO candidate has no terms")

    @classmethod
    def zero(cls) -> "SpectralCandidate":
        return cls(CandidateKind.ZERO, ())

    @property
    def is_zero(self) -> bool:
        return not self.terms or all(t.coeff == 0 for t in self.terms)

    def check(self, params: WaveParams) -> None:
        for t in self.terms:
            t.check(params)

    def scaled(self, c: complex) -> "SpectralCandidate":
        terms = tuple(CandidateTerm(c * t.coeff, t.pole1, t.order1, t.pole2, t.order2) for t in self.terms)
        return SpectralCandidate(self.kind, terms)

    def __call__(self, alpha1, alpha2=None):
        if alpha2 is None:
            alpha1, alpha2 = alpha1
        a1 = np.asarray(alpha1, dtype=complex)
        a2 = np.asarray(alpha2, dtype=complex)
        out = np.zeros(np.broadcast(a1, a2).shape, dtype=complex)
        for t in self.terms:
            out = out + t(a1, a2)
        return complex(out) if out.ndim == 0 else out

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "terms": [t.to_dict() for t in self.terms]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "SpectralCandidate":
        try:
            terms = tuple(
                CandidateTerm(
                    complex(*d["coeff"]),
                    complex(*d["pole1"]),
                    int(d["order1"]),
                    complex(*d["pole2"]),
                    int(d["order2"]),
                )
                for d in data.get("terms", [])
            )
            return cls(CandidateKind(data.get("kind", "RATIONAL_BASIS" if terms else "ZERO")), terms)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed candidate: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "SpectralCandidate":
        return cls.from_dict(json.loads(text))


Evaluable = Callable[..., complex]


@dataclass(frozen=True)
class SpectralFunctions:
    """The unknown spectra of one configuration; parts that are not known individually are ``None``."""

    psi_pp: Evaluable
    phi_34: Evaluable
    phi_pm: Optional[Evaluable] = None
    phi_mp: Optional[Evaluable] = None
    phi_mm: Optional[Evaluable] = None

    def phi_mcirc(self, alpha1, alpha2):
        """``Phi-circ = Phi-- + Phi-+ = Phi3/4 - Phi+-``."""
        out = self.phi_34(alpha1, alpha2)
        if self.phi_pm is not None:
            out = out - self.phi_pm(alpha1, alpha2)
        return out


def _coords(alpha1, alpha2):
    if alpha2 is None:
        alpha1, alpha2 = alpha1
    return alpha1, alpha2


def _zero_like(*args):
    shape = np.broadcast(*[np.asarray(a) for a in args]).shape
    return 0j if shape == () else np.zeros(shape, dtype=complex)


# --- closed-form alpha1-plane brackets ------------------------------------------


def inner_plus(params: WaveParams, cand: SpectralCandidate, alpha1, alpha2=None):
    """``[Phi+- / K-circ]+circ`` in closed form.

    For ``c/((alpha1-p1)^n (alpha2-p2)^m)`` the plus part in alpha1 keeps the
    principal part at ``p1``:
    ``c (alpha2-p2)^-m sum_{j<n} t_j (alpha1-p1)^(j-n)`` with
    ``t_0 = 1/K-circ(p1, alpha2)`` and ``t_j = (kappa1-kappa2)/(kappa2-p1)^(j+1)``.
    """
    alpha1, alpha2 = _coords(alpha1, alpha2)
    a1 = np.asarray(alpha1, dtype=complex)
    a2 = np.asarray(alpha2, dtype=complex)
    out = np.zeros(np.broadcast(a1, a2).shape, dtype=complex)
    if cand.is_zero:
        return complex(out) if out.ndim == 0 else out
    k1s = kappa(params.k1, a2)
    k2s = kappa(params.k2, a2)
    diff = (params.k1**2 - params.k2**2) / (k1s + k2s)  # kappa1 - kappa2 without cancellation
    for t in cand.terms:
        base = k2s - t.pole1
        if np.any(base == 0):
            raise PoleError("kappa(k2, alpha2) meets a candidate pole")
        acc = (1.0 + diff / base) * (a1 - t.pole1) ** (-t.order1)
        for j in range(1, t.order1):
            acc = acc + diff / base ** (j + 1) * (a1 - t.pole1) ** (j - t.order1)
        out = out + t.coeff * acc / (a2 - t.pole2) ** t.order2
    return complex(out) if out.ndim == 0 else out


def inner_minus(params: WaveParams, cand: SpectralCandidate, alpha1, alpha2=None):
    """``[Phi+- / K-circ]-circ = Phi+-/K-circ - [Phi+-/K-circ]+circ``."""
    alpha1, alpha2 = _coords(alpha1, alpha2)
    if cand.is_zero:
        return _zero_like(alpha1, alpha2)
    return cand(alpha1, alpha2) / K_minus_circ(params, alpha1, alpha2) - inner_plus(params, cand, alpha1, alpha2)


def _H(params: WaveParams, cand: SpectralCandidate, alpha1: complex):
    """``H(z) = K-+(a1, z) / K+-(alpha1, z) * [Phi+-/K-circ]+circ(alpha1, z)``."""

    def h(z):
        z = np.asarray(z, dtype=complex)
        num = K_factor(params, "MP", params.a1, z)
        den = K_factor(params, "PM", alpha1, z)
        return num / den * inner_plus(params, cand, alpha1, z)

    return h


@dataclass(frozen=True)
class _Split:
    value: complex
    error: float


def _outer(params, cand, alpha1, alpha2, sign: Sign) -> _Split:
    if cand.is_zero:
        return _Split(0j, 0.0)
    cand.check(params)
    spec = ContourSpec.for_params(params, auto_offset(params, sign, complex(alpha2).imag))
    res = cauchy_integral(_H(params, cand, complex(alpha1)), spec, complex(alpha2), sign)
    return _Split(res.value, res.error_estimate)


def _pointwise(fn, alpha1, alpha2):
    """Apply a scalar routine over broadcast arrays."""
    if np.ndim(alpha1) == 0 and np.ndim(alpha2) == 0:
        return fn(complex(alpha1), complex(alpha2))
    a1, a2 = np.broadcast_arrays(np.asarray(alpha1, complex), np.asarray(alpha2, complex))
    out = np.array([fn(complex(x), complex(y)) for x, y in zip(a1.ravel(), a2.ravel())], dtype=complex)
    return out.reshape(a1.shape)


# --- the system -----------------------------------------------------------------


def radlow_ansatz(params: WaveParams, alpha1, alpha2=None):
    """``-P / (K++ K-+(a1, alpha2) K--(a1, a2) K+-(alpha1, a2))``: Psi++ with zero correction."""
    alpha1, alpha2 = _coords(alpha1, alpha2)
    p = forcing_P(params, alpha1, alpha2)
    a1 = params.a1
    den = (
        K_factor(params, "PP", alpha1, alpha2)
        * K_factor(params, "MP", a1, alpha2)
        * K_factor(params, "MM", a1, params.a2)
        * K_factor(params, "PM", alpha1, params.a2)
    )
    return -p / den


def correction_term(params: WaveParams, phi_pm: SpectralCandidate, alpha1, alpha2=None, *, full: bool = False):
    """``-(1/(K++ K-+(a1, alpha2))) [H]circ+`` so that ``Psi++ = radlow_ansatz + correction_term``.

    With ``full=True`` returns ``(value, error_estimate)``.
    """
    alpha1, alpha2 = _coords(alpha1, alpha2)

    def one(x, y):
        split = _outer(params, phi_pm, x, y, Sign.PLUS)
        if split.value == 0 and split.error == 0:
            return 0j, 0.0
        pref = 1.0 / (K_factor(params, "PP", x, y) * K_factor(params, "MP", params.a1, y))
        return -pref * split.value, abs(pref) * split.error

    if np.ndim(alpha1) == 0 and np.ndim(alpha2) == 0:
        val, err = one(complex(alpha1), complex(alpha2))
        return (val, err) if full else val
    errs = []

    def value_only(x, y):
        v, e = one(x, y)
        errs.append(e)
        return v

    vals = _pointwise(value_only, alpha1, alpha2)
    return (vals, max(errs, default=0.0)) if full else vals


def psi_pp(params: WaveParams, phi_pm: SpectralCandidate, alpha1, alpha2=None):
    alpha1, alpha2 = _coords(alpha1, alpha2)
    return radlow_ansatz(params, alpha1, alpha2) + correction_term(params, phi_pm, alpha1, alpha2)


def _f_p_term(params: WaveParams, alpha1, z):
    """``1 / (K--(a1, z) K+-(alpha1, z))``."""
    return 1.0 / (K_factor(params, "MM", params.a1, z) * K_factor(params, "PM", alpha1, z))


def p_term_mismatch(params: WaveParams, alpha1, alpha2=None):
    """``P (1/(K--(a1,alpha2) K+-) - 1/(K--(a1,a2) K+-(alpha1,a2)))``.

    The bracket vanishes at ``alpha2 = a2`` and cancels the pole of ``P``
    there; within 1e-3 of ``a2`` the difference quotient is evaluated by a
    Cauchy integral on a circle so no cancellation occurs.
    """
    alpha1, alpha2 = _coords(alpha1, alpha2)

    def one(x: complex, y: complex) -> complex:
        if x == params.a1:
            raise PoleError("alpha1 = a1 is a pole of the P-term")
        f0 = complex(_f_p_term(params, x, params.a2))
        if abs(y - params.a2) >= 1e-3:
            quot = (complex(_f_p_term(params, x, y)) - f0) / (y - params.a2)
        else:
            r, n = 0.05, 32
            th = 2 * math.pi * np.arange(n) / n
            z = params.a2 + r * np.exp(1j * th)
            g = (_f_p_term(params, x, z) - f0) / (z - params.a2)
            quot = complex(np.mean(g * (z - params.a2) / (z - y)))
        return quot / (x - params.a1)

    return _pointwise(one, alpha1, alpha2)


def compatibility_residual(params: WaveParams, phi_pm: SpectralCandidate, alpha1, alpha2=None, *, full: bool = False):
    """``P(1/(K--(a1,alpha2)K+-) - 1/(K--(a1,a2)K+-(alpha1,a2))) + [H]circ-``; zero for the true ``Phi+-``.

    With ``full=True`` returns ``(value, error_estimate)``.
    """
    alpha1, alpha2 = _coords(alpha1, alpha2)
    errs = []

    def one(x, y):
        split = _outer(params, phi_pm, x, y, Sign.MINUS)
        errs.append(split.error)
        return complex(p_term_mismatch(params, x, y)) + split.value

    vals = _pointwise(one, alpha1, alpha2)
    return (vals, max(errs, default=0.0)) if full else vals


def pole_removal_split_alpha1(params: WaveParams, alpha1, alpha2=None):
    """``P/K-circ = P/K-circ(a1, alpha2) + P (1/K-circ - 1/K-circ(a1, alpha2))``.

    The second term is computed as
    ``(kappa1 - kappa2) / ((alpha2 - a2)(kappa2 - alpha1)(kappa2 - a1))``,
    which makes its removable point at ``alpha1 = a1`` explicit.
    """
    alpha1, alpha2 = _coords(alpha1, alpha2)
    a2 = np.asarray(alpha2, dtype=complex)
    a1 = np.asarray(alpha1, dtype=complex)
    if np.any(a2 == params.a2):
        raise PoleError("alpha2 = a2 is a pole of P")
    plus = forcing_P(params, alpha1, alpha2) / K_minus_circ(params, params.a1, alpha2)
    k1s = kappa(params.k1, a2)
    k2s = kappa(params.k2, a2)
    diff = (params.k1**2 - params.k2**2) / (k1s + k2s)
    minus = diff / ((a2 - params.a2) * (k2s - a1) * (k2s - params.a1))
    if np.ndim(minus) == 0:
        minus = complex(minus)
    return plus, minus


def phi_34_from_psi(params: WaveParams, psi, alpha1, alpha2=None):
    """``Phi3/4 = -K Psi++ - P``."""
    alpha1, alpha2 = _coords(alpha1, alpha2)
    return -kernel_K(params, alpha1, alpha2) * psi(alpha1, alpha2) - forcing_P(params, alpha1, alpha2)


def wiener_hopf_residual(params: WaveParams, psi, phi_34, alpha1, alpha2=None):
    """``-K Psi++ - Phi3/4 - P``."""
    alpha1, alpha2 = _coords(alpha1, alpha2)
    return (
        -kernel_K(params, alpha1, alpha2) * psi(alpha1, alpha2)
        - phi_34(alpha1, alpha2)
        - forcing_P(params, alpha1, alpha2)
    )


def E1_branches(params: WaveParams, phi_pm: SpectralCandidate, psi, phi_mcirc, alpha1, alpha2=None):
    """The two sides of the alpha1-plane Liouville function.

    upper = ``-K+circ Psi++ - [Phi+-/K-circ]+circ - P/K-circ(a1, alpha2)``
    lower = ``Phi-circ/K-circ + [Phi+-/K-circ]-circ + P (1/K-circ - 1/K-circ(a1, alpha2))``
    """
    alpha1, alpha2 = _coords(alpha1, alpha2)
    plus_p, minus_p = pole_removal_split_alpha1(params, alpha1, alpha2)
    upper = (
        -K_plus_circ(params, alpha1, alpha2) * psi(alpha1, alpha2)
        - inner_plus(params, phi_pm, alpha1, alpha2)
        - plus_p
    )
    lower = (
        phi_mcirc(alpha1, alpha2) / K_minus_circ(params, alpha1, alpha2)
        + inner_minus(params, phi_pm, alpha1, alpha2)
        + minus_p
    )
    return upper, lower


def E1_residual(params: WaveParams, phi_pm: SpectralCandidate, psi, phi_mcirc, alpha1, alpha2=None):
    """upper - lower of :func:`E1_branches`; equals the Wiener-Hopf residual divided by ``K-circ``."""
    upper, lower = E1_branches(params, phi_pm, psi, phi_mcirc, alpha1, alpha2)
    return upper - lower


def E2_branches(params: WaveParams, phi_pm: SpectralCandidate, psi, alpha1, alpha2=None):
    """The two sides of the alpha2-plane Liouville function.

    upper = ``-Psi++ K++ K-+(a1, alpha2) - P/(K--(a1,a2) K+-(alpha1,a2)) - [H]circ+``
    lower = ``P (1/(K--(a1,alpha2) K+-) - 1/(K--(a1,a2) K+-(alpha1,a2))) + [H]circ-``
    """
    alpha1, alpha2 = _coords(alpha1, alpha2)

    def one(x, y):
        a1, a2 = params.a1, params.a2
        p = complex(forcing_P(params, x, y))
        hp = _outer(params, phi_pm, x, y, Sign.PLUS).value
        hm = _outer(params, phi_pm, x, y, Sign.MINUS).value
        upper = (
            -complex(psi(x, y)) * K_factor(params, "PP", x, y) * K_factor(params, "MP", a1, y)
            - p / (K_factor(params, "MM", a1, a2) * K_factor(params, "PM", x, a2))
            - hp
        )
        lower = complex(p_term_mismatch(params, x, y)) + hm
        return upper, lower

    if np.ndim(alpha1) == 0 and np.ndim(alpha2) == 0:
        return one(complex(alpha1), complex(alpha2))
    a1, a2 = np.broadcast_arrays(np.asarray(alpha1, complex), np.asarray(alpha2, complex))
    pairs = [one(complex(x), complex(y)) for x, y in zip(a1.ravel(), a2.ravel())]
    up = np.array([p[0] for p in pairs]).reshape(a1.shape)
    lo = np.array([p[1] for p in pairs]).reshape(a1.shape)
    return up, lo


def E2_residual(params: WaveParams, phi_pm: SpectralCandidate, psi, alpha1, alpha2=None):
    upper, lower = E2_branches(params, phi_pm, psi, alpha1, alpha2)
    return upper - lower


# --- spectra bundles ---------------------------------------------------------------


def degenerate_spectra(params: WaveParams) -> SpectralFunctions:
    """Exact spectra for equal wavenumbers: ``Psi++ = -P`` and every ``Phi`` vanishes."""
    if not params.degenerate:
        raise UsageError("degenerate spectra need k1 == k2")

    def psi(a1, a2):
        return -forcing_P(params, a1, a2)

    def zero(a1, a2):
        return _zero_like(a1, a2)

    return SpectralFunctions(psi_pp=psi, phi_34=zero, phi_pm=zero, phi_mp=zero, phi_mm=zero)


def candidate_spectra(params: WaveParams, phi_pm: SpectralCandidate) -> SpectralFunctions:
    """``Psi++`` from the factorised equation for a given candidate, and ``Phi3/4`` from the WH equation."""
    phi_pm.check(params)

    def psi(a1, a2):
        return psi_pp(params, phi_pm, a1, a2)

    def phi34(a1, a2):
        return phi_34_from_psi(params, psi, a1, a2)

    return SpectralFunctions(psi_pp=psi, phi_34=phi34, phi_pm=phi_pm)


# --- probes, decay, fitting --------------------------------------------------------

_PROBE_RE = (-1.5, -0.5, 0.5, 1.5)


def probe_set(params: WaveParams) -> list[tuple[complex, complex]]:
    """32 fixed points of ``D+-`` near the strip."""
    e = params.eps
    pts = []
    for im1, im2 in ((e / 4, -e / 4), (-e / 2, e / 2)):
        for r1 in _PROBE_RE:
            for r2 in _PROBE_RE:
                pts.append((complex(r1, im1), complex(r2, im2)))
    return pts


def strip_probes(params: WaveParams) -> list[tuple[complex, complex]]:
    """32 fixed points of ``S x S``."""
    e = params.eps
    pts = []
    for im1, im2 in ((e / 3, -e / 3), (-e / 3, e / 3)):
        for r1 in _PROBE_RE:
            for r2 in _PROBE_RE:
                pts.append((complex(r1, im1), complex(r2, im2)))
    return pts


def decay_rate_probe(
    f,
    direction,
    params: WaveParams | None = None,
    *,
    fixed: complex = 1j,
    t_range: tuple[float, float] = (1e2, 1e4),
    n: int = 9,
) -> float:
    """Log-log slope of ``|f|`` along ``i*t``: in alpha1, in alpha2 or in both together.

    The variable that is not probed is held at ``fixed``.
    """
    direction = Direction(direction)
    t = np.geomspace(t_range[0], t_range[1], n)
    ray = 1j * t
    if direction is Direction.ALPHA1:
        a1, a2 = ray, np.full(n, fixed)
    elif direction is Direction.ALPHA2:
        a1, a2 = np.full(n, fixed), ray
    else:
        a1, a2 = ray, ray
    try:
        vals = np.array([complex(f(x, y)) for x, y in zip(a1, a2)])
    except Exception as exc:
        raise ProbeError(f"evaluation along the {direction.value} ray failed: {exc}") from exc
    mag = np.abs(vals)
    if not np.all(np.isfinite(mag)) or np.any(mag == 0):
        raise ProbeError(f"non-finite or zero values along the {direction.value} ray")
    slope, _ = np.polyfit(np.log(t), np.log(mag), 1)
    return float(slope)


def residual_report(params: WaveParams, phi_pm: SpectralCandidate, probes=None) -> list[dict]:
    """``[{probe, residual, error_estimate}]`` for every probe point."""
    probes = probe_set(params) if probes is None else probes
    out = []
    for a1, a2 in probes:
        val, err = compatibility_residual(params, phi_pm, a1, a2, full=True)
        out.append(
            {
                "probe": [[a1.real, a1.imag], [a2.real, a2.imag]],
                "residual": [val.real, val.imag],
                "error_estimate": err,
            }
        )
    return out


def fit_candidate(params: WaveParams, basis: list[CandidateTerm], probes=None) -> tuple[SpectralCandidate, float]:
    """Least-squares coefficients for a fixed pole basis against the compatibility residual.

    The residual is affine in the coefficients, so the columns are the
    residuals of unit-coefficient terms minus the residual of the empty
    candidate. Returns the fitted candidate and the sup residual on the probes.
    """
    probes = probe_set(params) if probes is None else probes
    r0 = np.array([compatibility_residual(params, SpectralCandidate.zero(), a, b) for a, b in probes])
    cols = []
    for term in basis:
        unit = SpectralCandidate(
            CandidateKind.RATIONAL_BASIS, (CandidateTerm(1.0, term.pole1, term.order1, term.pole2, term.order2),)
        )
        unit.check(params)
        cols.append(np.array([compatibility_residual(params, unit, a, b) for a, b in probes]) - r0)
    A = np.stack(cols, axis=1)
    coeff, *_ = np.linalg.lstsq(A, -r0, rcond=None)
    fitted = SpectralCandidate(
        CandidateKind.RATIONAL_BASIS,
        tuple(CandidateTerm(c, t.pole1, t.order1, t.pole2, t.order2) for c, t in zip(coeff, basis)),
    )
    sup = float(np.max(np.abs(r0 + A @ coeff)))
    return fitted, sup
