"""Problem configuration, forcing, kernel and its explicit alpha1-plane factors."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .complexfn import kappa, mylog
from .errors import ConfigurationError, PoleError


class SpectralPoint(NamedTuple):
    alpha1: complex
    alpha2: complex


@dataclass(frozen=True)
class WaveParams:
    """Wavenumbers, incidence angle and every constant derived from them.

    Build instances with :func:`make_params`; the derived fields are never
    read from external input.
    """

    k1: complex
    k2: complex
    theta0: float
    a1: complex
    a2: complex
    delta: float
    delta1: float
    epsilon_strip: float

    @property
    def eps(self) -> float:
        return self.epsilon_strip

    @property
    def degenerate(self) -> bool:
        return self.k1 == self.k2

    def to_dict(self) -> dict:
        return {
            "k1": [self.k1.real, self.k1.imag],
            "k2": [self.k2.real, self.k2.imag],
            "theta0": self.theta0,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "WaveParams":
        try:
            k1 = complex(*data["k1"])
            k2 = complex(*data["k2"])
            theta0 = float(data["theta0"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed wave parameters: {exc}") from exc
        return make_params(k1, k2, theta0)

    @classmethod
    def from_json(cls, text: str) -> "WaveParams":
        return cls.from_dict(json.loads(text))


def _min_im_kappa(k1: complex, k2: complex, half_width: float) -> float:
    """Minimum of Im kappa(k, z) over |Im z| <= half_width, |Re z| <= 10|k2|, k in {k1, k2}."""
    reach = 10.0 * max(abs(k1), abs(k2))
    x = np.linspace(-reach, reach, 4001)
    y = np.linspace(-half_width, half_width, 21)
    z = x[None, :] + 1j * y[:, None]
    best = math.inf
    for k in (k1, k2):
        im = kappa(k, z).imag
        i, j = np.unravel_index(np.argmin(im), im.shape)

        def objective(p, k=k):
            return kappa(k, complex(p[0], p[1])).imag

        res = minimize(
            objective,
            x0=[x[j], y[i]],
            method="L-BFGS-B",
            bounds=[(-reach, reach), (-half_width, half_width)],
        )
        best = min(best, float(im[i, j]), float(res.fun))
    return best


def make_params(k1, k2, theta0: float) -> WaveParams:
    """Validate the configuration and compute a1, a2, delta and the strip half-width."""
    k1, k2, theta0 = complex(k1), complex(k2), float(theta0)
    for name, k in (("k1", k1), ("k2", k2)):
        if not (math.isfinite(k.real) and math.isfinite(k.imag)):
            raise ConfigurationError(f"{name} must be finite")
        if not k.imag > 0:
            raise ConfigurationError(f"Im({name}) > 0 violated: {name}={k}")
        if not k.real > 0:
            raise ConfigurationError(f"Re({name}) > 0 violated: {name}={k}")
    if not (math.pi < theta0 < 1.5 * math.pi):
        raise ConfigurationError(f"theta0 must lie in (pi, 3pi/2), got {theta0}")

    a1 = k1 * math.cos(theta0)
    a2 = k1 * math.sin(theta0)
    delta = min(k1.imag * abs(math.cos(theta0)), k1.imag * abs(math.sin(theta0)))
    delta1 = _min_im_kappa(k1, k2, delta / 2)
    if not delta1 > 0:
        raise ConfigurationError("kappa reaches the real axis inside S(-delta/2, delta/2)")
    eps = min(delta / 2, delta1)
    return WaveParams(k1, k2, theta0, a1, a2, delta, delta1, eps)


def _check_nonzero(den, what: str):
    if np.any(den == 0):
        raise PoleError(f"{what}: evaluation at a pole")


def _out(x, scalar):
    return complex(x) if scalar else x


def _scalar(*args) -> bool:
    return all(np.ndim(a) == 0 for a in args)


def _coords(alpha1, alpha2):
    # accept either a SpectralPoint/pair or two coordinates
    if alpha2 is None:
        alpha1, alpha2 = alpha1
    return alpha1, alpha2


def forcing_P(params: WaveParams, alpha1, alpha2=None):
    """1 / ((alpha1 - a1)(alpha2 - a2))."""
    alpha1, alpha2 = _coords(alpha1, alpha2)
    s = _scalar(alpha1, alpha2)
    den = (np.asarray(alpha1, complex) - params.a1) * (np.asarray(alpha2, complex) - params.a2)
    _check_nonzero(den, "forcing_P")
    return _out(1.0 / den, s)


def kernel_K(params: WaveParams, alpha1, alpha2=None):
    """(k2^2 - alpha1^2 - alpha2^2) / (k1^2 - alpha1^2 - alpha2^2)."""
    alpha1, alpha2 = _coords(alpha1, alpha2)
    s = _scalar(alpha1, alpha2)
    r2 = np.asarray(alpha1, complex) ** 2 + np.asarray(alpha2, complex) ** 2
    den = params.k1**2 - r2
    _check_nonzero(den, "kernel_K")
    return _out((params.k2**2 - r2) / den, s)


def K_plus_circ(params: WaveParams, alpha1, alpha2=None):
    """(kappa(k2, alpha2) + alpha1) / (kappa(k1, alpha2) + alpha1); analytic on UHP(-eps) x S."""
    alpha1, alpha2 = _coords(alpha1, alpha2)
    s = _scalar(alpha1, alpha2)
    a1 = np.asarray(alpha1, complex)
    a2 = np.asarray(alpha2, complex)
    den = kappa(params.k1, a2) + a1
    _check_nonzero(den, "K_plus_circ")
    return _out((kappa(params.k2, a2) + a1) / den, s)


def K_minus_circ(params: WaveParams, alpha1, alpha2=None):
    """(kappa(k2, alpha2) - alpha1) / (kappa(k1, alpha2) - alpha1); analytic on LHP(eps) x S."""
    alpha1, alpha2 = _coords(alpha1, alpha2)
    s = _scalar(alpha1, alpha2)
    a1 = np.asarray(alpha1, complex)
    a2 = np.asarray(alpha2, complex)
    den = kappa(params.k1, a2) - a1
    _check_nonzero(den, "K_minus_circ")
    return _out((kappa(params.k2, a2) - a1) / den, s)


def log_K_circ(params: WaveParams, sign: str, alpha1, alpha2=None):
    """``mylog(K_plus_circ)`` (sign "+") or ``mylog(K_minus_circ)`` (sign "-") without cancellation.

    Uses ``K circ = 1 + u`` with ``u = (k2^2 - k1^2) / ((kappa1 + kappa2)(kappa1 +- alpha1))``,
    so the value stays accurate where ``K circ - 1`` is tiny (large ``|alpha2|``).
    Near ``u = 0`` the principal ``log(1 + u)`` coincides with ``mylog``.
    """
    alpha1, alpha2 = _coords(alpha1, alpha2)
    s = _scalar(alpha1, alpha2)
    a1 = np.asarray(alpha1, complex)
    a2 = np.asarray(alpha2, complex)
    k1s = kappa(params.k1, a2)
    k2s = kappa(params.k2, a2)
    den = k1s + a1 if sign == "+" else k1s - a1
    _check_nonzero(den, "log_K_circ")
    u = (params.k2**2 - params.k1**2) / ((k1s + k2s) * den)
    u, small = np.broadcast_arrays(u, np.abs(u) < 0.5)
    out = np.empty(u.shape, dtype=complex)
    us = u[small]
    # numpy's complex log1p is log(1 + u); split into real log1p and atan2 instead
    out[small] = 0.5 * np.log1p(2 * us.real + us.real**2 + us.imag**2) + 1j * np.arctan2(us.imag, 1 + us.real)
    if np.any(~small):
        out[~small] = mylog(1.0 + u[~small])
    return _out(out, s)
