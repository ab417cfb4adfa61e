"""Composite Gauss-Legendre quadrature along piecewise contours.

A path is a list of segments. Each segment maps a real parameter interval to
the complex plane and supplies the Jacobian that turns ``f(z) dz`` into
``f(z(t)) jac(t) dt`` with the orientation already folded in, so integrals
over a path are plain sums over panels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import AccuracyError


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


class Segment:
    t0: float
    t1: float

    def map(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def closest(self, alpha: complex) -> tuple[float, float]:
        """Parameter of the point nearest ``alpha`` and that distance in parameter units."""
        raise NotImplementedError

    def distance(self, alpha: complex) -> float:
        raise NotImplementedError

    def length_scale(self) -> float:
        """Approximate |dz/dt|, used to convert z-widths into parameter widths."""
        return 1.0


@dataclass
class Line(Segment):
    z0: complex
    z1: complex
    t0: float = 0.0
    t1: float = 1.0

    def map(self, t):
        dz = self.z1 - self.z0
        return self.z0 + dz * t, np.full(np.shape(t), dz, dtype=complex)

    def length_scale(self):
        return abs(self.z1 - self.z0)

    def closest(self, alpha):
        dz = self.z1 - self.z0
        t = ((alpha - self.z0) * dz.conjugate()).real / abs(dz) ** 2
        t = min(max(t, 0.0), 1.0)
        return t, abs(self.z0 + dz * t - alpha) / abs(dz)

    def distance(self, alpha):
        t, dt = self.closest(alpha)
        return dt * abs(self.z1 - self.z0)


@dataclass
class Arc(Segment):
    center: complex
    radius: float
    theta0: float
    theta1: float
    t0: float = 0.0
    t1: float = 1.0

    def map(self, t):
        dth = self.theta1 - self.theta0
        e = np.exp(1j * (self.theta0 + dth * t))
        return self.center + self.radius * e, 1j * self.radius * e * dth

    def length_scale(self):
        return self.radius * abs(self.theta1 - self.theta0)

    def _sweep_contains(self, phi):
        lo, hi = sorted((self.theta0, self.theta1))
        for shift in (-2 * math.pi, 0.0, 2 * math.pi):
            if lo <= phi + shift <= hi:
                return phi + shift
        return None

    def closest(self, alpha):
        rel = alpha - self.center
        phi = self._sweep_contains(math.atan2(rel.imag, rel.real)) if rel != 0 else None
        dth = self.theta1 - self.theta0
        if phi is not None:
            d = abs(abs(rel) - self.radius)
            return (phi - self.theta0) / dth, d / self.length_scale()
        z_a, _ = self.map(np.array(0.0))
        z_b, _ = self.map(np.array(1.0))
        da, db = abs(complex(z_a) - alpha), abs(complex(z_b) - alpha)
        return (0.0, da / self.length_scale()) if da <= db else (1.0, db / self.length_scale())

    def distance(self, alpha):
        _, dt = self.closest(alpha)
        return dt * self.length_scale()


@dataclass
class InvertedTail(Segment):
    """Horizontal half line ``z = i*offset + side*L/s``, ``s`` in (0, 1].

    ``side = +1`` covers ``[L, inf)``, ``side = -1`` covers ``(-inf, -L]``;
    both are oriented left to right.
    """

    offset: float
    L: float
    side: int
    t0: float = 0.0
    t1: float = 1.0

    def map(self, s):
        s = np.asarray(s, dtype=float)
        z = 1j * self.offset + self.side * self.L / s
        return z, (self.L / s**2).astype(complex)

    def closest(self, alpha):
        x = self.side * alpha.real
        if x <= self.L:
            return 1.0, abs(alpha - (1j * self.offset + self.side * self.L)) / self.L
        s = self.L / x
        d = abs(alpha.imag - self.offset)
        return s, d * s * s / self.L

    def distance(self, alpha):
        x = self.side * alpha.real
        if x <= self.L:
            return abs(alpha - (1j * self.offset + self.side * self.L))
        return abs(alpha.imag - self.offset)


@dataclass
class Ray(Segment):
    """``z = start + direction*t`` for ``t`` in [0, length].

    ``inbound=True`` reverses the orientation (the path arrives at ``start``
    from infinity).
    """

    start: complex
    direction: complex
    length: float
    inbound: bool = False

    def __post_init__(self):
        self.t0, self.t1 = 0.0, float(self.length)

    def map(self, t):
        jac = -self.direction if self.inbound else self.direction
        return self.start + self.direction * t, np.full(np.shape(t), jac, dtype=complex)

    def length_scale(self):
        return abs(self.direction)

    def closest(self, alpha):
        d = self.direction
        t = ((alpha - self.start) * d.conjugate()).real / abs(d) ** 2
        t = min(max(t, 0.0), self.length)
        return t, abs(self.start + d * t - alpha) / abs(d)

    def distance(self, alpha):
        t, dt = self.closest(alpha)
        return dt * abs(self.direction)


def path_distance(segments, alpha: complex) -> float:
    return min(seg.distance(alpha) for seg in segments)


def graded_breaks(t0: float, t1: float, focus: float, d: float, max_width: float) -> np.ndarray:
    """Breakpoints on [t0, t1], geometrically graded towards ``focus``.

    Panels adjacent to the focus have width ``d``; widths double moving away
    and are capped at ``max_width``.
    """
    pts = [t0, t1]
    if d < max_width:
        pts.append(focus)
        step = d
        for sgn in (-1.0, 1.0):
            pos, w = focus, step
            while True:
                pos = pos + sgn * w
                if not (t0 < pos < t1):
                    break
                pts.append(pos)
                w = min(2.0 * w, max_width)
                if w >= max_width:
                    break
    pts = np.unique(np.clip(np.asarray(pts), t0, t1))
    out = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        n = max(1, int(math.ceil((b - a) / max_width - 1e-12)))
        out.extend(a + (b - a) * np.arange(1, n + 1) / n)
    return np.asarray(out)


@dataclass
class Panel:
    seg: int
    a: float
    b: float


def panels_from_breaks(seg_index: int, breaks: np.ndarray) -> list[Panel]:
    return [Panel(seg_index, float(a), float(b)) for a, b in zip(breaks[:-1], breaks[1:]) if b > a]


@dataclass
class Rule:
    """Final nodes of a converged adaptive run, with the integrand samples."""

    z: np.ndarray
    w: np.ndarray  # includes the Jacobian
    fz: np.ndarray
    value: complex
    error: float
    evaluations: int
    panels: list = field(default_factory=list)


def _nodes(segments, panels: list[Panel], n: int):
    x, w = gauss_legendre(n)
    a = np.array([p.a for p in panels])
    b = np.array([p.b for p in panels])
    t = a[:, None] + (b - a)[:, None] * x[None, :]
    z = np.empty(t.shape, dtype=complex)
    jw = np.empty(t.shape, dtype=complex)
    segs = np.array([p.seg for p in panels])
    for s in np.unique(segs):
        rows = segs == s
        zz, jj = segments[s].map(t[rows])
        z[rows] = zz
        jw[rows] = jj * (b - a)[rows, None] * w[None, :]
    return z, jw


def adaptive_integrate(
    f,
    segments,
    panels: list[Panel],
    *,
    n: int = 10,
    tol_abs: float = 1e-13,
    tol_rel: float = 1e-11,
    budget: int = 20000,
    weight=None,
) -> Rule:
    """Globally adaptive composite Gauss-Legendre integration.

    Each panel is integrated with ``n`` and ``2n`` nodes; the difference is its
    error estimate. Panels whose error exceeds the per-panel share of the
    tolerance are bisected until the summed error meets
    ``max(tol_abs, tol_rel*|I|)``. ``weight`` multiplies ``f`` for the error
    estimate and the value, but the stored samples are ``f`` alone.

    Raises :class:`AccuracyError` carrying the best value once ``budget``
    function evaluations are spent.
    """
    pool: list[tuple[Panel, complex, float, np.ndarray, np.ndarray, np.ndarray]] = []
    evals = 0
    todo = list(panels)
    while True:
        if todo:
            zl, wl = _nodes(segments, todo, n)
            zh, wh = _nodes(segments, todo, 2 * n)
            zz = np.concatenate([zl.ravel(), zh.ravel()])
            fz = np.asarray(f(zz), dtype=complex)
            if fz.shape != zz.shape:
                fz = np.broadcast_to(fz, zz.shape).astype(complex)
            evals += zz.size
            fl = fz[: zl.size].reshape(zl.shape)
            fh = fz[zl.size :].reshape(zh.shape)
            if weight is not None:
                gl = fl * weight(zl)
                gh = fh * weight(zh)
            else:
                gl, gh = fl, fh
            il = np.sum(gl * wl, axis=1)
            ih = np.sum(gh * wh, axis=1)
            err = np.abs(ih - il)
            for k, p in enumerate(todo):
                pool.append((p, ih[k], float(err[k]), zh[k], wh[k], fh[k]))
            todo = []

        total = complex(sum(item[1] for item in pool))
        total_err = float(sum(item[2] for item in pool))
        tol = max(tol_abs, tol_rel * abs(total))
        if not math.isfinite(total_err) or not np.isfinite(total):
            raise AccuracyError("non-finite integrand on the contour", total, total_err)
        if total_err <= tol:
            break
        if evals >= budget:
            raise AccuracyError(
                f"quadrature did not converge within {budget} evaluations "
                f"(error estimate {total_err:.3e} > {tol:.3e})",
                total,
                total_err,
            )
        share = tol / len(pool)
        keep = []
        for item in pool:
            p = item[0]
            if item[2] > share and p.b - p.a > 1e-15 * max(1.0, abs(p.a), abs(p.b)):
                mid = 0.5 * (p.a + p.b)
                todo.append(Panel(p.seg, p.a, mid))
                todo.append(Panel(p.seg, mid, p.b))
            else:
                keep.append(item)
        if not todo:
            raise AccuracyError("panels cannot be refined further", total, total_err)
        pool = keep

    pool.sort(key=lambda item: (item[0].seg, item[0].a))
    return Rule(
        z=np.concatenate([item[3] for item in pool]),
        w=np.concatenate([item[4] for item in pool]),
        fz=np.concatenate([item[5] for item in pool]),
        value=total,
        error=total_err,
        evaluations=evals,
        panels=[item[0] for item in pool],
    )


def fixed_rule(segments, panels: list[Panel], n: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and Jacobian-weighted weights of a non-adaptive composite rule."""
    z, w = _nodes(segments, panels, n)
    return z.ravel(), w.ravel()


def refine(panels: list[Panel]) -> list[Panel]:
    out = []
    for p in panels:
        m = 0.5 * (p.a + p.b)
        out.extend([Panel(p.seg, p.a, m), Panel(p.seg, m, p.b)])
    return out
