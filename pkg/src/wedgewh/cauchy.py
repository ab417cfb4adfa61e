"""Cauchy-integral sum-splits, multiplicative factorisation and the kernel factors.

For a function ``f`` analytic on a horizontal strip and decaying at both
ends, the plus part at ``alpha`` is ``(1/2 pi i) * int f(z)/(z - alpha) dz`` on
a line below ``alpha`` and the minus part is ``-(1/2 pi i)`` times the same
integral on a line above it; the two add up to ``f(alpha)``. Factorisation
applies the same split to ``mylog(g)`` and exponentiates.

Kernel factors ``K--``, ``K-+``, ``K+-``, ``K++`` come from factorising
``K-circ`` and ``K+circ`` in the alpha2 plane with alpha1 frozen. Their
quadrature rules depend only on ``(params, alpha1, contour)``, so they are
built once and reused for every alpha2.
"""

from __future__ import annotations

import enum
import json
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from . import quadrature as q
from .complexfn import mylog
from .errors import (
    AccuracyError,
    BranchCrossingError,
    ConfigurationError,
    ProximityError,
    UsageError,
)
from .kernel import K_minus_circ, K_plus_circ, WaveParams, log_K_circ

TWO_PI_I = 2j * math.pi


class Sign(str, enum.Enum):
    PLUS = "PLUS"
    MINUS = "MINUS"


class Plane(str, enum.Enum):
    ALPHA1 = "ALPHA1"
    ALPHA2 = "ALPHA2"


class TailModel(str, enum.Enum):
    NONE = "NONE"
    RECIPROCAL = "RECIPROCAL"
    MAPPED = "MAPPED"
    DESCENT = "DESCENT"


class Side(str, enum.Enum):
    ABOVE = "ABOVE"
    BELOW = "BELOW"


class Factor(str, enum.Enum):
    MM = "MM"
    MP = "MP"
    PM = "PM"
    PP = "PP"


@dataclass(frozen=True)
class Indentation:
    center: complex
    radius: float
    side: Side

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "side", Side(self.side))
        if not self.radius > 0:
            raise ConfigurationError(f"indentation radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class ContourSpec:
    """The line ``R + i*offset`` on ``[-truncation, truncation]`` plus tails and indentations.

    ``MAPPED`` tails integrate the two half lines beyond the truncation
    exactly through ``z = +-L/s``. ``RECIPROCAL`` fits ``c/z`` at the ends and
    adds the closed-form tail. ``NONE`` truncates. ``DESCENT`` is only
    meaningful for oscillatory Fourier integrals and is handled there.
    """

    offset: float = 0.0
    truncation: float = 30.0
    node_budget: int = 40000
    tail_model: TailModel = TailModel.MAPPED
    indentations: tuple[Indentation, ...] = ()
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tail_model", TailModel(self.tail_model))
        object.__setattr__(self, "indentations", tuple(self.indentations))
        if not self.truncation > 0:
            raise ConfigurationError("truncation must be positive")
        if int(self.node_budget) <= 0:
            raise ConfigurationError("node_budget must be a positive integer")

    @classmethod
    def for_params(cls, params: WaveParams, offset: float, **kw) -> "ContourSpec":
        kw.setdefault("truncation", default_truncation(params))
        return cls(offset=offset, **kw)

    def to_dict(self) -> dict:
        return {
            "offset": self.offset,
            "truncation": self.truncation,
            "node_budget": int(self.node_budget),
            "tail_model": self.tail_model.value,
            "indentations": [
                {"center": [i.center.real, i.center.imag], "radius": i.radius, "side": i.side.value}
                for i in self.indentations
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "ContourSpec":
        try:
            inds = tuple(
                Indentation(complex(*d["center"]), float(d["radius"]), Side(d["side"]))
                for d in data.get("indentations", [])
            )
            return cls(
                offset=float(data["offset"]),
                truncation=float(data["truncation"]),
                node_budget=int(data["node_budget"]),
                tail_model=TailModel(data.get("tail_model", "MAPPED")),
                indentations=inds,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed contour: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "ContourSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class Function1D:
    """A vectorised callable together with the strip on which it is analytic."""

    func: object
    strip: tuple[float, float] = (-math.inf, math.inf)

    def __call__(self, z):
        return self.func(z)


def default_truncation(params: WaveParams) -> float:
    return 10.0 * max(abs(params.k1), abs(params.k2))


def body_segments(spec: ContourSpec) -> list[q.Segment]:
    """Line pieces and indentation arcs of ``[-L, L] + i*offset``, left to right."""
    off, L = spec.offset, spec.truncation
    cuts = []
    for ind in spec.indentations:
        h = off - ind.center.imag
        if abs(h) >= ind.radius:
            continue
        half = math.sqrt(ind.radius**2 - h * h)
        xl, xr = ind.center.real - half, ind.center.real + half
        if xl <= -L or xr >= L:
            raise ConfigurationError(f"indentation at {ind.center} reaches the truncation ends")
        cuts.append((xl, xr, ind))
    cuts.sort(key=lambda c: c[0])
    for (_, r0, i0), (l1, _, i1) in zip(cuts[:-1], cuts[1:]):
        if l1 <= r0:
            raise ConfigurationError(f"indentations at {i0.center} and {i1.center} overlap")

    segs: list[q.Segment] = []
    x = -L
    for xl, xr, ind in cuts:
        segs.append(q.Line(complex(x, off), complex(xl, off)))
        c = ind.center
        th_l = math.atan2(off - c.imag, xl - c.real)
        th_r = math.atan2(off - c.imag, xr - c.real)
        if ind.side is Side.ABOVE:
            while th_r >= th_l:
                th_r -= 2 * math.pi
        else:
            while th_r <= th_l:
                th_r += 2 * math.pi
        segs.append(q.Arc(c, ind.radius, th_l, th_r))
        x = xr
    segs.append(q.Line(complex(x, off), complex(L, off)))
    return segs


def contour_segments(spec: ContourSpec) -> list[q.Segment]:
    segs = body_segments(spec)
    if spec.tail_model is TailModel.MAPPED:
        segs = [q.InvertedTail(spec.offset, spec.truncation, -1)] + segs
        segs.append(q.InvertedTail(spec.offset, spec.truncation, +1))
    return segs


def initial_panels(segments, alpha=None, max_width: float = 1.0) -> list[q.Panel]:
    """Starting panels, graded geometrically towards the point nearest ``alpha``."""
    panels = []
    for i, seg in enumerate(segments):
        if isinstance(seg, q.InvertedTail):
            wpar = 0.25
        else:
            wpar = (seg.t1 - seg.t0) * min(1.0, max_width / max(seg.length_scale() * (seg.t1 - seg.t0), 1e-300))
        if alpha is not None:
            t, dpar = seg.closest(complex(alpha))
            breaks = q.graded_breaks(seg.t0, seg.t1, t, max(dpar, 1e-14), wpar)
        else:
            breaks = q.graded_breaks(seg.t0, seg.t1, seg.t0, wpar, wpar)
        panels.extend(q.panels_from_breaks(i, breaks))
    return panels


def _dense_path_samples(segments, n_line: int = 2000) -> np.ndarray:
    pieces = []
    for seg in segments:
        if isinstance(seg, q.InvertedTail):
            s = np.linspace(1e-3, 1.0, 200)
            z, _ = seg.map(s if seg.side < 0 else s[::-1])
        elif isinstance(seg, q.Arc):
            z, _ = seg.map(np.linspace(0.0, 1.0, 200))
        else:
            z, _ = seg.map(np.linspace(seg.t0, seg.t1, n_line))
        pieces.append(np.atleast_1d(z))
    return np.concatenate(pieces)


def _decay_guard(f, spec: ContourSpec) -> float:
    """Return a magnitude scale of ``f`` on the contour; refuse non-decaying integrands."""
    L = spec.truncation
    xs = np.linspace(-L, L, 65) + 1j * spec.offset
    scale = float(np.max(np.abs(np.asarray(f(xs), dtype=complex))))
    if scale == 0.0:
        return 0.0
    far = 1e4 * max(L, 1.0)
    tails = np.abs(np.asarray(f(np.array([-far, far]) + 1j * spec.offset), dtype=complex))
    if not np.all(np.isfinite(tails)) or np.max(tails) > 1e-3 * scale:
        raise AccuracyError(
            "integrand does not decay along the contour; the sum-split needs f -> 0 at both ends",
            None,
            math.inf,
        )
    return scale


def _reciprocal_tail(f, spec: ContourSpec, alpha: complex) -> complex:
    """Closed-form tail integrals of (c/z)/(z - alpha) beyond +-L."""
    zr = complex(spec.truncation, spec.offset)
    zl = complex(-spec.truncation, spec.offset)
    cr = complex(np.asarray(f(np.array([zr])))[0]) * zr
    cl = complex(np.asarray(f(np.array([zl])))[0]) * zl

    def g(u):
        # log(1 - u) / (-u), continuous at u = 0
        return 1.0 if abs(u) < 1e-300 else complex(np.log(1 - u) / (-u))

    right = cr / zr * g(alpha / zr)
    left = -cl / zl * g(alpha / zl)
    return right + left


def _as_callable(f):
    return f.func if isinstance(f, Function1D) else f


def cauchy_integral(
    f,
    contour: ContourSpec,
    alpha: complex,
    sign,
    *,
    tol_rel: float = 1e-11,
    tol_abs: float = 1e-13,
) -> QuadratureResult:
    """``+(1/2 pi i) int f/(z - alpha)`` for PLUS, ``-(1/2 pi i) int f/(z - alpha)`` for MINUS.

    The caller chooses the contour: below ``alpha`` for PLUS and above it for
    MINUS. ``f`` must accept numpy arrays.
    """
    sign = Sign(sign)
    if contour.tail_model is TailModel.DESCENT:
        raise UsageError("DESCENT tails apply to Fourier integrals, not Cauchy integrals")
    fun = _as_callable(f)
    alpha = complex(alpha)
    if isinstance(f, Function1D):
        lo, hi = f.strip
        if not lo < contour.offset < hi:
            raise UsageError(f"contour offset {contour.offset} outside the declared strip {f.strip}")

    segs = contour_segments(contour)
    d = q.path_distance(segs, alpha)
    if d <= 1e-9 * (1.0 + abs(alpha)):
        raise ProximityError(f"alpha={alpha} lies on the contour (distance {d:.2e})")

    scale = _decay_guard(fun, contour)
    pref = 1.0 / TWO_PI_I if sign is Sign.PLUS else -1.0 / TWO_PI_I
    if scale == 0.0:
        return QuadratureResult(0j, 0.0, 65)

    def integrand(z):
        return np.asarray(fun(z), dtype=complex) / (z - alpha)

    panels = initial_panels(segs, alpha, max_width=1.0)
    rule = q.adaptive_integrate(
        integrand,
        segs,
        panels,
        tol_abs=tol_abs * 2 * math.pi,
        tol_rel=tol_rel,
        budget=int(contour.node_budget),
    )
    value = rule.value
    if contour.tail_model is TailModel.RECIPROCAL:
        value += _reciprocal_tail(fun, contour, alpha)
    return QuadratureResult(pref * value, rule.error / (2 * math.pi), rule.evaluations + 67)


def _point(alpha, alpha2=None) -> tuple[complex, complex]:
    if alpha2 is not None:
        return complex(alpha), complex(alpha2)
    a1, a2 = alpha
    return complex(a1), complex(a2)


def auto_offset(params: WaveParams, sign, im_alpha: float, strip=None) -> float:
    """Default contour offset: ``-eps/2`` below (PLUS) or ``+eps/2`` above (MINUS),
    pushed further away when the target is within ``eps/4`` of that line."""
    sign = Sign(sign)
    eps = params.eps
    lo, hi = strip if strip is not None else (-eps, eps)
    if sign is Sign.PLUS:
        c = -eps / 2 if im_alpha >= -eps / 4 else (im_alpha + lo) / 2
        if not c > lo:
            raise UsageError("target below the analyticity strip; pass an explicit contour")
    else:
        c = eps / 2 if im_alpha <= eps / 4 else (im_alpha + hi) / 2
        if not c < hi:
            raise UsageError("target above the analyticity strip; pass an explicit contour")
    return c


def bracket(
    F,
    plane,
    sign,
    params: WaveParams,
    alpha,
    contour: ContourSpec | None = None,
    *,
    strip=None,
    tol_rel: float = 1e-11,
    tol_abs: float = 1e-13,
) -> QuadratureResult:
    """Plus or minus part of ``F(alpha1, alpha2)`` in one plane, the other variable frozen."""
    plane = Plane(plane)
    a1, a2 = _point(alpha)
    if plane is Plane.ALPHA1:
        target = a1

        def f(z):
            return F(z, np.full(np.shape(z), a2))
    else:
        target = a2

        def f(z):
            return F(np.full(np.shape(z), a1), z)

    if contour is None:
        contour = ContourSpec.for_params(params, auto_offset(params, sign, target.imag, strip))
    return cauchy_integral(f, contour, target, sign, tol_rel=tol_rel, tol_abs=tol_abs)


def winding_check(values: np.ndarray, what: str = "mylog(g)") -> None:
    jumps = np.abs(np.diff(np.asarray(values).imag))
    if jumps.size and np.max(jumps) >= math.pi:
        k = int(np.argmax(jumps))
        raise BranchCrossingError(f"{what} jumps by {jumps[k]:.3f} along the contour (sample {k})")


def factorize_log(
    g,
    contour_low: ContourSpec,
    contour_high: ContourSpec,
    alpha: complex,
    *,
    tol_rel: float = 1e-12,
    tol_abs: float = 1e-14,
) -> tuple[complex, complex]:
    """``(g_plus(alpha), g_minus(alpha))`` with ``g = g_plus * g_minus`` between the contours."""
    fun = _as_callable(g)

    def lg(z):
        return mylog(np.asarray(fun(z), dtype=complex))

    for spec in (contour_low, contour_high):
        winding_check(lg(_dense_path_samples(contour_segments(spec))))
    plus = cauchy_integral(lg, contour_low, alpha, Sign.PLUS, tol_rel=tol_rel, tol_abs=tol_abs)
    minus = cauchy_integral(lg, contour_high, alpha, Sign.MINUS, tol_rel=tol_rel, tol_abs=tol_abs)
    return complex(np.exp(plus.value)), complex(np.exp(minus.value))


# --- kernel factors -----------------------------------------------------------

_CIRC = {"P": K_plus_circ, "M": K_minus_circ}


class _RuleCache:
    """Bounded LRU of density rules; safe for concurrent use."""

    def __init__(self, maxsize: int = 256):
        self.maxsize = maxsize
        self._data: OrderedDict = OrderedDict()
        self._lock = threading.Lock()

    def get(self, key):
        with self._lock:
            val = self._data.get(key)
            if val is not None:
                self._data.move_to_end(key)
            return val

    def put(self, key, val):
        with self._lock:
            self._data[key] = val
            self._data.move_to_end(key)
            while len(self._data) > self.maxsize:
                self._data.popitem(last=False)

    def clear(self):
        with self._lock:
            self._data.clear()

    def __len__(self):
        return len(self._data)


_rule_cache = _RuleCache()


def clear_cache() -> None:
    _rule_cache.clear()


def _rkey(x: complex) -> tuple[float, float]:
    return (round(x.real, 12), round(x.imag, 12))


def _density(params: WaveParams, circ: str, a1: complex):
    s = "+" if circ == "P" else "-"

    def g(z):
        return log_K_circ(params, s, np.full(np.shape(z), a1), z)

    return g


def _density_rule(params: WaveParams, circ: str, a1: complex, offset: float):
    key = (params, circ, _rkey(a1), round(offset, 14))
    hit = _rule_cache.get(key)
    if hit is not None:
        return hit
    g = _density(params, circ, a1)
    spec = ContourSpec.for_params(params, offset)
    segs = contour_segments(spec)
    winding_check(g(_dense_path_samples(segs)), what=f"mylog(K{circ}circ)")
    panels = initial_panels(segs, None, max_width=min(params.eps / 2, 1.0))
    rule = q.adaptive_integrate(g, segs, panels, tol_abs=1e-15, tol_rel=1e-13, budget=400000)
    entry = (rule.z, rule.w * rule.fz)
    _rule_cache.put(key, entry)
    return entry


def _direct(params, circ, a1, targets, upper: bool) -> np.ndarray:
    """exp of the split of mylog(K circ) at targets well away from the contour."""
    eps = params.eps
    offset = eps / 2 if upper else -eps / 2
    pref = -1.0 / TWO_PI_I if upper else 1.0 / TWO_PI_I
    L = default_truncation(params)
    out = np.empty(targets.shape, dtype=complex)
    far = (np.abs(targets.real) > 0.9 * L) & (np.abs(targets.imag - offset) < 0.5 * np.abs(targets.real))
    near = ~far
    if np.any(near):
        z, wg = _density_rule(params, circ, a1, offset)
        t = targets[near]
        vals = np.empty(t.shape, dtype=complex)
        for start in range(0, t.size, 128):
            blk = t[start : start + 128]
            vals[start : start + 128] = np.sum(wg[None, :] / (z[None, :] - blk[:, None]), axis=1)
        out[near] = np.exp(pref * vals)
    if np.any(far):
        spec = ContourSpec.for_params(params, offset, node_budget=400000)
        g = _density(params, circ, a1)
        sign = Sign.MINUS if upper else Sign.PLUS
        out[far] = [
            np.exp(cauchy_integral(g, spec, complex(a), sign, tol_rel=1e-13, tol_abs=1e-15).value)
            for a in targets[far]
        ]
    return out


def _factor_row(params: WaveParams, which: Factor, a1: complex, a2: np.ndarray) -> np.ndarray:
    circ, part = which.value[0], which.value[1]
    eps = params.eps
    out = np.empty(a2.shape, dtype=complex)
    if part == "P":
        direct = a2.imag >= -eps / 4
        out[direct] = _direct(params, circ, a1, a2[direct], upper=False)
        rest = ~direct
        if np.any(rest):
            t = a2[rest]
            out[rest] = _CIRC[circ](params, np.full(t.shape, a1), t) / _direct(params, circ, a1, t, upper=True)
    else:
        direct = a2.imag <= eps / 4
        out[direct] = _direct(params, circ, a1, a2[direct], upper=True)
        rest = ~direct
        if np.any(rest):
            t = a2[rest]
            out[rest] = _CIRC[circ](params, np.full(t.shape, a1), t) / _direct(params, circ, a1, t, upper=False)
    return out


def K_factor(params: WaveParams, which, alpha1, alpha2=None):
    """One of ``K--``, ``K-+``, ``K+-``, ``K++`` at ``(alpha1, alpha2)``.

    The first letter picks ``K-circ``/``K+circ``; the second picks the minus
    part (contour at ``+eps/2``) or plus part (contour at ``-eps/2``) in the
    alpha2 plane. Beyond the far side of its own contour a factor is
    continued analytically as ``K circ`` divided by its complementary factor.
    Accepts broadcastable arrays.
    """
    which = Factor(which)
    if alpha2 is None:
        alpha1, alpha2 = alpha1
    scalar = np.ndim(alpha1) == 0 and np.ndim(alpha2) == 0
    a1, a2 = np.broadcast_arrays(np.asarray(alpha1, dtype=complex), np.asarray(alpha2, dtype=complex))
    flat1, flat2 = a1.ravel(), a2.ravel()
    out = np.empty(flat1.shape, dtype=complex)
    for v in np.unique(flat1):
        rows = flat1 == v
        out[rows] = _factor_row(params, which, complex(v), flat2[rows])
    out = out.reshape(a1.shape)
    return complex(out) if scalar else out


def K_factor_reference(
    params: WaveParams, which, alpha1: complex, alpha2: complex, *, offset: float | None = None, budget: int = 160000
) -> complex:
    """Independent route to :func:`K_factor`: one adaptive Cauchy integral per target.

    Instead of continuing analytically past its own contour, the contour is
    moved: halfway between ``alpha2`` and the strip edge when ``alpha2`` is
    within ``eps/4`` of the default line. Valid for plus factors with
    ``Im alpha2 > -eps`` and minus factors with ``Im alpha2 < eps``.
    """
    which = Factor(which)
    alpha2 = complex(alpha2)
    sign = Sign.PLUS if which.value[1] == "P" else Sign.MINUS
    if offset is None:
        offset = auto_offset(params, sign, alpha2.imag)
    g = _density(params, which.value[0], complex(alpha1))
    spec = ContourSpec.for_params(params, offset, node_budget=budget)
    res = cauchy_integral(g, spec, alpha2, sign, tol_rel=1e-13, tol_abs=1e-15)
    return complex(np.exp(res.value))
