"""Physical-space fields: incident wave, inverse transforms and grid diagnostics.

Inverse transforms ``(1/4 pi^2) int int S(alpha) exp(-i alpha.x) d alpha`` use a
tensor product of one-dimensional composite Gauss-Legendre rules. Beyond the
truncation ``[-L, L]`` each contour leaves the real line along a ray on which
``exp(-i alpha x)`` decays exponentially (into the lower half plane when
``x > 0``, the upper one when ``x < 0``), so the slowly decaying algebraic
tails of the spectra cost only a few panels. This requires the spectral
function to be analytic in the two sectors swept by the rays.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature as q
from .cauchy import ContourSpec, Indentation, Side, TailModel, body_segments
from .errors import AccuracyError, ConfigurationError, UsageError
from .kernel import WaveParams

FOUR_PI_SQ = 4.0 * math.pi**2


class Region(str, enum.Enum):
    Q1 = "Q1"
    Q2 = "Q2"
    Q3 = "Q3"
    Q4 = "Q4"
    FULL = "FULL"


class GammaMode(str, enum.Enum):
    ABSORBING = "ABSORBING"
    INDENTED = "INDENTED"


class Face(str, enum.Enum):
    X1_POSITIVE = "X1_POSITIVE"  # {x1 > 0, x2 = 0}
    X2_POSITIVE = "X2_POSITIVE"  # {x1 = 0, x2 > 0}


@dataclass(frozen=True)
class EdgeExpansion:
    """``phi ~ B + (A1 sin t + B1 cos t) r`` outside, primed constants inside."""

    B: complex
    A1: complex | None
    B1: complex | None
    A1p: complex | None
    B1p: complex | None
    fit_radius: float
    fit_residual: float

    def to_dict(self) -> dict:
        def c(v):
            return None if v is None else [v.real, v.imag]

        return {
            "B": c(self.B),
            "A1": c(self.A1),
            "B1": c(self.B1),
            "A1p": c(self.A1p),
            "B1p": c(self.B1p),
            "fit_radius": self.fit_radius,
            "fit_residual": self.fit_residual,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class FieldGrid:
    """Samples on the lattice ``x1 = (i1 + i) h``, ``x2 = (i2 + j) h``; ``values[j, i]``."""

    region: Region
    spacing: float
    i1: int
    i2: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "region", Region(self.region))
        vals = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", vals)
        if not self.spacing > 0:
            raise UsageError("grid spacing must be positive")
        if vals.ndim != 2 or vals.shape[0] < 2 or vals.shape[1] < 2:
            raise UsageError(f"grid must be at least 2x2, got shape {vals.shape}")

    @property
    def x1(self) -> np.ndarray:
        return (self.i1 + np.arange(self.values.shape[1])) * self.spacing

    @property
    def x2(self) -> np.ndarray:
        return (self.i2 + np.arange(self.values.shape[0])) * self.spacing

    @classmethod
    def sample(cls, region, spacing: float, i1_range, i2_range, func) -> "FieldGrid":
        """Grid from a vectorised ``func(x1, x2)`` over index ranges ``(start, stop)``."""
        i1 = np.arange(*i1_range)
        i2 = np.arange(*i2_range)
        X1, X2 = np.meshgrid(i1 * spacing, i2 * spacing)
        return cls(region, spacing, int(i1[0]), int(i2[0]), np.asarray(func(X1, X2), dtype=complex))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["x1", "x2", "re", "im"])
        for j, y in enumerate(self.x2):
            for i, x in enumerate(self.x1):
                v = self.values[j, i]
                w.writerow([repr(float(x)), repr(float(y)), repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "region": self.region.value,
            "spacing": self.spacing,
            "i1": self.i1,
            "i2": self.i2,
            "re": self.values.real.tolist(),
            "im": self.values.imag.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "FieldGrid":
        vals = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
        return cls(Region(d["region"]), float(d["spacing"]), int(d["i1"]), int(d["i2"]), vals)

    @classmethod
    def from_json(cls, text: str) -> "FieldGrid":
        return cls.from_dict(json.loads(text))


def incident_field(params: WaveParams, x1, x2=None):
    """``exp(-i (a1 x1 + a2 x2))``."""
    if x2 is None:
        x1, x2 = x1
    s = np.ndim(x1) == 0 and np.ndim(x2) == 0
    out = np.exp(-1j * (params.a1 * np.asarray(x1, dtype=float) + params.a2 * np.asarray(x2, dtype=float)))
    return complex(out) if s else out


def gamma_contour(params: WaveParams, mode, radius: float = 0.1) -> ContourSpec:
    """Integration line for the inverse transforms.

    ``ABSORBING``: the real axis, valid while ``Im k > 0`` keeps every
    singularity off it. ``INDENTED``: the real axis with semicircles over the
    real parts of ``a1``, ``-k1`` and ``-k2``, the points where the
    lower-half-plane singularities of a ``++`` spectrum land as the
    absorption vanishes; each arc passes above. Coincident points are merged.
    """
    mode = GammaMode(mode)
    L = 10.0 * max(abs(params.k1), abs(params.k2))
    if mode is GammaMode.ABSORBING:
        return ContourSpec(offset=0.0, truncation=L, tail_model=TailModel.DESCENT)
    if not radius > 0:
        raise ConfigurationError("indentation radius must be positive")
    centers = []
    for c in (params.a1.real, -params.k1.real, -params.k2.real):
        if all(abs(c - d) > 1e-12 for d in centers):
            centers.append(c)
    centers.sort()
    for c0, c1 in zip(centers[:-1], centers[1:]):
        if c1 - c0 <= 2 * radius:
            raise ConfigurationError(f"indentations at {c0:.4g} and {c1:.4g} overlap for radius {radius}")
    warnings = []
    im_k = max(params.k1.imag, params.k2.imag)
    if im_k > 10 * radius:
        warnings.append(
            f"Im(k)={im_k:.3g} exceeds 10*radius; the indentations do not track nearby singularities"
        )
    inds = tuple(Indentation(complex(c, 0.0), radius, Side.ABOVE) for c in centers)
    return ContourSpec(
        offset=0.0, truncation=L, tail_model=TailModel.DESCENT, indentations=inds, warnings=tuple(warnings)
    )


# --- one-dimensional transform rules -------------------------------------------------


def _ray_panels(x_min: float, x_max: float, w0: float) -> np.ndarray:
    """Breakpoints in ray length.

    Widths grow geometrically but stay below three oscillation lengths of the
    largest ``|x|`` whose factor ``exp(-t |x|)`` has not yet dropped below
    ``exp(-38)`` at that ray length.
    """
    T = 38.0 / x_min
    pts = [0.0]
    while pts[-1] < T:
        t = pts[-1]
        cap = max(3.0 / x_max, 3.0 * t / 38.0)
        pts.append(t + min(max(w0, 0.3 * t), cap))
    return np.asarray(pts)


def transform_rule(contour: ContourSpec, sign: int, x_min: float, x_max: float, *, n: int = 16, refine: bool = False):
    """Nodes and weights for ``int g(alpha) exp(-i alpha x) d alpha`` with ``sign(x) = sign``.

    ``x_min``/``x_max`` bound ``|x|`` over all points that will share the rule.
    """
    if contour.tail_model not in (TailModel.DESCENT, TailModel.NONE):
        raise UsageError(f"tail model {contour.tail_model.value} is not available for Fourier integrals")
    L = contour.truncation
    segs = body_segments(contour)
    w_body = min(0.5, 3.0 / max(x_max, 1e-12))
    panels = []
    for i, seg in enumerate(segs):
        span = seg.length_scale() * (seg.t1 - seg.t0)
        m = max(2 if isinstance(seg, q.Arc) else 1, int(math.ceil(span / w_body)))
        panels.extend(q.panels_from_breaks(i, np.linspace(seg.t0, seg.t1, m + 1)))
    if contour.tail_model is TailModel.DESCENT:
        if not x_min > 0:
            raise UsageError("x on a coordinate axis: the transform needs x1, x2 != 0 for descending tails")
        down = -1j if sign > 0 else 1j
        off = 1j * contour.offset
        breaks = _ray_panels(x_min, max(x_max, x_min), min(0.5, 3.0 / max(x_max, x_min)))
        for start, direction, inbound in ((L + off, 1 + down, False), (-L + off, -1 + down, True)):
            segs.append(q.Ray(start, direction, float(breaks[-1]), inbound=inbound))
            panels.extend(q.panels_from_breaks(len(segs) - 1, breaks))
    if refine:
        panels = q.refine(panels)
    return q.fixed_rule(segs, panels, n)


def _spectral_matrix(spectral, a1: np.ndarray, a2: np.ndarray) -> np.ndarray:
    S = np.asarray(spectral(a1[:, None], a2[None, :]), dtype=complex)
    return np.broadcast_to(S, (a1.size, a2.size))


def _transform_block(spectral, c1, c2, x1: np.ndarray, x2: np.ndarray, refine: bool):
    """``values[j, i]`` for ``x1`` and ``x2`` of fixed signs."""
    s1 = 1 if x1[0] > 0 else -1
    s2 = 1 if x2[0] > 0 else -1
    ax1, ax2 = np.abs(x1), np.abs(x2)
    n1, w1 = transform_rule(c1, s1, float(ax1.min()), float(ax1.max()), refine=refine)
    n2, w2 = transform_rule(c2, s2, float(ax2.min()), float(ax2.max()), refine=refine)
    S = _spectral_matrix(spectral, n1, n2)
    E1 = w1[None, :] * np.exp(-1j * x1[:, None] * n1[None, :])
    E2 = w2[None, :] * np.exp(-1j * x2[:, None] * n2[None, :])
    return (E2 @ S.T @ E1.T) / FOUR_PI_SQ


def _sign_groups(x: np.ndarray):
    pos = np.nonzero(x > 0)[0]
    neg = np.nonzero(x < 0)[0]
    zero = np.nonzero(x == 0)[0]
    return [g for g in (pos, neg, zero) if g.size]


def transform_grid(spectral, contour1: ContourSpec, contour2: ContourSpec, x1, x2, *, tol: float = 1e-6, check: bool = True):
    """Inverse transform on the tensor grid ``x1 x x2``; returns ``values[j, i]``.

    With ``check=True`` the result is recomputed on bisected panels and an
    :class:`AccuracyError` is raised if the two differ by more than ``tol``
    (relative to the largest value, absolute below 1).
    """
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    out = np.zeros((x2.size, x1.size), dtype=complex)
    err = 0.0
    for g1 in _sign_groups(x1):
        for g2 in _sign_groups(x2):
            if (x1[g1[0]] == 0 and contour1.tail_model is TailModel.DESCENT) or (
                x2[g2[0]] == 0 and contour2.tail_model is TailModel.DESCENT
            ):
                raise UsageError("x on a coordinate axis: the transform needs x1, x2 != 0 for descending tails")
            block = _transform_block(spectral, contour1, contour2, x1[g1], x2[g2], refine=False)
            if check:
                fine = _transform_block(spectral, contour1, contour2, x1[g1], x2[g2], refine=True)
                err = max(err, float(np.max(np.abs(fine - block))))
                block = fine
            out[np.ix_(g2, g1)] = block
    if check:
        scale = max(1.0, float(np.max(np.abs(out))))
        if err > tol * scale:
            raise AccuracyError(f"inverse transform error estimate {err:.2e} exceeds {tol:.1e}", out, err)
    return out


def inverse_transform(spectral, contour1: ContourSpec, contour2: ContourSpec, x1, x2=None, *, tol: float = 1e-6) -> complex:
    """``(1/4 pi^2) int int spectral(alpha) exp(-i alpha.x) d alpha`` over ``contour1 x contour2``."""
    if x2 is None:
        x1, x2 = x1
    return complex(transform_grid(spectral, contour1, contour2, [x1], [x2], tol=tol)[0, 0])


def forward_quarter_transform(field_fn, alpha1, alpha2, *, extent: float = 60.0, panels: int = 120, n: int = 16) -> complex:
    """``int int_{Q1} f(x) exp(i alpha.x) dx`` truncated to ``[0, extent]^2``.

    ``field_fn(x1_nodes, x2_nodes)`` must return the tensor grid
    ``values[j, i]``. Panels are graded towards the axes.
    """
    edges = extent * np.linspace(0.0, 1.0, panels + 1) ** 2
    x, w = q.gauss_legendre(n)
    a, b = edges[:-1], edges[1:]
    nodes = (a[:, None] + (b - a)[:, None] * x[None, :]).ravel()
    weights = ((b - a)[:, None] * w[None, :]).ravel()
    vals = np.asarray(field_fn(nodes, nodes), dtype=complex)
    e1 = weights * np.exp(1j * complex(alpha1) * nodes)
    e2 = weights * np.exp(1j * complex(alpha2) * nodes)
    return complex(e2 @ vals @ e1)


# --- grid diagnostics ---------------------------------------------------------------------


def _same_spacing(a: FieldGrid, b: FieldGrid):
    if not math.isclose(a.spacing, b.spacing, rel_tol=1e-12):
        raise UsageError("grids must share their spacing")


def _one_sided(rows: np.ndarray, h: float):
    """Value and outward derivative at the face from samples at distances h, 2h, 3h."""
    f1, f2, f3 = rows
    value = 3 * f1 - 3 * f2 + f3
    deriv = (-2.5 * f1 + 4 * f2 - 1.5 * f3) / h
    return value, deriv


def _band(grid: FieldGrid, axis: int, offsets) -> np.ndarray | None:
    coords = grid.x2 if axis == 0 else grid.x1
    idx = []
    for o in offsets:
        hit = np.nonzero(np.isclose(coords, o * grid.spacing, atol=1e-9 * grid.spacing))[0]
        if hit.size == 0:
            return None
        idx.append(int(hit[0]))
    return np.take(grid.values, idx, axis=axis)


def continuity_check(phi_grid: FieldGrid, psi_grid: FieldGrid, face) -> tuple[float, float]:
    """Largest jumps of value and normal derivative across a wedge face.

    ``psi_grid`` holds the field inside the quadrant ``x1, x2 > 0`` and
    ``phi_grid`` the field outside. Both sides are extrapolated to the face
    with one-sided quadratics through the three nearest lattice lines, so the
    face itself need not be sampled.
    """
    face = Face(face)
    _same_spacing(phi_grid, psi_grid)
    h = psi_grid.spacing
    axis = 0 if face is Face.X1_POSITIVE else 1
    inner = _band(psi_grid, axis, (1, 2, 3))
    outer = _band(phi_grid, axis, (-1, -2, -3))
    if inner is None or outer is None:
        raise UsageError(f"grids do not cover three lattice lines on each side of {face.value}")
    along_in = psi_grid.x1 if axis == 0 else psi_grid.x2
    along_out = phi_grid.x1 if axis == 0 else phi_grid.x2
    common = np.intersect1d(np.round(along_in / h).astype(int), np.round(along_out / h).astype(int))
    common = common[common > 0]
    if common.size == 0:
        raise UsageError("grids share no lattice points along the face")
    sel_in = np.searchsorted(np.round(along_in / h).astype(int), common)
    sel_out = np.searchsorted(np.round(along_out / h).astype(int), common)
    if axis == 0:
        inner, outer = inner[:, sel_in], outer[:, sel_out]
    else:
        inner, outer = inner[sel_in, :].T, outer[sel_out, :].T
    v_in, d_in = _one_sided(inner, h)
    v_out, d_out = _one_sided(outer, h)
    # d_in is d/dn into the quadrant; the outside derivative points the other way
    value_jump = float(np.max(np.abs(v_in - v_out)))
    deriv_jump = float(np.max(np.abs(d_in + d_out)))
    return value_jump, deriv_jump


def helmholtz_residual(grid: FieldGrid, k: complex) -> float:
    """``max |Laplacian_h u + k^2 u| / max |u|`` over interior nodes (5-point stencil)."""
    u = grid.values
    if u.shape[0] < 3 or u.shape[1] < 3:
        raise UsageError("Helmholtz residual needs at least a 3x3 grid")
    scale = float(np.max(np.abs(u)))
    if scale == 0.0:
        return 0.0
    h = grid.spacing
    lap = (u[1:-1, 2:] + u[1:-1, :-2] + u[2:, 1:-1] + u[:-2, 1:-1] - 4 * u[1:-1, 1:-1]) / h**2
    return float(np.max(np.abs(lap + complex(k) ** 2 * u[1:-1, 1:-1])) / scale)


def edge_expansion_fit(grid: FieldGrid, fit_radius: float) -> EdgeExpansion:
    """Least-squares tip constants from samples with ``2h <= r <= fit_radius``.

    Model ``B + A x2 + C x1`` (``r sin t = x2``, ``r cos t = x1``) with the quadratic and
    cubic monomials as nuisance terms. A ``Q1`` grid yields the interior
    constants ``A1p``, ``B1p``; any other region the exterior ``A1``, ``B1``
    (a ``FULL`` grid contributes only its points outside the open quadrant).
    """
    if not fit_radius > 0:
        raise UsageError("fit_radius must be positive")
    X1, X2 = np.meshgrid(grid.x1, grid.x2)
    r = np.hypot(X1, X2)
    mask = (r >= 2 * grid.spacing - 1e-12) & (r <= fit_radius)
    if grid.region is Region.FULL:
        mask &= ~((X1 > 0) & (X2 > 0))
    angles = np.unique(np.round(np.arctan2(X2[mask], X1[mask]), 9))
    if angles.size < 16:
        raise UsageError(f"only {angles.size} distinct angles within fit_radius; need at least 16")
    x1, x2, u = X1[mask], X2[mask], grid.values[mask]
    cols = [np.ones_like(x1), x2, x1, x1 * x1, x1 * x2, x2 * x2]
    cols += [x1**3, x1 * x1 * x2, x1 * x2 * x2, x2**3]
    A = np.stack(cols, axis=1).astype(complex)
    coef, *_ = np.linalg.lstsq(A, u, rcond=None)
    resid = float(np.sqrt(np.mean(np.abs(A @ coef - u) ** 2)))
    B, A_, C = complex(coef[0]), complex(coef[1]), complex(coef[2])
    if grid.region is Region.Q1:
        return EdgeExpansion(B, None, None, A_, C, float(fit_radius), resid)
    return EdgeExpansion(B, A_, C, None, None, float(fit_radius), resid)


def tip_energy(grid: FieldGrid, radius: float) -> float:
    """Discrete ``int_{r <= radius} |grad u|^2 + |u|^2`` using centred differences."""
    u = grid.values
    h = grid.spacing
    gx = (u[1:-1, 2:] - u[1:-1, :-2]) / (2 * h)
    gy = (u[2:, 1:-1] - u[:-2, 1:-1]) / (2 * h)
    X1, X2 = np.meshgrid(grid.x1[1:-1], grid.x2[1:-1])
    mask = np.hypot(X1, X2) <= radius
    dens = np.abs(gx) ** 2 + np.abs(gy) ** 2 + np.abs(u[1:-1, 1:-1]) ** 2
    return float(np.sum(dens[mask]) * h * h)
