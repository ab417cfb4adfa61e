"""Branch-cut-controlled elementary functions and region predicates.

Two cut conventions are used throughout the package:

* ``mysqrt`` cuts along the positive real axis and takes ``mysqrt(-1) = i``,
  so its imaginary part is non-negative everywhere.
* ``mylog`` cuts along the ray ``arg z = -3*pi/4`` and returns arguments in
  ``(-3*pi/4, 5*pi/4]``.

All functions accept scalars or numpy arrays and broadcast.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UsageError

def _unsigned(w):
    # -0.0 + 0.0 == +0.0: removes signed zeros so the cut value is deterministic
    return w + (0.0 + 0.0j)


def _result(out, scalar: bool):
    return complex(out) if scalar else out


def mysqrt(z):
    """Square root with cut on the positive real axis and ``mysqrt(-1) = i``.

    On the cut the value is the one delivered by ``i*sqrt(-z)`` with an
    unsigned zero imaginary part, e.g. ``mysqrt(4) == -2``.
    """
    scalar = np.ndim(z) == 0
    w = _unsigned(-np.asarray(z, dtype=complex))
    return _result(1j * np.sqrt(w), scalar)


def mylog(z):
    """Logarithm with cut along ``arg z = -3*pi/4``.

    Raises :class:`DomainError` if any element of ``z`` is zero.
    """
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("mylog is undefined at z = 0")
    out = np.log(_unsigned(z))
    # move arguments in (-pi, -3pi/4] up by 2pi; done on the principal argument
    # itself so points on the cut ray land on 5pi/4 without rounding noise
    out = np.where(out.imag <= -0.75 * np.pi, out + 2j * np.pi, out)
    return _result(out, scalar)


def kappa(k, z):
    """``mysqrt(k**2 - z**2)``; the sheet with ``kappa(k, 0) = k``.

    Requires ``Re k > 0`` and ``Im k > 0``. Branch cuts start at ``z = +-k``.
    """
    k = complex(k)
    if not (k.real > 0 and k.imag > 0):
        raise DomainError(f"kappa needs Re(k) > 0 and Im(k) > 0, got k={k!r}")
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    return _result(mysqrt(k * k - z * z), scalar)


class RegionKind(str, enum.Enum):
    UHP = "UHP"
    LHP = "LHP"
    STRIP = "STRIP"
    D_PP = "D++"
    D_PM = "D+-"
    D_MM = "D--"
    D_MP = "D-+"
    D_PCIRC = "D+circ"
    D_MCIRC = "D-circ"
    D_CIRCP = "Dcirc+"
    D_CIRCM = "Dcirc-"


_SCALAR_KINDS = {RegionKind.UHP, RegionKind.LHP, RegionKind.STRIP}
_STRIP_KINDS = {
    RegionKind.STRIP,
    RegionKind.D_PCIRC,
    RegionKind.D_MCIRC,
    RegionKind.D_CIRCP,
    RegionKind.D_CIRCM,
}


@dataclass(frozen=True)
class RegionSpec:
    """An open region of C or C^2 described by two imaginary-part offsets.

    Half planes use ``kappa1`` only. Product regions ``D++``, ``D+-``,
    ``D--``, ``D-+`` apply ``kappa1`` to the first and ``kappa2`` to the second
    variable. The circ regions pair a half plane with the strip
    ``S(kappa1, kappa2)``: ``D+circ = UHP(kappa1) x S``, ``D-circ = LHP(kappa2)
    x S``, ``Dcirc+ = S x UHP(kappa1)``, ``Dcirc- = S x LHP(kappa2)``; with
    ``(kappa1, kappa2) = (-eps, eps)`` these are the usual ``UHP(-eps)`` and
    ``LHP(eps)`` conventions.
    """

    kind: RegionKind
    kappa1: float = 0.0
    kappa2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", RegionKind(self.kind))
        if self.kind in _STRIP_KINDS and not self.kappa1 < self.kappa2:
            raise UsageError(f"{self.kind.value} needs kappa1 < kappa2")

    @property
    def dimension(self) -> int:
        return 1 if self.kind in _SCALAR_KINDS else 2


def _uhp(y, c):
    return y > c


def _lhp(y, c):
    return y < c


def _strip(y, c1, c2):
    return (y > c1) & (y < c2)


def region_contains(region: RegionSpec, point) -> bool:
    """True iff ``point`` lies in the open region.

    ``point`` is a complex number for UHP/LHP/STRIP and a pair
    ``(alpha1, alpha2)`` for the product regions.
    """
    is_pair = isinstance(point, (tuple, list)) or np.ndim(point) == 1
    if region.dimension == 1:
        if is_pair:
            raise UsageError(f"{region.kind.value} is a region of C, got a pair")
        y = complex(point).imag
        c1, c2 = region.kappa1, region.kappa2
        if region.kind is RegionKind.UHP:
            return bool(_uhp(y, c1))
        if region.kind is RegionKind.LHP:
            return bool(_lhp(y, c1))
        return bool(_strip(y, c1, c2))

    if not is_pair or len(point) != 2:
        raise UsageError(f"{region.kind.value} is a region of C^2, expected a pair")
    y1, y2 = complex(point[0]).imag, complex(point[1]).imag
    c1, c2 = region.kappa1, region.kappa2
    k = region.kind
    if k is RegionKind.D_PP:
        ok = _uhp(y1, c1) and _uhp(y2, c2)
    elif k is RegionKind.D_PM:
        ok = _uhp(y1, c1) and _lhp(y2, c2)
    elif k is RegionKind.D_MM:
        ok = _lhp(y1, c1) and _lhp(y2, c2)
    elif k is RegionKind.D_MP:
        ok = _lhp(y1, c1) and _uhp(y2, c2)
    elif k is RegionKind.D_PCIRC:
        ok = _uhp(y1, c1) and _strip(y2, c1, c2)
    elif k is RegionKind.D_MCIRC:
        ok = _lhp(y1, c2) and _strip(y2, c1, c2)
    elif k is RegionKind.D_CIRCP:
        ok = _strip(y1, c1, c2) and _uhp(y2, c1)
    else:
        ok = _strip(y1, c1, c2) and _lhp(y2, c2)
    return bool(ok)
