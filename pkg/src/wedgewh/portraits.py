"""Phase portraits: colour each point of a window by the argument of f.

Hue encodes the phase, ``(phase + pi) / 2 pi``, at full saturation and value;
pixels where ``f`` could not be evaluated are black. Discontinuities of ``f``
(branch cuts, jumps) show up as seams where neighbouring phases differ by more
than continuity allows; :func:`discontinuity_detect` finds them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import UsageError


@dataclass(frozen=True)
class PhaseRaster:
    """``phase[row, col]``, row 0 at ``im_max``; ``failures`` holds ``(row, col)`` pairs."""

    window: tuple[float, float, float, float]
    width: int
    height: int
    phase: np.ndarray = field(repr=False)
    modulus: np.ndarray = field(repr=False)
    failures: frozenset = frozenset()

    def pixel_center(self, row: int, col: int) -> complex:
        re_min, re_max, im_min, im_max = self.window
        x = re_min + (col + 0.5) * (re_max - re_min) / self.width
        y = im_max - (row + 0.5) * (im_max - im_min) / self.height
        return complex(x, y)


def pixel_grid(window, width: int, height: int) -> np.ndarray:
    re_min, re_max, im_min, im_max = window
    x = re_min + (np.arange(width) + 0.5) * (re_max - re_min) / width
    y = im_max - (np.arange(height) + 0.5) * (im_max - im_min) / height
    return x[None, :] + 1j * y[:, None]


def _phase(w: np.ndarray) -> np.ndarray:
    ph = np.angle(w)
    # angle() returns -pi for negative reals with a -0.0 imaginary part
    return np.where(ph == -math.pi, math.pi, ph)


def render(f, window, width: int, height: int) -> PhaseRaster:
    """Sample ``f`` at pixel centres; per-pixel failures are recorded, never raised."""
    width, height = int(width), int(height)
    if width < 16 or height < 16:
        raise UsageError(f"raster must be at least 16x16, got {width}x{height}")
    re_min, re_max, im_min, im_max = (float(v) for v in window)
    if not (re_max > re_min and im_max > im_min):
        raise UsageError(f"degenerate window {window}")
    z = pixel_grid((re_min, re_max, im_min, im_max), width, height)
    try:
        with np.errstate(all="ignore"):
            w = np.asarray(f(z), dtype=complex)
        if w.shape != z.shape:
            raise ValueError("shape mismatch")
    except Exception:
        w = np.empty(z.shape, dtype=complex)
        for idx in np.ndindex(z.shape):
            try:
                with np.errstate(all="ignore"):
                    w[idx] = complex(f(complex(z[idx])))
            except Exception:
                w[idx] = complex(math.nan, math.nan)
    bad = ~np.isfinite(w)
    failures = frozenset((int(r), int(c)) for r, c in zip(*np.nonzero(bad)))
    phase = _phase(np.where(bad, 1.0, w))
    modulus = np.abs(np.where(bad, 0.0, w))
    phase[bad] = 0.0
    return PhaseRaster((re_min, re_max, im_min, im_max), width, height, phase, modulus, failures)


def hue_to_rgb(h: np.ndarray) -> np.ndarray:
    """HSV with S = V = 1 to RGB in [0, 1]; ``h`` in [0, 1]."""
    h6 = (np.asarray(h, dtype=float) % 1.0) * 6.0
    sector = np.floor(h6).astype(int) % 6
    f = h6 - np.floor(h6)
    one, zero = np.ones_like(f), np.zeros_like(f)
    q, t = 1.0 - f, f
    table = [
        (one, t, zero),
        (q, one, zero),
        (zero, one, t),
        (zero, q, one),
        (t, zero, one),
        (one, zero, q),
    ]
    rgb = np.zeros(f.shape + (3,))
    for s, (r, g, b) in enumerate(table):
        m = sector == s
        rgb[m, 0], rgb[m, 1], rgb[m, 2] = r[m], g[m], b[m]
    return rgb


def rgb_to_hue(rgb: np.ndarray) -> np.ndarray:
    """Inverse of :func:`hue_to_rgb` for fully saturated colours."""
    rgb = np.asarray(rgb, dtype=float)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = np.max(rgb, axis=-1)
    mn = np.min(rgb, axis=-1)
    d = np.where(mx - mn == 0, 1.0, mx - mn)
    h = np.where(
        mx == r, ((g - b) / d) % 6.0, np.where(mx == g, (b - r) / d + 2.0, (r - g) / d + 4.0)
    )
    return h / 6.0


def raster_rgb(raster: PhaseRaster, shade: bool = False) -> np.ndarray:
    """8-bit RGB array of the raster."""
    hue = (raster.phase + math.pi) / (2 * math.pi)
    rgb = hue_to_rgb(hue)
    if shade:
        with np.errstate(divide="ignore"):
            lm = np.log2(np.where(raster.modulus > 0, raster.modulus, 1.0))
        rgb = rgb * (0.7 + 0.3 * (lm - np.floor(lm)))[..., None]
    out = np.round(rgb * 255.0).astype(np.uint8)
    for r, c in raster.failures:
        out[r, c] = 0
    return out


def write_image(raster: PhaseRaster, path, format: str = "PPM", shade: bool = False) -> None:
    """Write binary P6 PPM (bit-exact) or PNG."""
    fmt = format.upper()
    path = Path(path)
    rgb = raster_rgb(raster, shade=shade)
    try:
        if fmt == "PPM":
            header = f"P6\n{raster.width} {raster.height}\n255\n".encode("ascii")
            path.write_bytes(header + rgb.tobytes())
        elif fmt == "PNG":
            from PIL import Image

            Image.fromarray(rgb, mode="RGB").save(path, format="PNG")
        else:
            raise UsageError(f"unknown image format {format!r}")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def read_ppm(path) -> np.ndarray:
    """Parse a binary P6 file into an ``(height, width, 3)`` uint8 array."""
    data = Path(path).read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while data[pos : pos + 1] not in (b"\n", b""):
                pos += 1
            continue
        start = pos
        while not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    if tokens[0] != b"P6":
        raise UsageError(f"{path} is not a binary PPM")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise UsageError("only maxval 255 is supported")
    pos += 1
    pixels = np.frombuffer(data[pos : pos + 3 * w * h], dtype=np.uint8)
    return pixels.reshape(h, w, 3)


def discontinuity_detect(raster: PhaseRaster, threshold: float, *, fold: bool = True) -> set:
    """Neighbouring pixel pairs whose phase difference exceeds ``threshold``.

    With ``fold=True`` differences are reduced mod 2 pi to (-pi, pi], so a
    continuous function never triggers, whatever its phase does; jumps of
    ``f`` itself (cuts, sign flips) remain. ``fold=False`` compares the stored
    principal phases directly and so also reports the colour seam where the
    phase wraps from pi to -pi. Pairs touching a failed pixel are skipped.
    Edges are ``((r0, c0), (r1, c1))`` with the second pixel right of or
    below the first.
    """
    upper = math.pi if fold else 2 * math.pi
    if not 0 < threshold < upper:
        raise UsageError(f"threshold must lie in (0, {'pi' if fold else '2 pi'})")
    ph = raster.phase
    bad = np.zeros(ph.shape, dtype=bool)
    for r, c in raster.failures:
        bad[r, c] = True

    def diff(a, b):
        d = b - a
        if fold:
            d = -((-d + math.pi) % (2 * math.pi) - math.pi)
        return np.abs(d)

    edges = set()
    dh = diff(ph[:, :-1], ph[:, 1:])
    mh = (dh > threshold) & ~bad[:, :-1] & ~bad[:, 1:]
    for r, c in zip(*np.nonzero(mh)):
        edges.add(((int(r), int(c)), (int(r), int(c) + 1)))
    dv = diff(ph[:-1, :], ph[1:, :])
    mv = (dv > threshold) & ~bad[:-1, :] & ~bad[1:, :]
    for r, c in zip(*np.nonzero(mv)):
        edges.add(((int(r), int(c)), (int(r) + 1, int(c))))
    return edges


def edge_midpoints(raster: PhaseRaster, edges) -> np.ndarray:
    """Complex coordinates of the midpoints between the two pixel centres of each edge."""
    return np.array([0.5 * (raster.pixel_center(*a) + raster.pixel_center(*b)) for a, b in edges], dtype=complex)
