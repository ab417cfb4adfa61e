"""Command-line entry point.

Exit codes: 0 pass, 2 usage or configuration error, 3 numerical or
tolerance failure. Every report is JSON and embeds the resolved config.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import acceptance, cauchy, fields, portraits, spectra
from .cauchy import ContourSpec, Factor, Sign, TailModel
from .complexfn import kappa, mylog, mysqrt
from .errors import (
    AccuracyError,
    BranchCrossingError,
    ConfigurationError,
    PoleError,
    ProbeError,
    ProximityError,
    UsageError,
)
from .kernel import K_minus_circ, K_plus_circ, WaveParams, kernel_K, log_K_circ

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3

USAGE_ERRORS = (UsageError, ConfigurationError, KeyError, TypeError, json.JSONDecodeError)
NUMERIC_ERRORS = (AccuracyError, BranchCrossingError, PoleError, ProbeError, ProximityError, FloatingPointError)

DEFAULT_PARAMS = {"k1": [1.0, 1.0], "k2": [2.0, 1.0], "theta0": 5 * math.pi / 4}


class _Failure(Exception):
    """Numerical failure carrying the partial report."""

    def __init__(self, message: str, report: dict):
        super().__init__(message)
        self.report = report


def _c(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigurationError(f"complex numbers are [re, im] pairs, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def load_config(args) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigurationError("config must be a JSON object")
    cfg.setdefault("params", DEFAULT_PARAMS)
    if args.tolerance is not None:
        if not args.tolerance > 0:
            raise UsageError("--tolerance must be positive")
        cfg["tolerance"] = args.tolerance
    if args.probes is not None:
        if args.probes < 1:
            raise UsageError("--probes must be at least 1")
        cfg["probes"] = args.probes
    if args.seed is not None:
        cfg["seed"] = args.seed
    return cfg


def _params(cfg) -> WaveParams:
    return WaveParams.from_dict(cfg["params"])


def _tolerance(cfg, default: float) -> float:
    tol = float(cfg.get("tolerance", default))
    if not tol > 0:
        raise ConfigurationError("tolerance must be positive")
    return tol


def _candidate(cfg) -> spectra.SpectralCandidate:
    data = cfg.get("candidate")
    if data is None:
        return spectra.SpectralCandidate.zero()
    try:
        return spectra.SpectralCandidate.from_dict(data)
    except (ValueError, AttributeError) as exc:
        raise ConfigurationError(str(exc)) from exc


def _probes(cfg, params: WaveParams):
    pts = spectra.probe_set(params)
    n = cfg.get("probes")
    return pts[: int(n)] if n else pts


def _resolved(cfg, params: WaveParams) -> dict:
    out = dict(cfg)
    out["params"] = params.to_dict()
    out["derived"] = {
        "a1": _pair(params.a1),
        "a2": _pair(params.a2),
        "delta": params.delta,
        "delta1": params.delta1,
        "eps": params.eps,
    }
    return out


# --- commands ----------------------------------------------------------------------


def cmd_factor(cfg) -> tuple[int, dict]:
    """``K`` against ``K++ K+- K-- K-+`` on an ``n x n`` probe grid of the strip."""
    p = _params(cfg)
    tol = _tolerance(cfg, 1e-6)
    n = int(cfg.get("probes", 10))
    A1, A2 = acceptance.factor_probe_grid(p, n)
    report = {"config": _resolved(cfg, p), "points": []}
    K = kernel_K(p, A1, A2)
    errs = np.full(A1.shape, np.nan)
    try:
        prod = np.ones(A1.shape, dtype=complex)
        for which in Factor:
            prod = prod * cauchy.K_factor(p, which, A1, A2)
        errs = np.abs(prod - K) / np.abs(K)
    except NUMERIC_ERRORS as exc:
        report["error"] = str(exc)
        raise _Failure(str(exc), report) from exc
    for x, y, e in zip(A1.ravel(), A2.ravel(), errs.ravel()):
        report["points"].append({"alpha1": _pair(x), "alpha2": _pair(y), "relative_error": float(e)})
    mx = float(np.max(errs))
    report["max_relative_error"] = mx
    report["tolerance"] = tol
    report["passed"] = mx < tol
    return (EXIT_OK if mx < tol else EXIT_NUMERIC), report


def cmd_split(cfg) -> tuple[int, dict]:
    """Sum-split of ``1/(z^2+c^2)`` or of ``mylog K+-circ(alpha1, .)`` at target points."""
    p = _params(cfg)
    tol = _tolerance(cfg, 1e-8)
    sc = cfg.get("split", {})
    kind = sc.get("function", "rational")
    targets = [_c(t) for t in sc.get("targets", [[0.1, 0.05], [-2.0, 0.1], [4.0, -0.1]])]
    if not targets:
        raise UsageError("split needs at least one target")
    if kind == "rational":
        c = float(sc.get("c", 1.0))
        if not c > 0:
            raise ConfigurationError("c must be positive")

        def f(z):
            return 1.0 / (z * z + c * c)

        below = ContourSpec(offset=-min(0.5, c / 2), tail_model=TailModel.MAPPED)
        above = ContourSpec(offset=min(0.5, c / 2), tail_model=TailModel.MAPPED)
    elif kind in ("mylog_K_minus_circ", "mylog_K_plus_circ"):
        a1 = _c(sc.get("alpha1", [2.0, 0.2]))
        sign = "-" if kind == "mylog_K_minus_circ" else "+"

        def f(z):
            return log_K_circ(p, sign, a1, z)

        below = ContourSpec.for_params(p, -p.eps / 2)
        above = ContourSpec.for_params(p, p.eps / 2)
    else:
        raise UsageError(f"unknown split function {kind!r}")
    rows = []
    worst = 0.0
    for a in targets:
        plus = cauchy.cauchy_integral(f, below, a, Sign.PLUS)
        minus = cauchy.cauchy_integral(f, above, a, Sign.MINUS)
        err = abs(plus.value + minus.value - complex(f(np.array([a]))[0]))
        worst = max(worst, err)
        row = {"alpha": _pair(a), "plus": _pair(plus.value), "minus": _pair(minus.value), "sum_error": err}
        if kind == "rational":
            rp, rm = acceptance.rational_split_closed_form(c, a)
            row["closed_form_error"] = max(abs(plus.value - complex(rp)), abs(minus.value - complex(rm)))
            worst = max(worst, row["closed_form_error"])
        rows.append(row)
    report = {"config": _resolved(cfg, p), "points": rows, "max_error": worst, "passed": worst < tol}
    return (EXIT_OK if worst < tol else EXIT_NUMERIC), report


def cmd_ansatz(cfg) -> tuple[int, dict]:
    """Radlow ansatz (and ``Psi++`` for a candidate) at the probes, with decay slopes."""
    p = _params(cfg)
    cand = _candidate(cfg)
    cand.check(p)
    rows = []
    for x, y in _probes(cfg, p):
        r = complex(spectra.radlow_ansatz(p, x, y))
        row = {"alpha1": _pair(x), "alpha2": _pair(y), "radlow": _pair(r)}
        if not cand.is_zero:
            row["psi_pp"] = _pair(spectra.psi_pp(p, cand, x, y))
        rows.append(row)

    def f(x, y):
        return spectra.radlow_ansatz(p, x, y)

    slopes = {d.value: spectra.decay_rate_probe(f, d, p) for d in spectra.Direction}
    report = {"config": _resolved(cfg, p), "points": rows, "decay_slopes": slopes}
    return EXIT_OK, report


def cmd_residual(cfg) -> tuple[int, dict]:
    """Compatibility residual of the candidate at the probes; diagnostic only."""
    p = _params(cfg)
    cand = _candidate(cfg)
    cand.check(p)
    rows = spectra.residual_report(p, cand, _probes(cfg, p))
    sup = max(math.hypot(*r["residual"]) for r in rows)
    report = {"config": _resolved(cfg, p), "candidate": cand.to_dict(), "points": rows, "sup_residual": sup}
    return EXIT_OK, report


def _grid_spec(cfg) -> tuple[float, int]:
    g = cfg.get("grid")
    if not g:
        raise UsageError("field needs a grid spec {spacing, n}")
    h, n = float(g.get("spacing", 0)), int(g.get("n", 0))
    if not h > 0 or n < 4:
        raise UsageError("grid spec needs spacing > 0 and n >= 4")
    return h, n


def cmd_field(cfg) -> tuple[int, dict]:
    """Field grids inside (psi, Q1) and outside (phi) with continuity, Helmholtz and tip diagnostics.

    ``phi`` is the incident wave plus the transform of ``Phi3/4`` on the
    truncated real line. With equal wavenumbers ``psi`` uses descending tails
    and everything is exact; otherwise both transforms are truncated at
    ``|alpha| = L`` and the report is flagged experimental.
    """
    p = _params(cfg)
    h, n = _grid_spec(cfg)
    tol = _tolerance(cfg, 1e-2)
    fit_radius = float(cfg.get("fit_radius", 0.5))
    cand = _candidate(cfg)
    if p.degenerate:
        spec = spectra.degenerate_spectra(p)
        psi_fn, phi34_fn = spec.psi_pp, spec.phi_34
    else:
        if not cand.is_zero:
            raise UsageError("field grids are available for the ZERO candidate only")

        memo: dict = {}

        def psi_fn(a1, a2):
            # every transform below shares one node set, so evaluate the ansatz once
            a1, a2 = np.asarray(a1), np.asarray(a2)
            key = (a1.shape, a2.shape, a1.tobytes(), a2.tobytes())
            if key not in memo:
                memo[key] = spectra.radlow_ansatz(p, a1, a2)
            return memo[key]

        def phi34_fn(a1, a2):
            return spectra.phi_34_from_psi(p, psi_fn, a1, a2)

    # fail fast on a grid too coarse for the tip fit, before any transform runs
    blank = np.zeros((n, n), dtype=complex)
    fields.edge_expansion_fit(fields.FieldGrid(fields.Region.Q1, h, 1, 1, blank), fit_radius)
    blank = np.zeros((2 * n + 1, 2 * n + 1), dtype=complex)
    fields.edge_expansion_fit(fields.FieldGrid(fields.Region.FULL, h, -n, -n, blank), fit_radius)

    mode = cfg.get("gamma", "ABSORBING")
    gamma = fields.gamma_contour(p, mode, float(cfg.get("indent_radius", 0.1)))
    flat = ContourSpec(offset=0.0, truncation=gamma.truncation, tail_model=TailModel.NONE)
    idx = np.arange(1, n + 1)
    if p.degenerate:
        psi_vals = fields.transform_grid(psi_fn, gamma, gamma, h * idx, h * idx, tol=1e-6)
    else:
        # the factors are only available on the strip, so the descending rays are out of reach
        psi_vals = fields.transform_grid(psi_fn, flat, flat, h * idx, h * idx, check=False)
    psi = fields.FieldGrid(fields.Region.Q1, h, 1, 1, psi_vals)
    xf = h * np.arange(-n, n + 1)
    scat = fields.transform_grid(phi34_fn, flat, flat, xf, xf, check=False)
    X1, X2 = np.meshgrid(xf, xf)
    phi = fields.FieldGrid(fields.Region.FULL, h, -n, -n, fields.incident_field(p, X1, X2) + scat)
    lower = fields.FieldGrid(fields.Region.FULL, h, -n, -n, phi.values[:n, :])

    jumps = {}
    for face in fields.Face:
        v, d = fields.continuity_check(phi, psi, face)
        jumps[face.value] = {"value": v, "normal_derivative": d}
    inside = fields.edge_expansion_fit(psi, fit_radius)
    outside = fields.edge_expansion_fit(phi, fit_radius)
    worst = max(max(j.values()) for j in jumps.values())
    report = {
        "config": _resolved(cfg, p),
        "gamma_warnings": list(gamma.warnings),
        "continuity": jumps,
        "helmholtz": {
            "psi_k2": fields.helmholtz_residual(psi, p.k2),
            "phi_k1_lower_half": fields.helmholtz_residual(lower, p.k1),
            "stencil_budget": h * h * max(abs(p.k1), abs(p.k2)) ** 4 / 12,
        },
        "tip": {
            "B_interior": _pair(inside.B),
            "B_exterior": _pair(outside.B),
            "B_difference": abs(inside.B - outside.B),
            "interior": inside.to_dict(),
            "exterior": outside.to_dict(),
        },
        "experimental": not p.degenerate,
        "max_jump": worst,
        "tolerance": tol,
        "passed": worst < tol,
    }
    report["_grids"] = {"psi": psi, "phi": phi}
    return (EXIT_OK if worst < tol else EXIT_NUMERIC), report


def _selector(name: str, p: WaveParams, pc: dict):
    fixed = _c(pc.get("fixed", [2.0, 0.2]))
    plane = pc.get("plane", "alpha2")
    if plane not in ("alpha1", "alpha2"):
        raise UsageError(f"plane must be alpha1 or alpha2, got {plane!r}")

    def slice2(fn):
        return (lambda z: fn(p, z, fixed)) if plane == "alpha1" else (lambda z: fn(p, fixed, z))

    k = _c(pc.get("k", [3.0, 1.0]))
    table = {
        "identity": lambda: (lambda z: z),
        "mylog": lambda: mylog,
        "mysqrt": lambda: mysqrt,
        "kappa": lambda: (lambda z: kappa(k, z)),
        "K": lambda: slice2(kernel_K),
        "K_plus_circ": lambda: slice2(K_plus_circ),
        "K_minus_circ": lambda: slice2(K_minus_circ),
        "mylog_K_plus_circ": lambda: (lambda z: mylog(slice2(K_plus_circ)(z))),
        "mylog_K_minus_circ": lambda: (lambda z: mylog(slice2(K_minus_circ)(z))),
        "radlow": lambda: slice2(spectra.radlow_ansatz),
    }
    for w in Factor:
        table[f"K_{w.value}"] = lambda w=w: slice2(lambda q, a, b: cauchy.K_factor(q, w, a, b))
    if name not in table:
        raise UsageError(f"unknown selector {name!r}; choose from {', '.join(sorted(table))}")
    return table[name]()


def cmd_portrait(cfg, out_dir: Path | None) -> tuple[int, dict]:
    p = _params(cfg)
    pc = cfg.get("portrait", {})
    name = pc.get("selector", "kappa")
    f = _selector(name, p, pc)
    window = tuple(float(v) for v in pc.get("window", acceptance.CUT_WINDOW))
    if len(window) != 4:
        raise UsageError("window is [re_min, re_max, im_min, im_max]")
    raster = portraits.render(f, window, int(pc.get("width", 256)), int(pc.get("height", 256)))
    fmt = pc.get("format", "PPM").upper()
    report = {"config": _resolved(cfg, p), "selector": name, "failures": len(raster.failures)}
    if out_dir is not None:
        path = out_dir / f"{name}.{fmt.lower()}"
        portraits.write_image(raster, path, fmt, shade=bool(pc.get("shade", False)))
        report["image"] = str(path)
    threshold = pc.get("threshold")
    if threshold is not None:
        edges = sorted(portraits.discontinuity_detect(raster, float(threshold), fold=bool(pc.get("fold", True))))
        report["discontinuities"] = {
            "threshold": float(threshold),
            "count": len(edges),
            "midpoints": [_pair(z) for z in portraits.edge_midpoints(raster, edges)],
        }
    return EXIT_OK, report


def cmd_verify(cfg, only=None) -> tuple[int, dict]:
    results = acceptance.run_all(only, seed=int(cfg.get("seed", 0)))
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    report = {"config": {"seed": int(cfg.get("seed", 0))}, "criteria": [r.to_dict() for r in results], "passed": ok}
    return (EXIT_OK if ok else EXIT_NUMERIC), report


# --- driver ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wedgewh", description="Penetrable-wedge Wiener-Hopf toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="directory for reports and images")
    common.add_argument("--tolerance", type=float, help="pass threshold")
    common.add_argument("--probes", type=int, help="number of probe points (grid side for factor)")
    common.add_argument("--seed", type=int, help="seed for randomised checks")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("factor", "check K against the product of its four factors"),
        ("split", "sum-split a test function at target points"),
        ("ansatz", "evaluate the Radlow ansatz and its decay"),
        ("residual", "compatibility residual of a candidate"),
        ("field", "reconstruct fields and run grid diagnostics"),
        ("portrait", "render a phase portrait"),
    ):
        sub.add_parser(name, parents=[common], help=text)
    v = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    v.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    return parser


def _write(out_dir: Path | None, command: str, report: dict) -> None:
    grids = report.pop("_grids", {})
    text = json.dumps(report, indent=2, default=str)
    if out_dir is None:
        print(text)
        return
    (out_dir / f"{command}_report.json").write_text(text + "\n")
    for name, grid in grids.items():
        (out_dir / f"{name}.csv").write_text(grid.to_csv())


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out_dir = Path(args.out) if args.out else None
    try:
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
        cfg = load_config(args)
        if args.command == "portrait":
            code, report = cmd_portrait(cfg, out_dir)
        elif args.command == "verify":
            code, report = cmd_verify(cfg, args.only)
        else:
            fn = {
                "factor": cmd_factor,
                "split": cmd_split,
                "ansatz": cmd_ansatz,
                "residual": cmd_residual,
                "field": cmd_field,
            }[args.command]
            code, report = fn(cfg)
    except _Failure as exc:
        _write(out_dir, args.command, exc.report)
        print(f"wedgewh: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except NUMERIC_ERRORS as exc:
        print(f"wedgewh: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (*USAGE_ERRORS, ValueError, OSError) as exc:
        print(f"wedgewh: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write(out_dir, args.command, report)
    return code


if __name__ == "__main__":
    sys.exit(main())
