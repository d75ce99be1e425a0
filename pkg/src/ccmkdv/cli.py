"""Command-line interface: ``ccmkdv {params,eval,verify,asym}``.

Exit codes: 0 success, 1 verification failure, 2 solver failure, 64 usage
error, 65 invalid configuration.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import sys
import warnings

import numpy as np

from . import assembly, verifier
from .config import DEFAULT_THRESHOLDS, SUITES, EvolveSettings, Grid, RunConfig, parse_complex, parse_phase
from .errors import (ConfigError, ConvergenceError, InstabilityError, NearSingularError, NoSignChangeError,
                     SingularParameterError)
from .reduction import family_scan, reduction_residual, solve_re
from .report import ResidualReport
from .tau import F_INDEX, TauIndex, verify_conjugacy

EXIT_OK, EXIT_FAIL, EXIT_SOLVER, EXIT_USAGE, EXIT_CONFIG = 0, 1, 2, 64, 65

# suites whose exactness depends on the reduction condition
REDUCTION_SUITES = ("bilinear-c", "toda", "pde", "evolve")
ROUNDED_FACTOR = 10.0
TODA_INDICES = ((0, 0), (1, 0), (0, 1), (1, -1))
CONJ_INDICES = ((0, 0), (1, 0), (0, 1), (1, 1), (-1, 1))
COLUMNS = ("x", "t", "re_u1", "im_u1", "abs_u1", "re_u2", "im_u2", "abs_u2", "abs_f")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text, n=None, name="value"):
    try:
        vals = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{name} must be comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"{name} needs {n} comma-separated values, got {text!r}")
    return vals


def _physics_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("physics")
    g.add_argument("--config", help="YAML run configuration; flags override its values")
    g.add_argument("--rho", help="background amplitudes RHO1,RHO2")
    g.add_argument("--alpha", help="carrier wavenumbers ALPHA1,ALPHA2")
    g.add_argument("--c", type=float, help="nonlinearity coefficient (> 0)")
    g.add_argument("--p", action="append", metavar="A+Bi",
                   help="spectral parameter; repeat once per soliton")
    g.add_argument("--xi0", action="append", metavar="A+Bi", help="phase constant; repeat once per soliton")
    g.add_argument("--conj-phase", help="conjugate-half phase: default, regular, none, +-pi/2 or a number")
    g.add_argument("--paper-rounded", action="store_true",
                   help="accept parameters that satisfy the reduction condition only to about 1e-2")
    g.add_argument("--unchecked", action="store_true", help="skip the reduction-condition check")
    g.add_argument("--save-config", metavar="PATH", help="write the effective configuration to PATH")


def _output_flags(p: argparse.ArgumentParser):
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ccmkdv", description="Dark-dark solitons of the coupled complex mKdV equation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pp = sub.add_parser("params", help="solve the reduction condition for Re p")
    pp.add_argument("--config")
    pp.add_argument("--rho")
    pp.add_argument("--alpha")
    pp.add_argument("--c", type=float)
    pp.add_argument("--im", type=float, action="append", help="imaginary part of p (repeatable)")
    pp.add_argument("--im2", type=float, action="append", help="further imaginary part (same as --im)")
    pp.add_argument("--im-range", help="LO,HI,N: N equally spaced imaginary parts")
    pp.add_argument("--bracket", default="0.1,3.0", help="search interval for Re p (default 0.1,3.0)")
    pp.add_argument("--format", choices=("text", "json"), default="text")

    pe = sub.add_parser("eval", help="tabulate the fields on a grid")
    _physics_flags(pe)
    pe.add_argument("--grid", help="XLO:XHI:NX,TLO:THI:NT (lab frame)")
    pe.add_argument("--backend", choices=("expsum", "pfaffian"))
    _output_flags(pe)

    pv = sub.add_parser("verify", help="run residual suites and report")
    _physics_flags(pv)
    pv.add_argument("--grid", help="XLO:XHI:NX,TLO:THI:NT; random points are drawn inside this box")
    pv.add_argument("--backend", choices=("expsum", "pfaffian"))
    pv.add_argument("--suite", action="append", help=f"suite(s) to run, comma-separated; from {', '.join(SUITES)}")
    pv.add_argument("--points", type=int, help="number of random points")
    pv.add_argument("--seed", type=int)
    pv.add_argument("--out", help="write the JSON bundle here (default stdout)")

    pa = sub.add_parser("asym", help="interaction constants and collision phase shifts (N = 2)")
    _physics_flags(pa)
    pa.add_argument("--T", type=float, help="comparison time (default: separation rule)")
    pa.add_argument("--out")
    pa.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def build_run(args) -> RunConfig:
    run = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    kw = {}
    if getattr(args, "rho", None):
        kw["rho"] = tuple(_floats(args.rho, 2, "--rho"))
    if getattr(args, "alpha", None):
        kw["alpha"] = tuple(_floats(args.alpha, 2, "--alpha"))
    if getattr(args, "c", None) is not None:
        kw["c"] = args.c
    if getattr(args, "p", None):
        kw["p"] = tuple(parse_complex(q) for q in args.p)
        if not getattr(args, "xi0", None) and run.xi0 is not None and len(run.xi0) != len(kw["p"]):
            kw["xi0"] = None
    if getattr(args, "xi0", None):
        kw["xi0"] = tuple(parse_complex(z) for z in args.xi0)
    if getattr(args, "conj_phase", None) is not None:
        kw["conj_phase"] = parse_phase(args.conj_phase)
    if getattr(args, "paper_rounded", False):
        kw["paper_rounded"] = True
    if getattr(args, "unchecked", False):
        kw["check_reduction"] = False
    if getattr(args, "grid", None):
        kw["grid"] = Grid.parse(args.grid)
    if getattr(args, "backend", None):
        kw["backend"] = args.backend
    if getattr(args, "points", None) is not None:
        kw["verify_points"] = args.points
    if getattr(args, "seed", None) is not None:
        kw["seed"] = args.seed
    if getattr(args, "out", None):
        kw["out"] = args.out
    if getattr(args, "format", None) in ("csv", "json"):
        kw["format"] = args.format
    run = run.replace(**kw)
    if getattr(args, "save_config", None):
        run.save(args.save_config)
    return run


def _emit(text: str, path):
    if path:
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    else:
        sys.stdout.write(text)


# params

def cmd_params(args) -> int:
    run = build_run(args)
    rho_hat = tuple(np.sqrt(run.c) * r for r in run.rho)
    bracket = tuple(_floats(args.bracket, 2, "--bracket"))
    ims = list(args.im or []) + list(args.im2 or [])
    points, failures = [], []
    if args.im_range:
        lo, hi, n = _floats(args.im_range, 3, "--im-range")
        if n < 2 or n != int(n):
            raise UsageError("--im-range needs an integer count of at least 2")
        scan = family_scan(rho_hat, run.alpha, (lo, hi, int(n)), bracket)
        points += [(q.p, q.residual) for q in scan.points]
        failures += scan.failures
    if not ims and not args.im_range:
        raise UsageError("give --im, --im2 or --im-range")
    for im in ims:
        try:
            re_p = solve_re(im, rho_hat, run.alpha, bracket)
        except (NoSignChangeError, ConvergenceError, SingularParameterError) as exc:
            failures.append((im, str(exc)))
            continue
        p = complex(re_p, im)
        points.append((p, reduction_residual(p, rho_hat, run.alpha)))
    if args.format == "json":
        doc = {"points": [{"p": [p.real, p.imag], "residual": r} for p, r in points],
               "failures": [{"im": im, "error": msg} for im, msg in failures]}
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        for p, r in points:
            sys.stdout.write(f"Im p = {p.imag!r:<8} Re p = {p.real!r:<20} residual = {r:.3e}\n")
    for im, msg in failures:
        sys.stderr.write(f"no admissible p at Im p = {im}: {msg}\n")
    return EXIT_SOLVER if failures else EXIT_OK


# eval

def evaluate_grid(run: RunConfig):
    """Rows in t-major order, ``f_rel`` per row."""
    cfg = run.soliton()
    x, t = run.grid.mesh()
    fs = assembly.fields(cfg, x, t, backend=run.backend, check_singular=False)
    f_abs = fs.f_abs if fs.f_abs is not None else np.ones_like(x)
    rows = np.column_stack([x, t, fs.u1.real, fs.u1.imag, np.abs(fs.u1), fs.u2.real, fs.u2.imag, np.abs(fs.u2), f_abs])
    return rows, fs.f_rel


def cmd_eval(args) -> int:
    run = build_run(args)
    rows, f_rel = evaluate_grid(run)
    bad = np.flatnonzero(f_rel < assembly.SINGULAR_RTOL)
    for w in bad[:10]:
        sys.stderr.write(f"warning: near-singular row {w}: x = {rows[w, 0]:.6g}, t = {rows[w, 1]:.6g}, "
                         f"|f|/scale = {f_rel[w]:.2e}\n")
    if bad.size > 10:
        sys.stderr.write(f"warning: {bad.size - 10} further near-singular rows\n")
    if run.format == "json":
        doc = {"columns": list(COLUMNS), "rows": rows.tolist(), "min_abs_f": float(rows[:, 8].min())}
        text = json.dumps(doc) + "\n"
    else:
        buf = io.StringIO()
        target = run.out or "data.csv"
        buf.write(f"# gnuplot: set datafile separator ','; splot '{target}' every ::1 using 1:2:5 with pm3d\n")
        np.savetxt(buf, rows, fmt="%.17g", delimiter=",", header=",".join(COLUMNS), comments="")
        text = buf.getvalue()
    _emit(text, run.out)
    sys.stderr.write(f"min |f| = {rows[:, 8].min():.17g}\n")
    return EXIT_OK


# verify

def _worst(tag: str, reports) -> ResidualReport:
    reports = list(reports)
    w = max(reports, key=lambda r: r.relative)
    parts = {r.tag: r.relative for r in reports}
    return dataclasses.replace(w, tag=tag, points=sum(r.points for r in reports),
                               skipped=max(r.skipped for r in reports), extra={**w.extra, "parts": parts})


def verify_points(run: RunConfig):
    """Deterministic random lab-frame points inside the configured grid box."""
    rng = np.random.default_rng(run.seed)
    g = run.grid
    x = rng.uniform(g.x_lo, g.x_hi, run.verify_points)
    t = rng.uniform(g.t_lo, g.t_hi, run.verify_points)
    return x, t


def _to_lab(rep: ResidualReport, speed: float) -> ResidualReport:
    x, t = rep.worst_point
    return dataclasses.replace(rep, worst_point=(x + speed * t, t))


def run_suites(run: RunConfig, suites=SUITES, relaxed: bool = False):
    """Run verification suites; returns ``[(report, threshold, passed)]``.

    Residuals are reported in lab coordinates.  With ``relaxed`` the suites
    that depend on the reduction condition get their threshold raised to
    ten times the worst reduction residual of the configuration.
    """
    cfg = run.soliton()
    x, t = verify_points(run)
    s = cfg.frame_speed
    mov = np.column_stack([x - s * t, t])
    red = max((abs(r) for r in cfg.reduction_residuals), default=0.0)
    bil = None
    out = []
    for suite in suites:
        note = ""
        try:
            if suite.startswith("bilinear"):
                if bil is None:
                    bil = verifier.bilinear_residuals(cfg, mov)
                rep = _to_lab(bil["abc".index(suite[-1])], s)
            elif suite == "toda":
                rep = _to_lab(_worst("toda", (verifier.toda_residual(cfg, mov, ix) for ix in TODA_INDICES)), s)
            elif suite == "pde":
                rep = _worst("pde", verifier.pde_residual(cfg, x, t))
            elif suite == "conjugacy":
                rep = _to_lab(_worst("conjugacy", (verify_conjugacy(cfg, TauIndex(*ix), mov, run.backend)
                                                   for ix in CONJ_INDICES)), s)
            elif suite == "evolve":
                e: EvolveSettings = run.evolve
                ev = verifier.evolve_and_compare(cfg, (e.x_lo, e.x_hi), e.dx, e.T, e.cfl, e.order_check)
                rep = ev.to_report("evolve")
            else:
                raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
        except (NearSingularError, InstabilityError) as exc:
            rep = ResidualReport(suite, 0, float("inf"), 0.0, float("inf"), (float("nan"), float("nan")),
                                 note=str(exc))
        thr = run.threshold(suite)
        if red > 0 and suite in REDUCTION_SUITES:
            if relaxed:
                thr = max(thr, ROUNDED_FACTOR * red)
                note = (f"parameters satisfy the reduction condition only to {red:.2e}; "
                        f"threshold relaxed to {thr:.2e}")
            elif not rep.passed(thr):
                note = (f"parameters miss the reduction condition by {red:.2e}, which bounds the attainable "
                        "residual; use --paper-rounded to accept rounded parameters")
        if note:
            rep = dataclasses.replace(rep, note=(rep.note + "; " if rep.note else "") + note)
        out.append((rep, thr, rep.passed(thr)))
    return out


def _suites(args):
    if not args.suite:
        return SUITES
    names = [s.strip() for item in args.suite for s in item.split(",") if s.strip()]
    for s in names:
        if s not in DEFAULT_THRESHOLDS:
            raise UsageError(f"unknown suite {s!r}; choose from {', '.join(SUITES)}")
    return tuple(dict.fromkeys(names))


def cmd_verify(args) -> int:
    suites = _suites(args)
    run = build_run(args)
    results = run_suites(run, suites, relaxed=args.paper_rounded)
    reports = []
    for rep, thr, ok in results:
        d = rep.to_json()
        d["threshold"] = thr
        d["passed"] = ok
        reports.append(d)
    doc = {"passed": all(ok for _, _, ok in results), "reports": reports}
    _emit(json.dumps(doc, indent=2) + "\n", run.out)
    for rep, thr, ok in results:
        if not ok:
            x, t = rep.worst_point
            sys.stderr.write(f"FAIL {rep.tag}: relative residual {rep.relative:.3e} >= {thr:.1e} "
                             f"at x = {x:.6g}, t = {t:.6g}" + (f" ({rep.note})" if rep.note else "") + "\n")
    return EXIT_OK if doc["passed"] else EXIT_FAIL


# asym

def cmd_asym(args) -> int:
    run = build_run(args)
    cfg = run.soliton()
    if cfg.N != 2:
        raise ConfigError(f"asym needs exactly two solitons, got N = {cfg.N}")
    k = assembly.interaction_constants(cfg)
    ps = assembly.phase_shifts(cfg)
    rep = assembly.collision_report(cfg, args.T)
    # dip position is -(xi0 + log|phase|/2)/Re p, so the shift is minus the phase change
    spatial = {j: -0.5 * np.log(abs(assembly.asymptotic_phase(cfg, j, "after")
                                    / assembly.asymptotic_phase(cfg, j, "before"))) / cfg.p[j - 1].real
               for j in (1, 2)}

    def cj(z):
        return [complex(z).real, complex(z).imag]

    doc = {
        "C": [cj(k.C1), cj(k.C2)], "A": [cj(k.A1), cj(k.A2)], "B": [cj(k.B1), cj(k.B2)], "M": k.M,
        "chi": [cj(ps.chi1), cj(ps.chi2)], "gamma": [cj(ps.gamma1), cj(ps.gamma2)],
        "spatial_shift": [spatial[1], spatial[2]],
        "predicted_shift": [rep.shift_predicted[1], rep.shift_predicted[2]],
        "measured_shift": [rep.shift_measured[1], rep.shift_measured[2]],
        "velocity": [assembly.soliton_velocity(cfg, 1), assembly.soliton_velocity(cfg, 2)],
        "T": rep.T,
        "asymptotic_residual": {f"{j}-{e}": v for (j, e), v in rep.asym_error.items()},
        "depth": {f"{j}-{e}": list(v) for (j, e), v in rep.depth.items()},
    }
    if args.format == "json":
        text = json.dumps(doc, indent=2) + "\n"
    else:
        lines = []
        for name, pair in (("C", (k.C1, k.C2)), ("A", (k.A1, k.A2)), ("B", (k.B1, k.B2)),
                           ("chi", (ps.chi1, ps.chi2)), ("gamma", (ps.gamma1, ps.gamma2))):
            lines.append(f"{name + '1':<7} {pair[0]:.12g}    {name + '2':<7} {pair[1]:.12g}")
        lines.append(f"M       {k.M:.12g}")
        for j in (1, 2):
            lines.append(f"soliton {j}: velocity {doc['velocity'][j - 1]:.10g}, spatial shift "
                         f"{spatial[j]:+.10g} (|log M|/2Re p = {abs(rep.shift_predicted[j]):.10g}, "
                         f"measured {rep.shift_measured[j]:+.10g})")
        lines.append(f"T = {rep.T:.6g}; asymptotic residual at +-T: {rep.max_asym_error:.3e}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


COMMANDS = {"params": cmd_params, "eval": cmd_eval, "verify": cmd_verify, "asym": cmd_asym}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"ccmkdv: error: {exc}\n")
        return EXIT_USAGE
    except (ConfigError, SingularParameterError) as exc:
        sys.stderr.write(f"ccmkdv: invalid configuration: {exc}\n")
        return EXIT_CONFIG
    except OSError as exc:
        sys.stderr.write(f"ccmkdv: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
