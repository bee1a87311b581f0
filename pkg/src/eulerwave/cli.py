"""Command-line front end.

Exit codes: 0 pass, 1 semantic failure, 2 input or configuration error.
Every subcommand writes a JSON report to stdout (or ``--report PATH``).
"""

import argparse
import datetime as _dt
import json
import math
import re
import sys

import numpy as np

from . import __version__, _kernels
from .errors import ConfigurationError, DomainError, RangeError
from .fan_construction import (EQUALITY_TOL, FanSubsolution, admissible_c1_interval,
                               baseline_family, check_conditions, family_fan,
                               overlap_wedge, perturbed_family, search_pairs)
from .lifted_algebra import (DEFAULT_CONE_EPS, DIM, State, capital_matrix, det_factored,
                             lift, wave_cone_member, wave_direction)
from .rigidity_lab import (DEFAULT_FLOOR, DEGENERATE, OSCILLATION_OBSERVED,
                           RIGIDITY_CONSISTENT, rigidity_experiment)
from .scenario import ScenarioError, bundled, dumps, load, write_csv
from .weak_verification import (DEFAULT_RESOLUTION, TestFunctionSet, verify_subsolution)
from .young_measures import (DEFAULT_THETA, FLUX_CONVENTION, RegionGrid,
                             admissibility_residual, mvs_residual, selection_verdict)

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

PAIR_SEARCH_HEADER = ("eta", "C1", "C1_tilde", "separation_margin", "wedge_lo", "wedge_hi")
RIGIDITY_HEADER = ("n", "afree_residual", "d_n", "mass_a", "mass_b")


class InputError(ValueError):
    pass


def _floats(text, names, what):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != len(names):
        raise InputError(f"{what}: expected {len(names)} comma-separated values "
                         f"({','.join(names)}), got {len(parts)}")
    out = []
    for name, p in zip(names, parts):
        try:
            v = float(p)
        except ValueError:
            raise InputError(f"{what}: field '{name}' is not a number: {p!r}") from None
        if not math.isfinite(v):
            raise InputError(f"{what}: field '{name}' is not finite")
        out.append(v)
    return out


def parse_state(text, what="--state"):
    rho, ux, uy = _floats(text, ("rho", "ux", "uy"), what)
    try:
        return State(rho, (ux, uy))
    except DomainError as exc:
        raise InputError(f"{what}: {exc}") from None


def parse_grid(text, what):
    """Comma list 'a,b,c' or range 'start:stop:count' (inclusive)."""
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        start, stop, count = (p.strip() for p in text.split(":"))
        try:
            return np.linspace(float(start), float(stop), int(count)).tolist()
        except ValueError:
            raise InputError(f"{what}: malformed range {text!r}") from None
    return _floats(text, [f"value {i + 1}" for i in range(text.count(",") + 1)], what)


def provenance(args, **extra):
    out = {"tool": "eulerwave", "version": __version__, "backend": _kernels.BACKEND}
    out.update(extra)
    if getattr(args, "timestamp", True):
        out["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    return out


# wavecone ---------------------------------------------------------------

def cmd_wavecone(args):
    if args.vector:
        if len(args.vector) != 2:
            raise InputError("--vector must be given exactly twice")
        names = [f"z{i}" for i in range(DIM)]
        za, zb = (np.array(_floats(v, names, f"--vector #{i + 1}"))
                  for i, v in enumerate(args.vector))
        states = None
    else:
        if not args.state or len(args.state) != 2:
            raise InputError("give two --state rho,ux,uy (or two --vector z0,...,z7)")
        states = [parse_state(s, f"--state #{i + 1}") for i, s in enumerate(args.state)]
        za, zb = (lift(s, args.gamma).as_vector() for s in states)
    zbar = za - zb
    Z = capital_matrix(zbar)
    zero = not np.any(zbar)
    member = wave_cone_member(zbar, args.eps)
    xi = wave_direction(zbar, args.eps) if member else None
    report = {
        "connected": bool(zero or member),
        "difference_zero": bool(zero),
        "det": float(np.linalg.det(Z)),
        "direction": None if xi is None else [float(v) for v in xi],
        "zbar": [float(v) for v in zbar],
        "provenance": provenance(args, eps=args.eps, gamma=args.gamma),
    }
    if states is not None and args.gamma == 2.0:
        report["det_factored"] = det_factored(*states)
    return report, EXIT_PASS


# subsolution ------------------------------------------------------------

def _fan_report(f, args):
    rep = check_conditions(f, tol=args.tol, printed=args.printed)
    verdict = verify_subsolution(f, tol=args.tol)
    return {
        "fan": f.to_dict(),
        "pass": rep.overall,
        "failures": list(rep.failures),
        "residuals": rep.values(),
        "checks": rep.passed,
        "verification": {"pass": verdict.passed, "checks": verdict.checks,
                         "values": verdict.values},
    }


def cmd_subsolution(args):
    meta = provenance(args, tol=args.tol, admissibility_form="printed" if args.printed else "energy")
    if args.action == "interval":
        try:
            iv = admissible_c1_interval(args.eta, printed=args.printed)
        except DomainError as exc:
            raise InputError(str(exc)) from None
        report = {"eta": args.eta, "empty": iv.empty, "lo": iv.lo, "hi": iv.hi,
                  "lo_open": iv.lo_open, "hi_open": iv.hi_open,
                  "lo_binding": iv.lo_binding, "hi_binding": iv.hi_binding,
                  "display": str(iv), "provenance": meta}
        return report, EXIT_FAIL if iv.empty else EXIT_PASS

    if args.action == "check":
        names = FanSubsolution.FIELDS
        f = FanSubsolution(*_floats(args.params, names, "--params"))
    elif args.action == "baseline":
        f = family_fan(0.0, args.c1)
    else:
        if not (-2.0 * math.sqrt(2.0) / 3.0 < args.eta < 0.0):
            raise InputError(f"--eta {args.eta} outside (-2 sqrt 2/3, 0)")
        f = family_fan(args.eta, args.c1)
    report = _fan_report(f, args)
    report["provenance"] = meta
    checking = args.action == "check" or args.check
    try:
        if args.action == "baseline":
            baseline_family(args.c1, printed=args.printed)
        elif args.action == "perturb":
            perturbed_family(args.eta, args.c1, printed=args.printed)
    except RangeError as exc:
        report["error"] = str(exc)
    code = EXIT_PASS if (report["pass"] or not checking) else EXIT_FAIL
    return report, code


# pair search ------------------------------------------------------------

def cmd_pair_search(args):
    if args.grid_file:
        try:
            with open(args.grid_file, encoding="utf-8") as fh:
                grids = json.load(fh) or {}
        except (OSError, ValueError) as exc:
            raise InputError(f"--grid-file: {exc}") from None
        eta = grids.get("eta", [])
        c1 = grids.get("C1", [])
        c1t = grids.get("C1_tilde", c1)
    else:
        eta = parse_grid(args.eta_grid, "--eta-grid")
        c1 = parse_grid(args.c1_grid, "--c1-grid")
        c1t = parse_grid(args.c1t_grid, "--c1t-grid") if args.c1t_grid else c1
    results = search_pairs(eta, c1, c1t, floor=args.floor, printed=args.printed)
    rows = [r.row() for r in results]
    if args.out:
        try:
            write_csv(args.out, PAIR_SEARCH_HEADER, rows)
        except OSError as exc:
            raise InputError(f"--out: cannot write {args.out}: {exc}") from None
    report = {
        "count": len(rows),
        "grid_sizes": {"eta": len(eta), "C1": len(c1), "C1_tilde": len(c1t)},
        "floor": args.floor,
        "rows": [dict(zip(PAIR_SEARCH_HEADER, r)) for r in rows[: args.max_report_rows]],
        "output": args.out,
        "provenance": provenance(args),
    }
    return report, EXIT_PASS


# audit ------------------------------------------------------------------

def _audit_tests(ym, args, seed):
    speeds = []
    for atom in ym.atoms:
        if isinstance(atom, FanSubsolution):
            speeds += [atom.nu_minus, atom.nu_plus]
    random_tests = TestFunctionSet.random(args.tests, seed=seed, resolution=args.resolution)
    centers, radii = [random_tests.centers], [random_tests.radii]
    if speeds:
        on = TestFunctionSet.on_interfaces(sorted(set(speeds)), 3, seed=seed,
                                           resolution=args.resolution)
        centers.append(on.centers)
        radii.append(on.radii)
    return TestFunctionSet(np.vstack(centers), np.vstack(radii), args.resolution)


def _audit_region(ym, spacing):
    fans = [a for a in ym.atoms if isinstance(a, FanSubsolution)]
    if len(fans) == 2:
        wedge = overlap_wedge(*fans)
        if wedge is not None:
            return RegionGrid.wedge_box(wedge.nu_minus, wedge.nu_plus, spacing=spacing), "overlap_wedge"
    return RegionGrid(0.0, 1.0, -3.0, 3.0, spacing), "default_box"


def audit_scenario(scenario, args):
    reports, ok, problems = {}, True, []
    for entry in scenario.of_type("fan"):
        f = scenario.atom(entry["id"])
        rep = check_conditions(f, tol=args.tol)
        reports[entry["id"]] = {"type": "fan", "pass": rep.overall,
                                "failures": list(rep.failures), "residuals": rep.values()}
    for entry in scenario.of_type("ym"):
        try:
            ym = scenario.build_ym(entry)
        except DomainError as exc:
            problems.append(str(exc))
            continue
        tests = _audit_tests(ym, args, scenario.seed)
        mvs = mvs_residual(ym, tests)
        adm = admissibility_residual(ym, tests)
        region, region_kind = _audit_region(ym, args.spacing)
        sel = selection_verdict(ym, region, args.theta)
        passed = mvs <= args.mvs_tol and adm <= args.adm_tol
        ok &= passed
        reports[entry["id"]] = {
            "type": "ym", "lambda": ym.lam, "atoms": [entry["atom_a"], entry["atom_b"]],
            "mvs_residual": mvs, "admissibility_residual": adm,
            "residuals_pass": passed, "verdict": sel.outcome,
            "witness_fraction": sel.witness_fraction, "witness_area": sel.witness_area,
            "witness_points": sel.witness_points, "sampled_points": sel.sampled_points,
            "witness_box": sel.witness_box, "region": region_kind,
            "sector_pairs": sel.details.get("sector_pairs", {}),
            "test_functions": len(tests),
        }
    for entry in scenario.of_type("experiment"):
        params = entry.get("params", {})
        try:
            if entry["kind"] == "interval":
                iv = admissible_c1_interval(float(params.get("eta", 0.0)))
                reports[entry["id"]] = {"type": "experiment", "kind": "interval",
                                        "display": str(iv), "lo": iv.lo, "hi": iv.hi}
            else:
                pair = [State(p[0], p[1:]) for p in params.get("pair", [[1, 0, 0], [4, 0, 0]])]
                rep = rigidity_experiment(pair, float(params.get("lambda", 0.5)),
                                          tuple(params.get("n_list", (1, 2, 4, 8, 16))),
                                          int(params.get("N", 64)))
                reports[entry["id"]] = {"type": "experiment", "kind": "rigidity",
                                        "outcome": rep.outcome,
                                        "d_n": [r.d_n for r in rep.rows]}
        except (DomainError, ConfigurationError, TypeError, ValueError, IndexError) as exc:
            problems.append(f"experiment '{entry['id']}': {exc}")
    return reports, ok, problems


def cmd_audit(args):
    try:
        scenario = load(args.scenario) if args.scenario else bundled()
    except OSError as exc:
        raise InputError(f"cannot read scenario: {exc}") from None
    reports, ok, problems = audit_scenario(scenario, args)
    if problems:
        raise ScenarioError(problems)
    report = {
        "scenario": args.scenario or "paper_witness.json",
        "entries": reports,
        "pass": ok,
        "provenance": provenance(args, seed=scenario.seed, tol=args.tol, mvs_tol=args.mvs_tol,
                                 adm_tol=args.adm_tol, theta=args.theta, spacing=args.spacing,
                                 resolution=args.resolution, tests=args.tests,
                                 flux_convention=FLUX_CONVENTION),
    }
    return report, EXIT_PASS if ok else EXIT_FAIL


# rigidity ---------------------------------------------------------------

def cmd_rigidity(args):
    if not args.state or len(args.state) != 2:
        raise InputError("give two --state rho,ux,uy")
    pair = [parse_state(s, f"--state #{i + 1}") for i, s in enumerate(args.state)]
    n_list = [int(v) for v in parse_grid(args.n_list, "--n-list")]
    rep = rigidity_experiment(pair, args.lam, n_list, args.N, floor=args.floor,
                              mode=args.mode, profile=args.profile)
    rows = [(r.n, r.afree_residual, r.d_n, r.mass_a, r.mass_b) for r in rep.rows]
    if args.out:
        try:
            write_csv(args.out, RIGIDITY_HEADER, rows)
        except OSError as exc:
            raise InputError(f"--out: cannot write {args.out}: {exc}") from None
    report = {
        "outcome": rep.outcome, "connected": rep.connected,
        "difference_zero": rep.difference_zero, "det": rep.det,
        "direction": list(rep.direction), "checks": rep.checks,
        "rows": [dict(zip(RIGIDITY_HEADER, r)) for r in rows],
        "provenance": provenance(args, N=args.N, lam=args.lam, floor=args.floor,
                                 mode=args.mode, profile=args.profile),
    }
    good = rep.outcome in (OSCILLATION_OBSERVED, RIGIDITY_CONSISTENT, DEGENERATE)
    return report, EXIT_PASS if good else EXIT_FAIL


# parser -----------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="eulerwave", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.add_argument("--no-timestamp", dest="timestamp", action="store_false",
                   help="omit the timestamp from the provenance block")
    sub = p.add_subparsers(dest="command", required=True)

    w = sub.add_parser("wavecone", help="wave-cone test for two states")
    w.add_argument("--state", action="append", help="rho,ux,uy (give twice)")
    w.add_argument("--vector", action="append", help="8 lifted components (give twice)")
    w.add_argument("--eps", type=float, default=DEFAULT_CONE_EPS)
    w.add_argument("--gamma", type=float, default=2.0)
    w.set_defaults(func=cmd_wavecone)

    s = sub.add_parser("subsolution", help="fan subsolution checks")
    s.add_argument("--tol", type=float, default=EQUALITY_TOL)
    s.add_argument("--printed", action="store_true",
                   help="use the squared kinetic term in the left admissibility inequality")
    ss = s.add_subparsers(dest="action", required=True)
    c = ss.add_parser("check")
    c.add_argument("--params", required=True,
                   help="nu_minus,nu_plus,rho1,alpha,beta,gamma,delta,C1")
    b = ss.add_parser("baseline")
    b.add_argument("--c1", type=float, required=True)
    b.add_argument("--check", action="store_true")
    q = ss.add_parser("perturb")
    q.add_argument("--eta", type=float, required=True)
    q.add_argument("--c1", type=float, required=True)
    q.add_argument("--check", action="store_true")
    i = ss.add_parser("interval")
    i.add_argument("--eta", type=float, default=0.0)
    s.set_defaults(func=cmd_subsolution)

    ps = sub.add_parser("pair-search", help="grid search for separated fan pairs")
    ps.add_argument("--eta-grid", default="-0.002,-0.001,-0.0005")
    ps.add_argument("--c1-grid", default="5.6,5.8,6.0,6.2,6.4")
    ps.add_argument("--c1t-grid", default=None)
    ps.add_argument("--grid-file", help="JSON with lists eta, C1, C1_tilde")
    ps.add_argument("--floor", type=float, default=0.0)
    ps.add_argument("--printed", action="store_true")
    ps.add_argument("--out", help="CSV output path")
    ps.add_argument("--max-report-rows", type=int, default=50)
    ps.set_defaults(func=cmd_pair_search)

    a = sub.add_parser("audit", help="audit a scenario file")
    a.add_argument("scenario", nargs="?", help="scenario JSON (default: bundled witness)")
    a.add_argument("--tests", type=int, default=20, help="random test functions per measure")
    a.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)
    a.add_argument("--tol", type=float, default=EQUALITY_TOL)
    a.add_argument("--mvs-tol", type=float, default=1e-6)
    a.add_argument("--adm-tol", type=float, default=1e-6)
    a.add_argument("--theta", type=float, default=DEFAULT_THETA)
    a.add_argument("--spacing", type=float, default=0.01)
    a.set_defaults(func=cmd_audit)

    r = sub.add_parser("rigidity", help="oscillation versus rigidity experiment")
    r.add_argument("--state", action="append", help="rho,ux,uy (give twice)")
    r.add_argument("--lam", type=float, default=0.5)
    r.add_argument("--n-list", default="1,2,4,8,16")
    r.add_argument("--N", type=int, default=64)
    r.add_argument("--floor", type=float, default=DEFAULT_FLOOR)
    r.add_argument("--mode", choices=("2d", "3d"), default="2d")
    r.add_argument("--profile", choices=("cell", "exact"), default="cell")
    r.add_argument("--out", help="CSV output path")
    r.set_defaults(func=cmd_rigidity)
    return p


_NEGATIVE_VALUE = re.compile(r"^-[\d.]")


def _attach_negative_values(argv):
    # argparse reads "-0.002,-0.001" as an option; rewrite to "--opt=-0.002,-0.001"
    out = []
    for tok in argv:
        if (out and out[-1].startswith("--") and "=" not in out[-1]
                and out[-1] not in _FLAG_OPTIONS and _NEGATIVE_VALUE.match(tok)):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


_FLAG_OPTIONS = {"--check", "--printed", "--no-timestamp", "--help", "--version"}


def main(argv=None):
    parser = build_parser()
    argv = _attach_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_INPUT
    try:
        report, code = args.func(args)
    except ScenarioError as exc:
        for line in exc.problems:
            print(f"error: {line}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, DomainError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = dumps(report)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
