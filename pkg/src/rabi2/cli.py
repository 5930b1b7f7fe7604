"""Command-line entry point: ``rabi2 <command> [options]``.

Exit codes: 0 verified, 1 claim falsified or solver failure, 2 usage error.
Reports are JSON with sorted keys and no timestamps, so identical options
give byte-identical output.  Set ``RABI2_LOG=DEBUG`` (or INFO, WARNING) for
log output on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .errors import SingularRecurrenceError, SolverError, SpectralCollapseError, UsageError
from .exact import GaussianRational, format_gaussian, format_rational, parse_gaussian
from .gfunction import (
    GSpec,
    g_series,
    parse_grid,
    sweep_family,
    uniqueness_argument_check,
)
from .series import (
    A1_VARIANTS,
    DEFAULT_ORDER,
    InitialConditions,
    ModelParams,
    ode4_residual,
    solve_system,
    substitute_iz,
)
from .spectrum import (
    DEFAULT_CUTOFFS,
    DEFAULT_TOL,
    build_hamiltonian,
    converged_spectrum,
    eigenvector_norm_diags,
    spectrum_vs_gscan,
)

log = logging.getLogger("rabi2")

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE = 0, 1, 2
DEFAULT_GRID = "-1:5:50"
DEFAULT_Z0 = "1/3"
CONTROL_ICS = InitialConditions(1, 1, 1, 0)


def _versions() -> dict:
    out = {"rabi2": __version__, "numpy": np.__version__, "kernel_backend": kernels.BACKEND}
    if kernels.HAVE_NUMBA:
        import numba

        out["numba"] = numba.__version__
    return out


def _params(args, energy_default="symbolic") -> ModelParams:
    energy = args.energy if getattr(args, "energy", None) is not None else energy_default
    return ModelParams(args.g, args.omega, args.omega0, energy)


def _cutoffs(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--cutoffs must be A,B with integers, got {text!r}") from None
    if not 2 <= a < b:
        raise UsageError(f"--cutoffs need 2 <= A < B, got {text!r}")
    return a, b


def _random_rational(rng: random.Random, nonzero: bool = False) -> Fraction:
    while True:
        x = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        if x or not nonzero:
            return x


def _random_ics(rng: random.Random) -> InitialConditions:
    return InitialConditions(*(GaussianRational(_random_rational(rng), _random_rational(rng))
                               for _ in range(4)))


def _echo(args) -> dict:
    skip = {"func", "command"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        out[k] = v if v is None or isinstance(v, (bool, int, float, str)) else str(v)
    return out


def _envelope(args, ring: str | None, result: dict, code: int) -> dict:
    status = {EXIT_OK: "verified", EXIT_FALSIFIED: "falsified"}.get(code, "error")
    return {
        "schema_version": 1,
        "command": args.command,
        "config": _echo(args),
        "versions": _versions(),
        "ring": ring,
        "status": status,
        "exit_code": code,
        "result": result,
    }


def _dump(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        p = Path(out)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---- commands ------------------------------------------------------------

def cmd_verify_g(args) -> int:
    params = _params(args)
    family = sweep_family(params, args.order, fault_at=args.inject_fault)
    uniqueness = {}
    for entry in family.entries:
        if entry.g.conditions_hold:
            key = f"{entry.phase_label}/{entry.ics_label}"
            spec = GSpec(params, entry.g.spec.phase_c, entry.g.spec.ics, args.order)
            if args.inject_fault is None:
                uniqueness[key] = uniqueness_argument_check(spec).to_json()
            else:
                # the faulted series is not a solution; report the checks on it directly
                s = entry.g.series
                uniqueness[key] = {
                    "ode4_satisfied": ode4_residual(s, params).is_zero(),
                    "initial_data_vanish": True,
                    "identically_zero": s.is_zero(),
                    "order": s.order,
                }
    control = uniqueness_argument_check(GSpec(params, 1, CONTROL_ICS, args.order)).to_json()
    code = EXIT_OK if family.claim_holds else EXIT_FALSIFIED
    g_plus = family.entry("+1", "even").g
    result = {
        "family": family.to_json(),
        "claim_holds": family.claim_holds,
        "g_plus_verdict": g_plus.verdict.to_json(),
        "vanishing_members": [f"{p}/{i}" for p, i in family.vanishing_members],
        "uniqueness": uniqueness,
        "control_uniqueness": control,
        "injected_fault": args.inject_fault,
    }
    _emit(_dump(_envelope(args, params.ring.name, result, code)), args.out)
    log.info("verify-g: claim_holds=%s", family.claim_holds)
    return code


def cmd_verify_ode4(args) -> int:
    params = _params(args)
    rng = random.Random(args.seed)
    cases = [("even", InitialConditions.even()), ("odd", InitialConditions.odd()),
             ("mixed", CONTROL_ICS)]
    cases += [(f"random{k}", _random_ics(rng)) for k in range(args.random_ics)]
    rows, ok = [], True
    for label, ics in cases:
        sol = solve_system(params, ics, args.order)
        targets = (("phi1", sol.phi1), ("phi2(iz)", substitute_iz(sol.phi2)),
                   ("G", g_series(sol, 1)))
        for name, series in targets:
            res = ode4_residual(series, params, args.a1_variant)
            first = res.first_nonzero()
            ok &= first is None
            rows.append({"ics_label": label, "ics": ics.as_list(), "function": name,
                         "checked_through": res.order, "zero": first is None,
                         "first_nonzero_index": first})
    code = EXIT_OK if ok else EXIT_FALSIFIED
    result = {"a1_variant": args.a1_variant, "residuals": rows, "all_zero": ok}
    _emit(_dump(_envelope(args, params.ring.name, result, code)), args.out)
    return code


def cmd_spectrum(args) -> int:
    params = _params(args, energy_default="0")
    a, b = _cutoffs(args.cutoffs)
    parity = None if args.parity == "both" else args.parity
    res = converged_spectrum(params, a, b, args.tol, parity_block=parity)
    full = res.full
    k = res.converged_count
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "eigenvalue", "converged_flag", "residual_bound"])
        for j, (lam, r) in enumerate(zip(full.eigenvalues, full.residuals)):
            writer.writerow([j, repr(float(lam)), int(j < k), repr(float(r))])
        _emit(buf.getvalue(), args.out)
        return EXIT_OK
    h = build_hamiltonian(params, b, parity)
    levels = []
    for j in range(k):
        diags = eigenvector_norm_diags(h, res.eigenvectors[:, j])
        levels.append({"index": j, "eigenvalue": float(res.eigenvalues[j]),
                       "residual": float(res.residuals[j]),
                       "bargmann": {n: d.classification for n, d in diags.items()}})
    result = {
        "cutoffs": [a, b],
        "tolerance": args.tol,
        "parity": args.parity,
        "converged_count": k,
        "status": res.status,
        "residual_bound": float(res.residual_bound),
        "levels": levels,
        "total_levels": int(full.eigenvalues.size),
    }
    _emit(_dump(_envelope(args, None, result, EXIT_OK)), args.out)
    return EXIT_OK


def _render_report(rep, grid) -> str:
    lines = ["Two-photon Rabi model: G-function scan vs truncated spectrum",
             "params: " + ", ".join(f"{k}={v}" for k, v in rep.params.as_dict().items() if k != "energy")]
    if rep.scan is not None:
        lines.append(f"G scan at z0 = {format_gaussian(rep.scan.z0)}, order {rep.scan.order}, "
                     f"{len(grid)} energies in [{format_rational(grid[0])}, {format_rational(grid[-1])}]:")
        lines.append(f"  exact zeros: {rep.scan.zero_count}/{len(rep.scan.points)}")
    else:
        lines.append(f"G scan skipped: {rep.scan_skipped}")
    if rep.control is not None:
        vals = [abs(complex(p.value)) for p in rep.control.points]
        lines.append(f"control data (1,1,1,0): nonzero at {len(rep.control.points) - rep.control.zero_count}"
                     f"/{len(vals)} energies, |G| from {min(vals):.3e} to {max(vals):.3e}")
    s = rep.spectrum
    lines.append(f"converged levels ({s.converged_count}, cutoffs {s.truncation_pair}, tol {s.tolerance:g}):")
    for j, lam in enumerate(s.eigenvalues[:20]):
        lines.append(f"  E_{j:<3d} = {lam: .12f}")
    if s.converged_count and s.converged_count > 20:
        lines.append(f"  ... {s.converged_count - 20} more")
    lines.append(rep.conclusion())
    return "\n".join(lines) + "\n"


def cmd_report(args) -> int:
    params = _params(args, energy_default="0")
    a, b = _cutoffs(args.cutoffs)
    grid = parse_grid(args.grid)
    z0 = parse_gaussian(args.z0)
    parity = None if args.parity == "both" else args.parity
    rep = spectrum_vs_gscan(params, grid, z0, cutoffs=(a, b), tol=args.tol, order=args.order,
                            control=args.control, parity_block=parity)
    code = EXIT_OK if (rep.scan is None or rep.scan.all_zero) else EXIT_FALSIFIED
    result = {
        "scan": rep.scan.to_json() if rep.scan is not None else None,
        "scan_skipped": rep.scan_skipped,
        "control_scan": rep.control.to_json() if rep.control is not None else None,
        "spectrum": {
            "cutoffs": [a, b],
            "converged_count": rep.spectrum.converged_count,
            "eigenvalues": [float(x) for x in rep.spectrum.eigenvalues],
            "residual_bound": float(rep.spectrum.residual_bound),
            "bargmann": [{n: d.classification for n, d in diag.items()} for diag in rep.norm_diags],
        },
        "conclusion": rep.conclusion(),
    }
    payload = _dump(_envelope(args, "gaussian", result, code))
    if args.format == "json":
        _emit(payload, args.out)
    else:
        sys.stdout.write(_render_report(rep, grid))
        if args.out:
            _emit(payload, args.out)
    return code


def cmd_selftest(args) -> int:
    from .acceptance import run_all

    results = run_all(stream=sys.stdout)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FALSIFIED


# ---- parser --------------------------------------------------------------

def _add_params(p, energy: bool = True) -> None:
    p.add_argument("--g", default="1/10", help="coupling g (exact rational, default 1/10)")
    p.add_argument("--omega", default="1", help="field frequency (default 1)")
    p.add_argument("--omega0", default="7/10", help="level splitting (default 7/10)")
    if energy:
        p.add_argument("--energy", default=None,
                       help="rational energy or 'symbolic' (default symbolic)")
    p.add_argument("--out", default=None, help="write the report to PATH instead of stdout")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized cases (default 0)")


def _add_spectrum(p) -> None:
    p.add_argument("--cutoffs", default=f"{DEFAULT_CUTOFFS[0]},{DEFAULT_CUTOFFS[1]}",
                   help="two photon cutoffs A,B (default 500,600)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="agreement tolerance (default 1e-10)")
    p.add_argument("--parity", choices=("even", "odd", "both"), default="both")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rabi2",
        description="Exact G-function checks and truncated spectra for the two-photon Rabi model.",
    )
    parser.add_argument("--version", action="version", version=f"rabi2 {__version__}")
    parser.add_argument("--selftest", action="store_true", help="run the acceptance suite and exit")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("verify-g", help="certify that the G family vanishes to a finite order")
    _add_params(p)
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p.add_argument("--inject-fault", type=int, default=None, metavar="K",
                   help="testing aid: add 1 to the z^K coefficient of phi1")
    p.set_defaults(func=cmd_verify_g)

    p = sub.add_parser("verify-ode4", help="check the fourth-order equation on phi1, phi2(iz), G")
    _add_params(p)
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p.add_argument("--a1-variant", choices=A1_VARIANTS, default="resolved")
    p.add_argument("--random-ics", type=int, default=3, help="number of seeded random initial data")
    p.set_defaults(func=cmd_verify_ode4)

    p = sub.add_parser("spectrum", help="converged truncated spectrum")
    _add_params(p, energy=False)
    _add_spectrum(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("report", help="G scan next to the converged spectrum")
    _add_params(p, energy=False)
    _add_spectrum(p)
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p.add_argument("--z0", default=DEFAULT_Z0, help="evaluation point (default 1/3)")
    p.add_argument("--grid", default=DEFAULT_GRID, help="energies lo:hi:count (default -1:5:50)")
    p.add_argument("--control", action="store_true", help="also scan the control data (1,1,1,0)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.set_defaults(func=cmd_selftest)
    return parser


def _configure_logging() -> None:
    level = os.environ.get("RABI2_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.selftest:
        args.command = "selftest"
        args.func = cmd_selftest
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, SpectralCollapseError, SingularRecurrenceError) as exc:
        print(f"rabi2: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"rabi2: solver failure: {exc}", file=sys.stderr)
        return EXIT_FALSIFIED


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
