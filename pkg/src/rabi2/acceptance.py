"""Acceptance checks, runnable without pytest via ``rabi2 selftest``.

Each ``criterion_N`` returns a :class:`CriterionResult`.  Tolerances, seeds and
orders are fixed in this module and nowhere else.
"""

from __future__ import annotations

import contextlib
import io
import json
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import SpectralCollapseError
from .exact import EPoly, GaussianRational
from .gfunction import AllZeroUpTo, FirstNonzero, GSpec, build_g, check_derivative_conditions, g_series
from .kernels import EPS
from .series import InitialConditions, ModelParams, ode4_residual, solve_system, substitute_iz
from .spectrum import (
    bogoliubov_levels,
    build_hamiltonian,
    converged_spectrum,
    decoupled_levels,
    diagonalize,
)

DEFAULTS = ModelParams("1/10", 1, "7/10")
CERTIFICATE_ORDER = 200
CERTIFICATE_SECONDS = 30.0
RANDOM_TRIPLES, RANDOM_TRIPLE_ORDER = 25, 64
RANDOM_ENERGIES = 10
RANDOM_ICS, RANDOM_ICS_ORDER = 25, 64
G0_LEVELS, G0_TOL = 20, 1e-12
BOGOLIUBOV_LEVELS, BOGOLIUBOV_TOL, BOGOLIUBOV_CUTOFFS = 10, 1e-8, (500, 600)
CONVERGENCE_LEVELS, CONVERGENCE_TOL = 10, 1e-10
LADDER = (100, 200, 300, 400, 500, 600)
INTERLACING_SLACK_ULPS = 64
COLLAPSE_COUPLINGS, COLLAPSE_TOL, COLLAPSE_SPACINGS = ("1/5", "6/25"), 1e-6, 5
REFUSED_COUPLINGS = ("1/4", "3/10", "-1/4")
REPORT_GRID, REPORT_Z0, REPORT_POINTS = "0:2:50", "1/3", 50
SUITE_SECONDS = 300.0


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] criterion {self.number:>2}: {self.title} -- {self.detail} ({self.seconds:.1f}s)"


def _timed(number: int, title: str):
    def wrap(fn):
        def run() -> CriterionResult:
            t0 = time.perf_counter()
            passed, detail = fn()
            return CriterionResult(number, title, bool(passed), detail, time.perf_counter() - t0)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


def _rational(rng: random.Random, nonzero: bool = False) -> Fraction:
    while True:
        x = Fraction(rng.randint(-12, 12), rng.randint(1, 12))
        if x or not nonzero:
            return x


def random_triples(seed: int = 1, count: int = RANDOM_TRIPLES) -> list[ModelParams]:
    rng = random.Random(seed)
    return [ModelParams(_rational(rng, nonzero=True), _rational(rng), _rational(rng))
            for _ in range(count)]


def random_ics(seed: int = 4, count: int = RANDOM_ICS) -> list[InitialConditions]:
    rng = random.Random(seed)
    return [InitialConditions(*(GaussianRational(_rational(rng), _rational(rng)) for _ in range(4)))
            for _ in range(count)]


@_timed(1, "vanishing certificate")
def criterion_1():
    t0 = time.perf_counter()
    gf = build_g(GSpec(DEFAULTS, order=CERTIFICATE_ORDER))
    elapsed = time.perf_counter() - t0
    main_ok = (gf.verdict == AllZeroUpTo(CERTIFICATE_ORDER)
               and all(isinstance(c, EPoly) and c.degree == -1 for c in gf.series))
    bad = [p.as_dict() for p in random_triples()
           if not isinstance(build_g(GSpec(p, order=RANDOM_TRIPLE_ORDER)).verdict, AllZeroUpTo)]
    ok = main_ok and elapsed <= CERTIFICATE_SECONDS and not bad
    return ok, (f"order {CERTIFICATE_ORDER} zero polynomials: {main_ok} in {elapsed:.1f}s; "
                f"{RANDOM_TRIPLES - len(bad)}/{RANDOM_TRIPLES} random triples zero at order {RANDOM_TRIPLE_ORDER}")


@_timed(2, "phi'' identity at the origin")
def criterion_2():
    sym = check_derivative_conditions(build_g(GSpec(DEFAULTS, order=8))).eq5_holds
    rng = random.Random(2)
    energies = [_rational(rng) for _ in range(RANDOM_ENERGIES)]
    bound = [check_derivative_conditions(build_g(GSpec(DEFAULTS.with_energy(e), order=8))).eq5_holds
             for e in energies]
    return sym and all(bound), f"symbolic E: {sym}; {sum(bound)}/{len(bound)} rational energies"


@_timed(3, "odd coefficients vanish for even data")
def criterion_3():
    sol = solve_system(DEFAULTS, InitialConditions.even(), CERTIFICATE_ORDER)
    odd = [n for n in range(1, CERTIFICATE_ORDER + 1, 2) if sol.phi1[n] or sol.phi2[n]]
    return not odd, f"nonzero odd coefficients through {CERTIFICATE_ORDER}: {len(odd)}"


@_timed(4, "fourth-order equation membership")
def criterion_4():
    failures = 0
    for ics in random_ics():
        sol = solve_system(DEFAULTS, ics, RANDOM_ICS_ORDER)
        for s in (sol.phi1, substitute_iz(sol.phi2), g_series(sol, 1)):
            failures += not ode4_residual(s, DEFAULTS).is_zero()
    checks = 3 * RANDOM_ICS
    return failures == 0, f"{checks - failures}/{checks} residuals zero through {RANDOM_ICS_ORDER - 4}"


@_timed(5, "control data does not vanish")
def criterion_5():
    gf = build_g(GSpec(DEFAULTS, 1, InitialConditions(1, 1, 1, 0), CERTIFICATE_ORDER))
    expected = FirstNonzero(1, DEFAULTS.ring.lift(-1))
    return gf.verdict == expected, f"verdict {gf.verdict.to_json()}"


@_timed(6, "g = 0 spectrum")
def criterion_6():
    p = ModelParams(0, 1, "7/10")
    res = diagonalize(build_hamiltonian(p, BOGOLIUBOV_CUTOFFS[1]))
    err = float(np.max(np.abs(res.eigenvalues[:G0_LEVELS] - decoupled_levels(p, G0_LEVELS))))
    return err <= G0_TOL, f"max error over {G0_LEVELS} levels {err:.2e} (tol {G0_TOL:g})"


@_timed(7, "w0 = 0 squeezed-oscillator spectrum")
def criterion_7():
    p = ModelParams("1/10", 1, 0)
    oracle = bogoliubov_levels(p, BOGOLIUBOV_LEVELS)
    errs, gaps = [], []
    for n_max in BOGOLIUBOV_CUTOFFS:
        w = diagonalize(build_hamiltonian(p, n_max)).eigenvalues[:BOGOLIUBOV_LEVELS]
        errs.append(float(np.max(np.abs(w - oracle))))
        gaps.append(float(np.max(w[1::2] - w[0::2])))
    ok = max(errs) <= BOGOLIUBOV_TOL and max(gaps) < BOGOLIUBOV_TOL
    return ok, (f"errors at n_max {BOGOLIUBOV_CUTOFFS}: {errs[0]:.1e}, {errs[1]:.1e}; "
                f"max degeneracy gap {max(gaps):.1e}")


@_timed(8, "cutoff convergence and interlacing")
def criterion_8():
    res = converged_spectrum(DEFAULTS, 500, 600, CONVERGENCE_TOL)
    conv_ok = res.converged_count >= CONVERGENCE_LEVELS
    ladder = [diagonalize(build_hamiltonian(DEFAULTS, n)).eigenvalues for n in LADDER]
    worst = -np.inf
    for small, large in zip(ladder[:-1], ladder[1:]):
        slack = INTERLACING_SLACK_ULPS * EPS * float(np.max(np.abs(large)))
        worst = max(worst, float(np.max(large[:small.size] - small - slack)))
    inter_ok = worst <= 0
    return conv_ok and inter_ok, (f"{res.converged_count} levels agree to {CONVERGENCE_TOL:g}; "
                                  f"interlacing over {LADDER[0]}..{LADDER[-1]}: {inter_ok}")


@_timed(9, "near-collapse spacing and refusal")
def criterion_9():
    details, ok = [], True
    for g in COLLAPSE_COUPLINGS:
        p = ModelParams(g, 1, 0)
        w = diagonalize(build_hamiltonian(p, BOGOLIUBOV_CUTOFFS[1])).eigenvalues
        spacing = w[2:2 * COLLAPSE_SPACINGS + 1:2] - w[0:2 * COLLAPSE_SPACINGS - 1:2]
        eps = math.sqrt(1 - 16 * float(Fraction(g)) ** 2)
        err = float(np.max(np.abs(spacing - eps)))
        ok &= err <= COLLAPSE_TOL
        details.append(f"g={g}: spacing error {err:.1e}")
    refused = 0
    for g in REFUSED_COUPLINGS:
        try:
            build_hamiltonian(ModelParams(g, 1, 0), 10)
        except SpectralCollapseError as exc:
            refused += "collapse" in str(exc)
    ok &= refused == len(REFUSED_COUPLINGS)
    details.append(f"refused {refused}/{len(REFUSED_COUPLINGS)} couplings with |4g| >= w")
    return ok, "; ".join(details)


@_timed(10, "G scan vs discrete spectrum report")
def criterion_10():
    from .cli import main

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(["report", "--z0", REPORT_Z0, "--grid", REPORT_GRID, "--format", "json"])
    payload = json.loads(buf.getvalue())
    scan = payload["result"]["scan"]
    levels = payload["result"]["spectrum"]["eigenvalues"]
    discrete = len(levels) > 0 and bool(np.all(np.diff(levels) > 0))
    ok = (code == 0 and scan["all_zero"] and scan["zero_count"] == REPORT_POINTS
          and len(scan["points"]) == REPORT_POINTS and discrete)
    return ok, (f"exit {code}; {scan['zero_count']}/{len(scan['points'])} exact zeros at z0={REPORT_Z0}; "
                f"{len(levels)} distinct converged levels")


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10)


def run_all(stream=None) -> list[CriterionResult]:
    t0 = time.perf_counter()
    results = []
    for crit in CRITERIA:
        r = crit()
        results.append(r)
        if stream is not None:
            print(r.line(), file=stream, flush=True)
    total = time.perf_counter() - t0
    suite = CriterionResult(0, "suite runtime", total <= SUITE_SECONDS,
                            f"{total:.1f}s (limit {SUITE_SECONDS:g}s)", total)
    results.append(suite)
    if stream is not None:
        print(suite.line(), file=stream, flush=True)
    return results
