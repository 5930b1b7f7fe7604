"""The G_c(z, E) = phi2(iz) - c*phi1(z) family and its vanishing certificate."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .errors import UsageError
from .exact import (
    GaussianRational,
    I,
    format_element,
    format_gaussian,
    format_rational,
    parse_rational,
)
from .series import (
    DEFAULT_ORDER,
    InitialConditions,
    ModelParams,
    PowerSeries,
    SystemSolution,
    linear_combine,
    ode4_coefficients,
    ode4_residual,
    solve_system,
    substitute_iz,
)


@dataclass(frozen=True)
class AllZeroUpTo:
    order: int

    def to_json(self):
        return "all_zero"


@dataclass(frozen=True)
class FirstNonzero:
    index: int
    value: object

    def to_json(self):
        return {"first_nonzero": {"index": self.index, "value": format_element(self.value)}}


Verdict = Union[AllZeroUpTo, FirstNonzero]


def verdict_of(series: PowerSeries) -> Verdict:
    k = series.first_nonzero()
    if k is None:
        return AllZeroUpTo(series.order)
    return FirstNonzero(k, series[k])


@dataclass(frozen=True)
class GSpec:
    params: ModelParams
    phase_c: GaussianRational = GaussianRational(1)
    ics: InitialConditions = field(default_factory=InitialConditions.even)
    order: int = DEFAULT_ORDER

    def __post_init__(self):
        if not isinstance(self.phase_c, GaussianRational):
            object.__setattr__(self, "phase_c", GaussianRational(self.phase_c))
        if self.order < 4:
            raise UsageError(f"G order must be >= 4, got {self.order}")


@dataclass(frozen=True)
class GFunction:
    spec: GSpec
    series: PowerSeries
    derivative_conditions: tuple
    verdict: Verdict
    solution: SystemSolution = field(repr=False, compare=False)

    @property
    def conditions_hold(self) -> bool:
        return all(self.derivative_conditions)

    def to_json(self, phase_label: str | None = None, ics_label: str | None = None) -> dict:
        out = {
            "phase": phase_label or format_gaussian(self.spec.phase_c),
            "ics": self.spec.ics.as_list(),
            "order": self.spec.order,
            "derivative_conditions": list(self.derivative_conditions),
            "verdict": self.verdict.to_json(),
        }
        if ics_label:
            out["ics_label"] = ics_label
        return out


def g_series(sol: SystemSolution, phase_c) -> PowerSeries:
    return linear_combine(substitute_iz(sol.phi2), sol.phi1, 1, -phase_c)


def build_g(spec: GSpec, *, fault_at: int | None = None) -> GFunction:
    sol = solve_system(spec.params, spec.ics, spec.order, fault_at=fault_at)
    series = g_series(sol, spec.phase_c)
    conditions = tuple(not series[k] for k in range(4))
    return GFunction(spec, series, conditions, verdict_of(series), sol)


@dataclass(frozen=True)
class DerivativeCheck:
    conditions: tuple
    derivatives_at_zero: tuple
    eq5_applicable: bool
    eq5_holds: bool | None
    phi1_second: object
    phi2_second: object
    expected_second: object

    @property
    def all_vanish(self) -> bool:
        return all(self.conditions)


def _is_standard_even(ics: InitialConditions, ring) -> bool:
    return ics.lifted(ring) == InitialConditions.even().lifted(ring)


def check_derivative_conditions(gf: GFunction) -> DerivativeCheck:
    """G(0), G'(0), G''(0), G'''(0) and the phi'' identity at the origin.

    The identity phi1''(0) = -phi2''(0) = (2E - w0)/(4g) is only claimed for
    the standard even initial data (1, 0, 1, 0); for other data it is
    reported as not applicable.
    """
    s = gf.series
    factorials = (1, 1, 2, 6)
    derivs = tuple(s[k] * factorials[k] for k in range(4))
    params = gf.spec.params
    ring = params.ring
    sol = gf.solution
    phi1_pp = sol.phi1[2] * 2
    phi2_pp = sol.phi2[2] * 2
    expected = (params.energy_element * 2 - ring.lift(params.omega0)) / (4 * params.g)
    applicable = _is_standard_even(gf.spec.ics, ring)
    holds = (phi1_pp == expected and phi2_pp == -expected) if applicable else None
    return DerivativeCheck(
        conditions=tuple(not d for d in derivs),
        derivatives_at_zero=derivs,
        eq5_applicable=applicable,
        eq5_holds=holds,
        phi1_second=phi1_pp,
        phi2_second=phi2_pp,
        expected_second=expected,
    )


def regenerate_from_ode4(seed: Sequence, params: ModelParams, order: int) -> list:
    """Extend four initial coefficients to ``order`` with the fourth-order recurrence.

    Matching z^n in 16g^2 f'''' + a2 f'' + a1 f' + a0 f = 0 isolates
    16g^2 (n+1)(n+2)(n+3)(n+4) f_{n+4}; everything else involves f_m, m <= n+2.
    """
    ring = params.ring
    coef = ode4_coefficients(params)
    f = [ring.lift(x) for x in seed[:4]] + [ring.zero] * (order - 3)
    lower = ((2, coef.a2), (1, coef.a1), (0, coef.a0))
    for n in range(order - 3):
        acc = ring.zero
        for k, terms in lower:
            for j, c in terms:
                i = n - j
                if i < 0:
                    continue
                falling = 1
                for t in range(i + 1, i + k + 1):
                    falling *= t
                x = f[i + k]
                if x:
                    acc = acc + x * c * falling
        f[n + 4] = -acc / (coef.leading * (n + 1) * (n + 2) * (n + 3) * (n + 4))
    return f


@dataclass(frozen=True)
class UniquenessReport:
    ode4_satisfied: bool
    initial_data_vanish: bool
    identically_zero: bool
    regenerated_matches: bool
    order: int

    def to_json(self) -> dict:
        return {
            "ode4_satisfied": self.ode4_satisfied,
            "initial_data_vanish": self.initial_data_vanish,
            "identically_zero": self.identically_zero,
            "regenerated_matches": self.regenerated_matches,
            "order": self.order,
        }


def uniqueness_argument_check(spec: GSpec) -> UniquenessReport:
    """Replay the uniqueness argument on an actual G series.

    (a) G solves the fourth-order equation through N-4; (b) its first four
    coefficients vanish; (c) G is zero through N.  As a cross-check of (c),
    the fourth-order recurrence seeded with G's first four coefficients must
    regenerate G exactly.
    """
    gf = build_g(spec)
    s = gf.series
    residual = ode4_residual(s, spec.params)
    regenerated = regenerate_from_ode4(s.coeffs[:4], spec.params, s.order)
    return UniquenessReport(
        ode4_satisfied=residual.is_zero(),
        initial_data_vanish=gf.conditions_hold,
        identically_zero=s.is_zero(),
        regenerated_matches=list(s.coeffs) == regenerated,
        order=s.order,
    )


FAMILY_PHASES = (("+1", GaussianRational(1)), ("-1", GaussianRational(-1)),
                 ("+i", I), ("-i", -I))
FAMILY_ICS = (("even", InitialConditions.even()), ("odd", InitialConditions.odd()))


@dataclass(frozen=True)
class FamilyEntry:
    phase_label: str
    ics_label: str
    g: GFunction

    def to_json(self) -> dict:
        return self.g.to_json(self.phase_label, self.ics_label)


@dataclass(frozen=True)
class FamilyReport:
    params: ModelParams
    order: int
    entries: tuple

    @property
    def claim_holds(self) -> bool:
        """Every member whose first four derivatives vanish is zero through N."""
        return all(isinstance(e.g.verdict, AllZeroUpTo)
                   for e in self.entries if e.g.conditions_hold)

    @property
    def vanishing_members(self) -> list:
        return [(e.phase_label, e.ics_label) for e in self.entries
                if isinstance(e.g.verdict, AllZeroUpTo)]

    def entry(self, phase_label: str, ics_label: str) -> FamilyEntry:
        for e in self.entries:
            if (e.phase_label, e.ics_label) == (phase_label, ics_label):
                return e
        raise KeyError((phase_label, ics_label))

    def to_json(self) -> list:
        return [e.to_json() for e in self.entries]


def sweep_family(params: ModelParams, order: int = DEFAULT_ORDER, *,
                 fault_at: int | None = None) -> FamilyReport:
    """All phases c in {+1, -1, +i, -i} crossed with even and odd initial data.

    Only the +1 phase with even data is G_+ proper; the rest cover the sign
    and phase conventions the other three members could carry.
    """
    entries = []
    for ics_label, ics in FAMILY_ICS:
        sol = solve_system(params, ics, order, fault_at=fault_at)
        for phase_label, c in FAMILY_PHASES:
            spec = GSpec(params, c, ics, order)
            series = g_series(sol, c)
            conditions = tuple(not series[k] for k in range(4))
            gf = GFunction(spec, series, conditions, verdict_of(series), sol)
            entries.append(FamilyEntry(phase_label, ics_label, gf))
    return FamilyReport(params, order, tuple(entries))


# ---- scanning G(z0, E) over energies -----------------------------------

def energy_grid(lo, hi, count: int) -> list[Fraction]:
    """``count`` equally spaced exact energies from lo to hi inclusive."""
    lo, hi = Fraction(lo), Fraction(hi)
    if count < 1:
        raise UsageError("energy grid needs at least one point")
    if count == 1:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + k * step for k in range(count)]


def parse_grid(text: str) -> list[Fraction]:
    """Parse ``"lo:hi:count"``."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be lo:hi:count, got {text!r}")
    try:
        count = int(parts[2])
    except ValueError:
        raise UsageError(f"grid count must be an integer, got {parts[2]!r}") from None
    return energy_grid(parse_rational(parts[0]), parse_rational(parts[1]), count)


@dataclass(frozen=True)
class ScanPoint:
    energy: Fraction
    value: GaussianRational

    def to_json(self) -> dict:
        v = complex(self.value)
        return {
            "energy": format_rational(self.energy),
            "exact_zero": not self.value,
            "value": [v.real, v.imag],
        }


@dataclass(frozen=True)
class ScanReport:
    z0: GaussianRational
    order: int
    phase_c: GaussianRational
    ics: InitialConditions
    points: tuple

    @property
    def all_zero(self) -> bool:
        return all(not p.value for p in self.points)

    @property
    def zero_count(self) -> int:
        return sum(1 for p in self.points if not p.value)

    def to_json(self) -> dict:
        return {
            "z0": format_gaussian(self.z0),
            "order": self.order,
            "phase": format_gaussian(self.phase_c),
            "ics": self.ics.as_list(),
            "all_zero": self.all_zero,
            "zero_count": self.zero_count,
            "points": [p.to_json() for p in self.points],
        }


def g_root_scan(params: ModelParams, grid: Sequence, z0=Fraction(1, 3),
                order: int = DEFAULT_ORDER, ics: InitialConditions | None = None,
                phase_c=1) -> ScanReport:
    """Evaluate the truncated G series at z0 for every energy on ``grid``.

    The energy stored in ``params`` is ignored.  Keep |z0| <= 2: for the
    non-vanishing control data the truncated sum is only meaningful there.
    """
    if not len(grid):
        raise UsageError("energy grid is empty")
    ics = ics or InitialConditions.even()
    z0 = z0 if isinstance(z0, GaussianRational) else GaussianRational(z0)
    phase_c = phase_c if isinstance(phase_c, GaussianRational) else GaussianRational(phase_c)
    points = []
    for e in grid:
        sol = solve_system(params.with_energy(Fraction(e)), ics, order)
        points.append(ScanPoint(Fraction(e), g_series(sol, phase_c).evaluate(z0)))
    return ScanReport(z0, order, phase_c, ics, tuple(points))
