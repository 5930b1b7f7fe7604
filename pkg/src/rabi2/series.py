"""Exact truncated power-series solutions of the two-photon Rabi system.

In the Bargmann picture the eigenproblem for the pair (phi1, phi2) reads::

    2g phi1'' + w z phi1' + (2g z^2 - E) phi1 + (w0/2) phi2 = 0
    2g phi2'' - w z phi2' + (2g z^2 + E) phi2 - (w0/2) phi1 = 0

Writing phi1 = sum p_n z^n, phi2 = sum q_n z^n and matching powers of z gives
a three-term recurrence that fixes p_{n+2}, q_{n+2} from p_n, q_n, p_{n-2},
q_{n-2}.  :func:`solve_system` runs it; :func:`system_residual` substitutes the
result back into the differential operators and is the independent check.

Eliminating phi2 gives a fourth-order equation for phi1 alone,
``16g^2 f'''' + a2 f'' + a1 f' + a0 f = 0``; :func:`ode4_residual` evaluates
its left-hand side on any series.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import SingularRecurrenceError, UsageError
from .exact import (
    EPOLY,
    GAUSSIAN,
    EPoly,
    GaussianRational,
    Ring,
    format_element,
    format_rational,
    parse_rational,
)

DEFAULT_ORDER = 200
A1_VARIANTS = ("resolved", "shifted")


class _Symbolic:
    """Marker for an energy kept as the polynomial indeterminate E."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "SYMBOLIC"

    def __str__(self):
        return "symbolic"

    def __reduce__(self):
        return (_Symbolic, ())


SYMBOLIC = _Symbolic()


def _coerce_rational(x) -> Fraction:
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise UsageError("parameters must be exact rationals, not floats")
    return Fraction(x)


@dataclass(frozen=True)
class ModelParams:
    """Coupling ``g``, field frequency ``omega``, splitting ``omega0``, energy.

    Accepts ints, Fractions or rational strings such as ``"1/10"``; floats are
    rejected.  ``energy`` is either a rational or :data:`SYMBOLIC`.
    """

    g: Fraction
    omega: Fraction
    omega0: Fraction
    energy: Fraction | _Symbolic = SYMBOLIC

    def __post_init__(self):
        for name in ("g", "omega", "omega0"):
            object.__setattr__(self, name, _coerce_rational(getattr(self, name)))
        e = self.energy
        if isinstance(e, str) and e.strip().lower() in ("symbolic", "e"):
            e = SYMBOLIC
        if e is not SYMBOLIC:
            e = _coerce_rational(e)
        object.__setattr__(self, "energy", e)

    @property
    def symbolic(self) -> bool:
        return self.energy is SYMBOLIC

    @property
    def ring(self) -> Ring:
        return EPOLY if self.symbolic else GAUSSIAN

    @property
    def energy_element(self):
        """E as an element of the active ring."""
        if self.symbolic:
            return EPoly.indeterminate()
        return GaussianRational(self.energy)

    def with_energy(self, energy) -> "ModelParams":
        return ModelParams(self.g, self.omega, self.omega0, energy)

    def as_dict(self) -> dict:
        return {
            "g": format_rational(self.g),
            "omega": format_rational(self.omega),
            "omega0": format_rational(self.omega0),
            "energy": "symbolic" if self.symbolic else format_rational(self.energy),
        }


@dataclass(frozen=True)
class InitialConditions:
    """Values and first derivatives of phi1, phi2 at z = 0."""

    phi1_0: object = 1
    phi1_prime_0: object = 0
    phi2_0: object = 1
    phi2_prime_0: object = 0

    @classmethod
    def even(cls) -> "InitialConditions":
        return cls(1, 0, 1, 0)

    @classmethod
    def odd(cls) -> "InitialConditions":
        return cls(0, 1, 0, 1)

    def values(self) -> tuple:
        return (self.phi1_0, self.phi1_prime_0, self.phi2_0, self.phi2_prime_0)

    def lifted(self, ring: Ring) -> tuple:
        return tuple(ring.lift(v) for v in self.values())

    def scaled(self, c) -> "InitialConditions":
        return InitialConditions(*(v * c for v in self.values()))

    def __add__(self, other):
        if not isinstance(other, InitialConditions):
            return NotImplemented
        return InitialConditions(*(a + b for a, b in zip(self.values(), other.values())))

    def as_list(self) -> list:
        return [format_element(v) if isinstance(v, (EPoly, GaussianRational))
                else format_element(GaussianRational(v)) for v in self.values()]


@dataclass(frozen=True)
class PowerSeries:
    """Coefficients of z^0 .. z^order; nothing is known beyond ``order``."""

    coeffs: tuple
    ring: Ring

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n):
        return self.coeffs[n]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def first_nonzero(self) -> int | None:
        for n, c in enumerate(self.coeffs):
            if c:
                return n
        return None

    def truncate(self, order: int) -> "PowerSeries":
        if order > self.order:
            raise UsageError(f"cannot extend a series of order {self.order} to {order}")
        return PowerSeries(self.coeffs[: order + 1], self.ring)

    def evaluate(self, z0):
        """Horner evaluation of the truncated polynomial at an exact point."""
        z = GaussianRational(z0) if not isinstance(z0, GaussianRational) else z0
        acc = self.ring.zero
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def at_energy(self, energy) -> "PowerSeries":
        """Evaluate every E-polynomial coefficient at a concrete energy."""
        if not self.ring.symbolic:
            raise UsageError("series already has a bound energy")
        return PowerSeries([c.evaluate(energy) for c in self.coeffs], GAUSSIAN)

    def to_json(self) -> list:
        return [format_element(c) for c in self.coeffs]

    @classmethod
    def from_scalars(cls, values: Sequence, ring: Ring) -> "PowerSeries":
        return cls([ring.lift(v) for v in values], ring)


@dataclass(frozen=True)
class SystemSolution:
    phi1: PowerSeries
    phi2: PowerSeries
    params: ModelParams
    ics: InitialConditions
    fault_at: int | None = field(default=None, compare=False)

    @property
    def order(self) -> int:
        return self.phi1.order

    def to_json(self) -> dict:
        """Series dump: coefficient strings plus the metadata needed to rerun."""
        return {
            "params": self.params.as_dict(),
            "ics": self.ics.as_list(),
            "order": self.order,
            "ring": self.params.ring.name,
            "phi1": self.phi1.to_json(),
            "phi2": self.phi2.to_json(),
        }


@dataclass(frozen=True)
class Ode4Coefficients:
    """z-polynomial coefficients of the fourth-order equation.

    Each of ``a2``, ``a1``, ``a0`` is a tuple of (power of z, coefficient)
    pairs; coefficients are Fractions or ring elements when they involve E.
    """

    leading: Fraction
    a2: tuple
    a1: tuple
    a0: tuple


def ode4_coefficients(params: ModelParams, a1_variant: str = "resolved") -> Ode4Coefficients:
    """Build a2, a1, a0.

    ``a1_variant="shifted"`` reads the a1 bracket as ``4z[(16g^2 - w)(w - 2E)]``
    instead of ``4z[16g^2 - w(w - 2E)]``.  It exists only to show that the
    residual check rejects it.
    """
    if a1_variant not in A1_VARIANTS:
        raise UsageError(f"a1_variant must be one of {A1_VARIANTS}, got {a1_variant!r}")
    g, w, w0 = params.g, params.omega, params.omega0
    ring = params.ring
    e = params.energy_element
    if a1_variant == "resolved":
        a1 = ring.lift(4 * (16 * g * g - w * w)) + e * (8 * w)
    else:
        k = 16 * g * g - w
        a1 = ring.lift(4 * k * w) - e * (8 * k)
    a0_const = ring.lift(32 * g * g + w0 * w0) - e * e * 4
    return Ode4Coefficients(
        leading=16 * g * g,
        a2=((0, 16 * g * w), (2, -4 * (w * w - 8 * g * g))),
        a1=((1, a1),),
        a0=((0, a0_const), (2, -16 * g * w), (4, 16 * g * g)),
    )


def _check_order(order: int) -> None:
    if not isinstance(order, int) or isinstance(order, bool):
        raise UsageError(f"order must be an integer, got {order!r}")
    if order < 4:
        raise UsageError(f"series order must be >= 4, got {order}")


def solve_system(params: ModelParams, ics: InitialConditions | None = None,
                 order: int = DEFAULT_ORDER, *, fault_at: int | None = None) -> SystemSolution:
    """Power-series solution through z^order.

    ``fault_at`` adds one to p_{fault_at} right after it is computed; it is a
    fault-injection hook for exercising the failure paths of the verifiers.
    """
    _check_order(order)
    if params.g == 0:
        raise SingularRecurrenceError("g = 0: the recurrence divides by 2g(n+1)(n+2)")
    if ics is None:
        ics = InitialConditions.even()
    if fault_at is not None and not 0 <= fault_at <= order:
        raise UsageError(f"fault index {fault_at} outside 0..{order}")
    ring = params.ring
    g, w = params.g, params.omega
    half_w0 = params.omega0 / 2
    two_g = 2 * g
    e = params.energy_element
    zero = ring.zero

    p0, p1, q0, q1 = ics.lifted(ring)
    p = [p0, p1] + [zero] * (order - 1)
    q = [q0, q1] + [zero] * (order - 1)
    if fault_at in (0, 1):
        p[fault_at] = p[fault_at] + ring.one
    for n in range(order - 1):
        inv = 1 / (two_g * (n + 1) * (n + 2))
        pn, qn = p[n], q[n]
        ep, eq = e * pn, e * qn
        a = ep - pn * (w * n) - qn * half_w0
        b = qn * (w * n) - eq + pn * half_w0
        if n >= 2:
            a = a - p[n - 2] * two_g
            b = b - q[n - 2] * two_g
        p[n + 2] = a * inv
        q[n + 2] = b * inv
        if fault_at == n + 2:
            p[n + 2] = p[n + 2] + ring.one
    return SystemSolution(PowerSeries(p, ring), PowerSeries(q, ring), params, ics, fault_at)


def substitute_iz(s: PowerSeries) -> PowerSeries:
    """Series of s(iz): coefficient n picks up a factor i^n."""
    return PowerSeries([c.mul_i_power(n) for n, c in enumerate(s.coeffs)], s.ring)


def linear_combine(a: PowerSeries, b: PowerSeries, ca, cb) -> PowerSeries:
    if a.order != b.order:
        raise UsageError(f"order mismatch: {a.order} vs {b.order}")
    if a.ring != b.ring:
        raise UsageError("series live in different rings")
    ring = a.ring
    ca, cb = ring.lift(ca), ring.lift(cb)
    return PowerSeries([ca * x + cb * y for x, y in zip(a.coeffs, b.coeffs)], ring)


def differentiate(s: PowerSeries, k: int = 1) -> PowerSeries:
    if k < 0 or k > s.order:
        raise UsageError(f"derivative order {k} outside 0..{s.order}")
    out = []
    for n in range(s.order - k + 1):
        factor = 1
        for j in range(n + 1, n + k + 1):
            factor *= j
        out.append(s.coeffs[n + k] * factor)
    return PowerSeries(out, s.ring)


def _times_zpoly(s: PowerSeries, terms, upto: int, ring: Ring) -> list:
    """Coefficients 0..upto of (sum c_j z^j) * s for (j, c_j) in ``terms``."""
    out = [ring.zero] * (upto + 1)
    for power, c in terms:
        if not c:
            continue
        for n in range(power, min(upto, s.order + power) + 1):
            x = s.coeffs[n - power]
            if x:
                out[n] = out[n] + x * c
    return out


def ode4_residual(f: PowerSeries, params: ModelParams, a1_variant: str = "resolved") -> PowerSeries:
    """Left-hand side of the fourth-order equation applied to ``f``.

    Only coefficients 0..f.order-4 are emitted; beyond that the truncation of
    ``f`` would pollute the result.
    """
    if f.order < 4:
        raise UsageError(f"ode4_residual needs order >= 4, got {f.order}")
    if f.ring != params.ring:
        raise UsageError("series ring does not match the energy mode of params")
    ring = f.ring
    top = f.order - 4
    coef = ode4_coefficients(params, a1_variant)
    parts = (
        _times_zpoly(differentiate(f, 4), ((0, coef.leading),), top, ring),
        _times_zpoly(differentiate(f, 2), coef.a2, top, ring),
        _times_zpoly(differentiate(f, 1), coef.a1, top, ring),
        _times_zpoly(f, coef.a0, top, ring),
    )
    return PowerSeries([a + b + c + d for a, b, c, d in zip(*parts)], ring)


def system_residual(sol: SystemSolution) -> tuple[PowerSeries, PowerSeries]:
    """Both left-hand sides of the system, trustworthy through order N-2."""
    params = sol.params
    ring = params.ring
    g, w = params.g, params.omega
    half_w0 = params.omega0 / 2
    e = params.energy_element
    top = sol.order - 2

    def row(this, other, sign):
        d2 = _times_zpoly(differentiate(this, 2), ((0, 2 * g),), top, ring)
        d1 = _times_zpoly(differentiate(this, 1), ((1, sign * w),), top, ring)
        pot = _times_zpoly(this, ((2, 2 * g), (0, -sign * e)), top, ring)
        cross = _times_zpoly(other, ((0, sign * half_w0),), top, ring)
        return PowerSeries([a + b + c + d for a, b, c, d in zip(d2, d1, pot, cross)], ring)

    return row(sol.phi1, sol.phi2, 1), row(sol.phi2, sol.phi1, -1)
