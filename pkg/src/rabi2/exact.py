"""Exact coefficient rings: rationals, Gaussian rationals Q[i], and Q[i][E].

Rationals are plain :class:`fractions.Fraction` objects.  Everything the
series engine stores is either a :class:`GaussianRational` (energy bound to a
number) or an :class:`EPoly` (energy kept as the indeterminate ``E``).  The
ring is chosen once per computation and never mixed inside one series.

String forms used at the CLI / JSON boundary::

    Fraction(3, 4)                 "3/4"        (denominator dropped when 1)
    GaussianRational(1/2, -3)      "1/2-3i"
    EPoly([-1, 0, 1])              ["-1", "0", "1"]   (ascending powers of E)
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .errors import RingMismatchError, UsageError

__all__ = [
    "Fraction",
    "GaussianRational",
    "EPoly",
    "Ring",
    "GAUSSIAN",
    "EPOLY",
    "I",
    "ring_add",
    "ring_mul",
    "ring_mul_scalar",
    "scalar_div",
    "mul_by_i_power",
    "is_zero",
    "parse_rational",
    "format_rational",
    "parse_gaussian",
    "format_gaussian",
    "format_element",
    "parse_element",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _as_fraction(x) -> Fraction:
    if type(x) is Fraction:
        return x
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


class GaussianRational:
    """Exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("_re", "_im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            if im:
                raise TypeError("imaginary part given twice")
            self._re, self._im = re._re, re._im
            return
        self._re = _as_fraction(re)
        self._im = _as_fraction(im)

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "GaussianRational":
        obj = object.__new__(cls)
        obj._re = re
        obj._im = im
        return obj

    @property
    def re(self) -> Fraction:
        return self._re

    @property
    def im(self) -> Fraction:
        return self._im

    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational._raw(self._re + other._re, self._im + other._im)
        if isinstance(other, (int, Fraction)):
            return GaussianRational._raw(self._re + other, self._im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational._raw(self._re - other._re, self._im - other._im)
        if isinstance(other, (int, Fraction)):
            return GaussianRational._raw(self._re - other, self._im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational._raw(other - self._re, -self._im)
        return NotImplemented

    def __neg__(self):
        return GaussianRational._raw(-self._re, -self._im)

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            a, b, c, d = self._re, self._im, other._re, other._im
            if not b and not d:
                return GaussianRational._raw(a * c, _ZERO)
            return GaussianRational._raw(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return GaussianRational._raw(self._re * other, self._im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division of a Gaussian rational by zero")
            return GaussianRational._raw(self._re / other, self._im / other)
        if isinstance(other, GaussianRational):
            norm = other._re * other._re + other._im * other._im
            if not norm:
                raise ZeroDivisionError("division of a Gaussian rational by zero")
            return self * other.conjugate() / norm
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other) / self
        return NotImplemented

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self._re, -self._im)

    def mul_i_power(self, n: int) -> "GaussianRational":
        k = n % 4
        if k == 0:
            return self
        if k == 1:
            return GaussianRational._raw(-self._im, self._re)
        if k == 2:
            return GaussianRational._raw(-self._re, -self._im)
        return GaussianRational._raw(self._im, -self._re)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self._re == other._re and self._im == other._im
        if isinstance(other, (int, Fraction)):
            return not self._im and self._re == other
        return NotImplemented

    def __hash__(self):
        if not self._im:
            return hash(self._re)
        return hash((self._re, self._im))

    def __bool__(self):
        return bool(self._re) or bool(self._im)

    def __complex__(self):
        return complex(float(self._re), float(self._im))

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        return format_gaussian(self)


I = GaussianRational(0, 1)

Scalar = Union[int, Fraction, GaussianRational]


def _as_gaussian(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    return GaussianRational._raw(_as_fraction(x), _ZERO)


class EPoly:
    """Dense polynomial in the energy indeterminate ``E`` over Q[i].

    ``coeffs[k]`` is the coefficient of ``E**k``; trailing zeros are trimmed,
    so the zero polynomial has an empty coefficient tuple and degree -1
    (standing in for minus infinity).
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [_as_gaussian(x) for x in coeffs]
        while c and not c[-1]:
            c.pop()
        self._c = tuple(c)

    @classmethod
    def _raw(cls, coeffs: list) -> "EPoly":
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        obj = object.__new__(cls)
        obj._c = tuple(coeffs)
        return obj

    @classmethod
    def indeterminate(cls) -> "EPoly":
        return cls((0, 1))

    @property
    def coeffs(self) -> tuple:
        return self._c

    @property
    def degree(self) -> int:
        return len(self._c) - 1

    def __len__(self):
        return len(self._c)

    def __add__(self, other):
        if not isinstance(other, EPoly):
            return NotImplemented
        a, b = self._c, other._c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, x in enumerate(b):
            out[k] = out[k] + x
        return EPoly._raw(out)

    def __sub__(self, other):
        if not isinstance(other, EPoly):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return EPoly._raw([-x for x in self._c])

    def __mul__(self, other):
        if isinstance(other, EPoly):
            a, b = self._c, other._c
            if not a or not b:
                return EPoly._raw([])
            out = [GaussianRational._raw(_ZERO, _ZERO)] * (len(a) + len(b) - 1)
            for j, y in enumerate(b):
                if not y:
                    continue
                for k, x in enumerate(a):
                    out[k + j] = out[k + j] + x * y
            return EPoly._raw(out)
        if isinstance(other, (int, Fraction, GaussianRational)):
            if not other:
                return EPoly._raw([])
            return EPoly._raw([x * other for x in self._c])
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            if not other:
                raise ZeroDivisionError("division of an E-polynomial by zero")
            if isinstance(other, GaussianRational):
                return EPoly._raw([x / other for x in self._c])
            inv = 1 / Fraction(other)
            return EPoly._raw([x * inv for x in self._c])
        return NotImplemented

    def mul_i_power(self, n: int) -> "EPoly":
        if n % 4 == 0:
            return self
        return EPoly._raw([x.mul_i_power(n) for x in self._c])

    def evaluate(self, energy) -> GaussianRational:
        """Horner evaluation at a rational or Gaussian-rational energy."""
        e = _as_gaussian(energy)
        acc = GaussianRational._raw(_ZERO, _ZERO)
        for x in reversed(self._c):
            acc = acc * e + x
        return acc

    def __eq__(self, other):
        if isinstance(other, EPoly):
            return self._c == other._c
        return NotImplemented

    def __hash__(self):
        return hash(("EPoly", self._c))

    def __bool__(self):
        return bool(self._c)

    def __repr__(self):
        return f"EPoly({[str(x) for x in self._c]})"

    def __str__(self):
        if not self._c:
            return "0"
        terms = []
        for k, x in enumerate(self._c):
            if not x:
                continue
            s = str(x)
            if x._re and x._im:
                s = f"({s})"
            if k:
                s = ("" if s == "1" else "-" if s == "-1" else s + "*") + ("E" if k == 1 else f"E^{k}")
            terms.append(s)
        return " + ".join(terms).replace("+ -", "- ")


RingElem = Union[GaussianRational, EPoly]


@dataclass(frozen=True)
class Ring:
    """One of the two coefficient rings a computation can run in."""

    name: str

    @property
    def symbolic(self) -> bool:
        return self.name == "epoly"

    @property
    def zero(self) -> RingElem:
        return EPoly(()) if self.symbolic else GaussianRational._raw(_ZERO, _ZERO)

    @property
    def one(self) -> RingElem:
        return EPoly((1,)) if self.symbolic else GaussianRational._raw(_ONE, _ZERO)

    def lift(self, x) -> RingElem:
        """Coerce a scalar (or an element already in this ring) into the ring."""
        if isinstance(x, EPoly):
            if not self.symbolic:
                raise RingMismatchError("E-polynomial given to the Gaussian ring")
            return x
        g = _as_gaussian(x)
        return EPoly._raw([g]) if self.symbolic else g

    def contains(self, x) -> bool:
        return isinstance(x, EPoly if self.symbolic else GaussianRational)


GAUSSIAN = Ring("gaussian")
EPOLY = Ring("epoly")


def _ring_kind(x) -> str:
    if isinstance(x, EPoly):
        return "epoly"
    if isinstance(x, GaussianRational):
        return "gaussian"
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return "rational"
    raise RingMismatchError(f"{type(x).__name__} is not a ring element")


def _check_same_ring(a, b) -> None:
    ka, kb = _ring_kind(a), _ring_kind(b)
    # Q embeds in Q[i]; Q[i][E] only combines with itself
    if (ka == "epoly") != (kb == "epoly"):
        raise RingMismatchError(f"cannot combine {ka} with {kb}")


def ring_add(a, b):
    _check_same_ring(a, b)
    if _ring_kind(a) == "rational" and _ring_kind(b) == "rational":
        return Fraction(a) + Fraction(b)
    if isinstance(a, EPoly):
        return a + b
    return _as_gaussian(a) + _as_gaussian(b)


def ring_mul(a, b):
    _check_same_ring(a, b)
    if _ring_kind(a) == "rational" and _ring_kind(b) == "rational":
        return Fraction(a) * Fraction(b)
    if isinstance(a, EPoly):
        return a * b
    return _as_gaussian(a) * _as_gaussian(b)


def ring_mul_scalar(a, s: Scalar):
    """Multiply a ring element by a constant from Q[i]."""
    if isinstance(s, EPoly):
        raise RingMismatchError("scalar must be a rational or Gaussian rational")
    _ring_kind(a)
    return a * s


def scalar_div(a, s):
    s = _as_fraction(s)
    if not s:
        raise ZeroDivisionError("scalar_div by zero")
    _ring_kind(a)
    return a / s


def mul_by_i_power(a, n: int):
    if n < 0:
        raise UsageError(f"power of i must be non-negative, got {n}")
    if isinstance(a, (int, Fraction)):
        a = _as_gaussian(a)
    return a.mul_i_power(n)


def is_zero(a) -> bool:
    _ring_kind(a)
    return not a


# ---- string forms -------------------------------------------------------

_RAT_RE = re.compile(r"^[+-]?\d+(/\d+)?$")
_DEC_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"``, an integer, or an exact decimal literal such as ``"0.24"``."""
    s = str(text).strip().replace(" ", "")
    if _RAT_RE.match(s) or _DEC_RE.match(s):
        try:
            return Fraction(s)
        except ZeroDivisionError:
            raise UsageError(f"zero denominator in {text!r}") from None
    raise UsageError(f"not an exact rational: {text!r}")


def format_rational(x) -> str:
    return str(_as_fraction(x))


def format_gaussian(z) -> str:
    z = _as_gaussian(z)
    re_, im = z._re, z._im
    if not im:
        return str(re_)
    if im == 1:
        ims = "i"
    elif im == -1:
        ims = "-i"
    else:
        ims = f"{im}i"
    if not re_:
        return ims
    return f"{re_}{'' if ims.startswith('-') else '+'}{ims}"


_GAUSS_RE = re.compile(
    r"^(?P<re>[+-]?\d+(?:/\d+)?)?"
    r"(?:(?P<sign>[+-])?(?P<im>\d+(?:/\d+)?)?i)?$"
)


def parse_gaussian(text: str) -> GaussianRational:
    s = str(text).strip().replace(" ", "")
    m = _GAUSS_RE.match(s)
    if not s or not m:
        raise UsageError(f"not a Gaussian rational: {text!r}")
    try:
        re_part = Fraction(m.group("re")) if m.group("re") else _ZERO
        im = _ZERO
        if s.endswith("i"):
            if m.group("re") and not m.group("sign") and not m.group("im"):
                # "2i" is captured as re="2" followed by a bare "i"
                re_part, im = _ZERO, re_part
            else:
                im = Fraction(m.group("im")) if m.group("im") else _ONE
                if m.group("sign") == "-":
                    im = -im
    except ZeroDivisionError:
        raise UsageError(f"zero denominator in {text!r}") from None
    return GaussianRational._raw(re_part, im)


def format_element(x):
    """String form of a ring element: a string, or a list of strings for EPoly."""
    if isinstance(x, EPoly):
        return [format_gaussian(c) for c in x.coeffs]
    return format_gaussian(x)


def parse_element(obj) -> RingElem:
    if isinstance(obj, (list, tuple)):
        return EPoly(parse_gaussian(s) for s in obj)
    return parse_gaussian(obj)
