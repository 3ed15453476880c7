"""Exact rational values and certified enclosures for rational powers.

Every distance and function value in the library is a :class:`fractions.Fraction`.
The single place where exactness is impossible is ``t ** alpha`` for a
non-integer rational ``alpha``; there we return an :class:`Enclosure` whose
rational endpoints are guaranteed to bracket the true value.  The bounds come
from mpmath's interval context, which rounds outward at every step.
"""

from __future__ import annotations

import math
import numbers
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

import gmpy2
from mpmath.ctx_iv import MPIntervalContext

from .errors import InputError, UndecidedError

#: Working precision (bits) of the first enclosure attempt; width is about 2**-60 relative.
DEFAULT_PRECISION = 60
#: Refinement stops here and the comparison is reported as undecided.
DEFAULT_MAX_PRECISION = 1024

# Private context so that refinement never touches mpmath's global iv state;
# the context's precision is mutable state, hence the lock.
_IV = MPIntervalContext()
_IV_LOCK = threading.Lock()


def parse_value(raw, *, where=None, signed=False) -> Fraction:
    """Parse an exact value, nonnegative unless ``signed``.

    Accepts ints, Fractions, decimal strings ("0.25"), and "p/q" strings.
    A Python float is taken at its exact binary value, so pass "1/10"
    rather than 0.1.
    """
    if isinstance(raw, bool):
        raise InputError(f"boolean is not a distance value: {raw!r}", where)
    if isinstance(raw, Fraction):
        value = raw
    elif isinstance(raw, numbers.Integral):
        value = Fraction(int(raw))
    elif isinstance(raw, float):
        if not math.isfinite(raw):
            raise InputError(f"non-finite value {raw!r}", where)
        value = Fraction(raw)
    elif isinstance(raw, str):
        text = raw.strip()
        if text.lower() in {"nan", "+nan", "-nan", "inf", "+inf", "-inf", "infinity", "-infinity"}:
            raise InputError(f"non-finite value {raw!r}", where)
        try:
            value = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse {raw!r} as an exact rational", where) from exc
    else:
        raise InputError(f"unsupported value type {type(raw).__name__}", where)
    if value < 0 and not signed:
        raise InputError(f"negative value {raw!r}", where)
    return value


def format_value(value: Fraction):
    """JSON-friendly form: int when integral, otherwise the string 'p/q'."""
    value = Fraction(value)
    if value.denominator == 1:
        return int(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Enclosure:
    """Closed interval [lo, hi] with rational endpoints known to contain a real number."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, value) -> "Enclosure":
        value = Fraction(value)
        return cls(value, value)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __add__(self, other):
        other = as_enclosure(other)
        return Enclosure(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = as_enclosure(other)
        return Enclosure(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return as_enclosure(other) - self

    def scale(self, k) -> "Enclosure":
        k = Fraction(k)
        if k >= 0:
            return Enclosure(self.lo * k, self.hi * k)
        return Enclosure(self.hi * k, self.lo * k)

    def sign(self):
        """+1 or -1 when certain, 0 for the exact point zero, None when the interval straddles 0."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        return None

    def to_json(self):
        return {"lo": format_value(self.lo), "hi": format_value(self.hi)}


Value = Union[Fraction, Enclosure]


def as_enclosure(value) -> Enclosure:
    if isinstance(value, Enclosure):
        return value
    return Enclosure.point(value)


def _mpi_bound(raw) -> Fraction:
    sign, man, exp, _bc = raw
    if man == 0:
        if exp != 0:  # mpmath encodes inf/nan as zero mantissa with a nonzero exponent
            raise ArithmeticError("enclosure endpoint is not finite")
        return Fraction(0)
    value = Fraction(int(man)) * (Fraction(2) ** exp)
    return -value if sign else value


def _exact_root(value: Fraction, q: int):
    if q > 64:
        return None
    num, num_exact = gmpy2.iroot(gmpy2.mpz(value.numerator), q)
    den, den_exact = gmpy2.iroot(gmpy2.mpz(value.denominator), q)
    if num_exact and den_exact:
        return Fraction(int(num), int(den))
    return None


def power(t, alpha, precision: int = DEFAULT_PRECISION) -> Value:
    """``t ** alpha`` for rational ``t >= 0`` and rational ``alpha > 0``.

    Exact Fraction when the result is rational and cheaply detectable
    (integer alpha, or perfect roots); otherwise a certified Enclosure
    computed at ``precision`` working bits.
    """
    t = Fraction(t)
    alpha = Fraction(alpha)
    if t < 0:
        raise InputError(f"power of negative value {t}")
    if alpha <= 0:
        raise InputError(f"exponent must be positive, got {alpha}")
    if t == 0 or t == 1:
        return t
    if alpha.denominator == 1:
        return t ** alpha.numerator
    root = _exact_root(t, alpha.denominator)
    if root is not None:
        return root ** alpha.numerator
    with _IV_LOCK:
        _IV.prec = precision + 8
        base = _IV.mpf(t.numerator) / _IV.mpf(t.denominator)
        expo = _IV.mpf(alpha.numerator) / _IV.mpf(alpha.denominator)
        enc = _IV.exp(expo * _IV.log(base))
        lo_raw, hi_raw = enc._mpi_
    lo = max(_mpi_bound(lo_raw), Fraction(0))
    return Enclosure(lo, _mpi_bound(hi_raw))


def certified_sign(
    build: Callable[[int], Value],
    *,
    precision: int = DEFAULT_PRECISION,
    max_precision: int = DEFAULT_MAX_PRECISION,
    what: str = "comparison",
) -> int:
    """Sign of a quantity whose enclosure ``build(bits)`` tightens as bits grow.

    Doubles the working precision until the sign is certain.  Raises
    :class:`UndecidedError` once ``max_precision`` is exceeded.
    """
    bits = precision
    last = None
    while bits <= max_precision:
        value = build(bits)
        if not isinstance(value, Enclosure):
            return (value > 0) - (value < 0)
        s = value.sign()
        if s is not None:
            return s
        last = value
        bits *= 2
    raise UndecidedError(
        f"{what} undecided at precision {max_precision} bits",
        detail={"max_precision": max_precision, "enclosure": last.to_json() if last else None},
    )
