"""Transform functions R+ -> R+ and exact property checks.

Two kinds cover every transform we need:

* :class:`PiecewiseAffine` -- finitely many affine pieces with explicit
  endpoint closure, partitioning [0, inf).
* :class:`Power` -- t ** alpha for rational alpha > 0.

For piecewise-affine functions, "increasing" and the doubling condition
``f(a) <= 2 f(b) for a <= b`` both reduce to a pointwise comparison with the
running maximum ``M(b) = sup{f(s) : s <= b}``:

    increasing  <=>  M(b) <= f(b)   for all b
    doubling    <=>  M(b) <= 2 f(b) for all b

M is itself piecewise affine on a refinement of f's pieces, so each check is
a linear scan.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import InputError
from .exact import DEFAULT_PRECISION, Enclosure, format_value, parse_value, power
from .spaces import Verdict

_ONE = Fraction(1)
_ZERO = Fraction(0)


# Intervals are (lo, hi, lo_closed, hi_closed); None stands for -inf / +inf.

def _intersect(p, q):
    lo1, hi1, lc1, hc1 = p
    lo2, hi2, lc2, hc2 = q
    if lo1 is None or (lo2 is not None and lo2 > lo1):
        lo, lc = lo2, lc2
    elif lo2 is None or lo1 > lo2:
        lo, lc = lo1, lc1
    else:
        lo, lc = lo1, lc1 and lc2
    if hi1 is None or (hi2 is not None and hi2 < hi1):
        hi, hc = hi2, hc2
    elif hi2 is None or hi1 < hi2:
        hi, hc = hi1, hc1
    else:
        hi, hc = hi1, hc1 and hc2
    if lo is not None and hi is not None:
        if lo > hi or (lo == hi and not (lc and hc)):
            return None
    return (lo, hi, lc, hc)


def _pick(interval):
    """Deterministic representative of a nonempty interval."""
    lo, hi, lc, hc = interval
    if hi is not None:
        if hc:
            return hi
        if lc:
            return lo
        return (lo + hi) / 2
    return lo if lc else lo + 1


def _halfline(slope, intercept, op, threshold):
    """{t : slope*t + intercept (op) threshold} as an interval, or None if empty."""
    if slope == 0:
        ok = intercept > threshold if op == ">" else intercept < threshold
        return (None, None, False, False) if ok else None
    root = (threshold - intercept) / slope
    if (slope > 0) == (op == ">"):
        return (root, None, False, False)
    return (None, root, False, False)


@dataclass(frozen=True)
class Piece:
    """Affine ``slope * t + intercept`` on an interval of [0, inf).

    ``hi is None`` marks the unbounded last piece.
    """

    lo: Fraction
    hi: Optional[Fraction]
    lo_closed: bool
    hi_closed: bool
    slope: Fraction
    intercept: Fraction

    @property
    def interval(self):
        return (self.lo, self.hi, self.lo_closed, self.hi_closed)

    @property
    def is_point(self) -> bool:
        return self.hi is not None and self.lo == self.hi

    def contains(self, t) -> bool:
        if t < self.lo or (t == self.lo and not self.lo_closed):
            return False
        if self.hi is None:
            return True
        return t < self.hi or (t == self.hi and self.hi_closed)

    def at(self, t) -> Fraction:
        return self.slope * t + self.intercept

    @property
    def left_value(self) -> Fraction:
        """Value at lo, attained or as a one-sided limit."""
        return self.at(self.lo)

    @property
    def right_value(self) -> Optional[Fraction]:
        """Value at hi (attained or limit); None when unbounded."""
        return None if self.hi is None else self.at(self.hi)

    @property
    def sup(self):
        """Supremum over the piece; None means +inf."""
        if self.hi is None:
            return self.intercept if self.slope == 0 else None
        return max(self.left_value, self.right_value)

    def to_json(self) -> dict:
        return {
            "from": format_value(self.lo),
            "to": None if self.hi is None else format_value(self.hi),
            "from_closed": self.lo_closed,
            "to_closed": self.hi_closed,
            "slope": format_value(self.slope),
            "intercept": format_value(self.intercept),
        }


@dataclass(frozen=True)
class PiecewiseAffine:
    pieces: tuple

    def __init__(self, pieces):
        pieces = tuple(pieces)
        _validate_pieces(pieces)
        object.__setattr__(self, "pieces", pieces)

    kind = "piecewise_affine"

    def piece_at(self, t) -> Piece:
        for p in self.pieces:
            if p.contains(t):
                return p
        raise AssertionError(f"no piece contains {t}")  # partition invariant

    def breakpoints(self):
        return sorted({p.lo for p in self.pieces} | {p.hi for p in self.pieces if p.hi is not None})

    def to_json(self) -> dict:
        return {"kind": self.kind, "pieces": [p.to_json() for p in self.pieces]}


@dataclass(frozen=True)
class Power:
    alpha: Fraction

    def __init__(self, alpha):
        alpha = parse_value(alpha)
        if alpha <= 0:
            raise InputError(f"power exponent must be positive, got {alpha}")
        object.__setattr__(self, "alpha", alpha)

    kind = "power"

    @property
    def is_integral(self) -> bool:
        return self.alpha.denominator == 1

    def to_json(self) -> dict:
        return {"kind": self.kind, "alpha": format_value(self.alpha)}


TransformFunction = Union[PiecewiseAffine, Power]


def _validate_pieces(pieces):
    if not pieces:
        raise InputError("a piecewise function needs at least one piece")
    for idx, p in enumerate(pieces):
        if p.hi is not None:
            if p.hi < p.lo:
                raise InputError(f"piece {idx} has to < from", idx)
            if p.hi == p.lo and not (p.lo_closed and p.hi_closed):
                raise InputError(f"degenerate piece {idx} must be closed on both ends", idx)
        elif p.hi_closed:
            raise InputError(f"unbounded piece {idx} cannot be closed at infinity", idx)
    first = pieces[0]
    if first.lo != 0 or not first.lo_closed:
        raise InputError("pieces must start at the closed point 0", 0)
    for idx in range(len(pieces) - 1):
        p, q = pieces[idx], pieces[idx + 1]
        if p.hi is None:
            raise InputError(f"piece {idx} is unbounded but is not the last piece", idx)
        if p.hi != q.lo:
            raise InputError(f"gap or overlap between pieces {idx} and {idx + 1}", idx + 1)
        if p.hi_closed == q.lo_closed:
            kind = "overlap" if p.hi_closed else "gap"
            raise InputError(f"{kind} at {p.hi} between pieces {idx} and {idx + 1}", idx + 1)
    if pieces[-1].hi is not None:
        raise InputError("the last piece must be unbounded", len(pieces) - 1)
    for idx, p in enumerate(pieces):
        # affine, so nonnegative on the piece iff nonnegative on its closure's ends
        if p.left_value < 0 or (p.hi is not None and p.right_value < 0):
            raise InputError(f"piece {idx} takes negative values", idx)
        if p.hi is None and p.slope < 0:
            raise InputError(f"unbounded piece {idx} has negative slope", idx)


def piece(lo, hi, lo_closed, hi_closed, slope, intercept) -> Piece:
    return Piece(
        parse_value(lo),
        None if hi is None else parse_value(hi),
        bool(lo_closed),
        bool(hi_closed),
        parse_value(slope, signed=True),
        parse_value(intercept, signed=True),
    )


def step_function(at_zero, steps) -> PiecewiseAffine:
    """Step function: ``at_zero`` at 0, then ``value`` on each ``(previous, right]``.

    ``steps`` is a list of ``(right, value)``; the last ``right`` must be None.
    """
    pieces = [piece(0, 0, True, True, 0, at_zero)]
    left = _ZERO
    for right, value in steps:
        pieces.append(piece(left, right, False, right is not None, 0, value))
        left = right
    return PiecewiseAffine(pieces)


def affine(slope, intercept=0) -> PiecewiseAffine:
    return PiecewiseAffine([piece(0, None, True, False, slope, intercept)])


def identity() -> PiecewiseAffine:
    return affine(1, 0)


def make_fab(a, b) -> PiecewiseAffine:
    """0 at 0, a/2 on (0, a], b on (a, inf)."""
    a, b = parse_value(a), parse_value(b)
    if a <= 0 or b <= 0:
        raise InputError(f"make_fab needs a, b > 0, got a={a}, b={b}")
    return PiecewiseAffine([
        piece(0, 0, True, True, 0, 0),
        piece(0, a, False, True, 0, a / 2),
        piece(a, None, False, False, 0, b),
    ])


def make_cap(t) -> PiecewiseAffine:
    """min(x, t)."""
    t = parse_value(t)
    if t <= 0:
        raise InputError(f"cap level must be positive, got {t}")
    return PiecewiseAffine([piece(0, t, True, False, 1, 0), piece(t, None, True, False, 0, t)])


def make_power(alpha) -> Power:
    return Power(alpha)


def make_threshold(r_star) -> PiecewiseAffine:
    """0 on [0, r*/2], identity above."""
    r = parse_value(r_star)
    if r <= 0:
        raise InputError(f"threshold radius must be positive, got {r}")
    return PiecewiseAffine([piece(0, r / 2, True, True, 0, 0), piece(r / 2, None, False, False, 1, 0)])


def evaluate(f: TransformFunction, t, precision: int = DEFAULT_PRECISION):
    """Exact Fraction, or an Enclosure for non-integer powers."""
    t = parse_value(t)
    if isinstance(f, Power):
        return power(t, f.alpha, precision)
    return f.piece_at(t).at(t)


def evaluate_exact(f: TransformFunction, t) -> Fraction:
    value = evaluate(f, t)
    if isinstance(value, Enclosure):
        raise InputError(
            f"t**{f.alpha} has no exact value; use an enclosure-aware operation instead"
        )
    return value


def is_exactly_applicable(f: TransformFunction) -> bool:
    return isinstance(f, PiecewiseAffine) or f.is_integral


# --- running maximum --------------------------------------------------------

def running_max_pieces(f: PiecewiseAffine):
    """Refinement of f's pieces carrying both M and f on each part.

    Yields ``(interval, m_slope, m_intercept, f_piece)``.
    """
    sup_before = None
    for p in f.pieces:
        s, c = p.slope, p.intercept
        if sup_before is None:
            if s >= 0:
                yield p.interval, s, c, p
            else:
                yield p.interval, _ZERO, p.left_value, p
        elif s < 0:
            yield p.interval, _ZERO, max(sup_before, p.left_value), p
        elif sup_before <= p.left_value:
            yield p.interval, s, c, p
        elif p.sup is not None and sup_before >= p.sup:
            yield p.interval, _ZERO, sup_before, p
        else:
            cross = (sup_before - c) / s
            flat = _intersect(p.interval, (None, cross, False, True))
            rising = _intersect(p.interval, (cross, None, False, False))
            if flat is not None:
                yield flat, _ZERO, sup_before, p
            if rising is not None:
                yield rising, s, c, p
        top = p.sup
        if top is not None:
            sup_before = top if sup_before is None else max(sup_before, top)


def running_max(f: PiecewiseAffine) -> PiecewiseAffine:
    """M(b) = sup of f over [0, b], as a piecewise-affine function."""
    return PiecewiseAffine(
        Piece(iv[0], iv[1], iv[2], iv[3], ms, mc) for iv, ms, mc, _ in running_max_pieces(f)
    )


def _envelope_violation(f: PiecewiseAffine, k):
    """First (a, b) with a <= b and f(a) > k f(b), or None."""
    for iv, ms, mc, p in running_max_pieces(f):
        # h = M - k f on this part; a violation is a point where h > 0
        region = _halfline(ms - k * p.slope, mc - k * p.intercept, ">", 0)
        region = region and _intersect(iv, region)
        if region is None:
            continue
        b = _pick(region)
        target = k * p.at(b)
        for q in f.pieces:
            if q.lo > b:
                break
            found = _halfline(q.slope, q.intercept, ">", target)
            found = found and _intersect(q.interval, found)
            found = found and _intersect(found, (None, b, False, True))
            if found is not None:
                return _pick(found), b
        raise AssertionError("running maximum exceeded but no source point found")
    return None


# --- property checks --------------------------------------------------------

def is_increasing(f: TransformFunction) -> Verdict:
    """Non-strict: a <= b implies f(a) <= f(b).  Witness (a, b) has a < b, f(a) > f(b)."""
    if isinstance(f, Power):
        return Verdict(True)
    hit = _envelope_violation(f, _ONE)
    return Verdict(hit is None, hit)


def is_doubling(f: TransformFunction) -> Verdict:
    """f(a) <= 2 f(b) whenever 0 <= a <= b.  Witness (a, b) has f(a) > 2 f(b)."""
    if isinstance(f, Power):
        return Verdict(True)
    hit = _envelope_violation(f, Fraction(2))
    return Verdict(hit is None, hit)


def is_amenable(f: TransformFunction) -> Verdict:
    """f vanishes exactly at 0.  Witness is 0 when f(0) != 0, else a positive zero."""
    if isinstance(f, Power):
        return Verdict(True)
    if f.piece_at(_ZERO).at(_ZERO) != 0:
        return Verdict(False, (_ZERO,))
    positive = (_ZERO, None, False, False)
    for p in f.pieces:
        if p.slope == 0:
            if p.intercept == 0:
                zeros = _intersect(p.interval, positive)
                if zeros is not None:
                    return Verdict(False, (_pick(zeros),))
        else:
            root = -p.intercept / p.slope
            if root > 0 and p.contains(root):
                return Verdict(False, (root,))
    return Verdict(True)


def vanishes_on(f: PiecewiseAffine, upto) -> bool:
    """True iff f(t) = 0 for every t in [0, upto)."""
    for p in f.pieces:
        if p.lo >= upto:
            break
        if p.is_point:
            if p.at(p.lo) != 0:
                return False
        elif p.slope != 0 or p.intercept != 0:
            return False
    return True


@dataclass(frozen=True)
class FunctionClassification:
    increasing: Verdict
    amenable: Verdict
    doubling: Verdict
    zero_at_zero: bool

    @property
    def pseudoultrametric_preserving(self) -> bool:
        return self.increasing.holds and self.zero_at_zero

    @property
    def semimetric_preserving(self) -> bool:
        return self.amenable.holds

    @property
    def ultrametric_preserving(self) -> bool:
        return self.amenable.holds and self.increasing.holds

    @property
    def ultrametric_metric_preserving(self) -> bool:
        return self.amenable.holds and self.doubling.holds

    def derived(self) -> dict:
        return {
            "pseudoultrametric_preserving": self.pseudoultrametric_preserving,
            "semimetric_preserving": self.semimetric_preserving,
            "ultrametric_preserving": self.ultrametric_preserving,
            "ultrametric_metric_preserving": self.ultrametric_metric_preserving,
        }

    def to_json(self) -> dict:
        def v(check):
            w = [format_value(x) for x in check.witness] if check.witness else None
            return {"holds": check.holds, "witness": w}

        return {
            "increasing": v(self.increasing),
            "amenable": v(self.amenable),
            "doubling": v(self.doubling),
            "zero_at_zero": self.zero_at_zero,
            "derived": self.derived(),
        }


def classify_function(f: TransformFunction) -> FunctionClassification:
    return FunctionClassification(
        increasing=is_increasing(f),
        amenable=is_amenable(f),
        doubling=is_doubling(f),
        zero_at_zero=evaluate(f, 0) == 0,
    )


# --- serialization ----------------------------------------------------------

def function_from_json(obj, where="function") -> TransformFunction:
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object")
    kind = obj.get("kind")
    if kind == "power":
        if "alpha" not in obj:
            raise InputError(f"{where}: power needs 'alpha'")
        return Power(parse_value(obj["alpha"], where=f"{where}.alpha"))
    if kind != "piecewise_affine":
        raise InputError(f"{where}: unknown kind {kind!r}")
    raw = obj.get("pieces")
    if not isinstance(raw, list):
        raise InputError(f"{where}: 'pieces' must be a list")
    pieces = []
    for idx, item in enumerate(raw):
        at = f"{where}.pieces[{idx}]"
        if not isinstance(item, dict):
            raise InputError(f"{at}: expected an object")
        try:
            lo = parse_value(item["from"], where=f"{at}.from")
            hi_raw = item.get("to")
            hi = None if hi_raw is None else parse_value(hi_raw, where=f"{at}.to")
            degenerate = hi is not None and hi == lo
            pieces.append(Piece(
                lo,
                hi,
                bool(item.get("from_closed", True)),
                bool(item.get("to_closed", degenerate)),
                parse_value(item.get("slope", 0), where=f"{at}.slope", signed=True),
                parse_value(item.get("intercept", 0), where=f"{at}.intercept", signed=True),
            ))
        except KeyError as exc:
            raise InputError(f"{at}: missing field {exc}") from exc
    return PiecewiseAffine(pieces)
