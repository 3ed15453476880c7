"""Seeded random spaces and functions covering every class the checks distinguish.

All randomness flows through ``random.Random(seed)`` (Mersenne Twister), and
each generator draws in a fixed documented order, so a GenSpec pins the
output exactly.  Every result is replayed through the matching checker
before it is returned.

Value pool: rationals p/q with 1 <= q <= ``max_den`` inside ``[lo, hi]``.
"""

from __future__ import annotations

import logging
import random
from dataclasses import asdict, dataclass
from fractions import Fraction

from .errors import InputError, UltrapresError
from .exact import format_value
from .functions import Piece, PiecewiseAffine, classify_function
from .spaces import Dissimilarity, classify_space

log = logging.getLogger(__name__)

FUNCTION_CLASSES = (
    "increasing_amenable",
    "increasing_zero_at_zero",
    "amenable_doubling",
    "amenable_non_doubling",
    "non_increasing",
    "non_amenable",
)
SPACE_CLASSES = ("ultrametric", "metric", "pseudoultrametric")

RETRY_CAP = 200


class GenerationError(UltrapresError):
    pass


@dataclass(frozen=True)
class GenSpec:
    seed: int
    n: int = 6
    lo: Fraction = Fraction(1)
    hi: Fraction = Fraction(16)
    max_den: int = 4
    target: str = "ultrametric"

    def rng(self) -> random.Random:
        return random.Random(self.seed)

    def pool(self):
        return _pool(self.lo, self.hi, self.max_den)

    def to_json(self) -> dict:
        out = asdict(self)
        out["lo"] = format_value(self.lo)
        out["hi"] = format_value(self.hi)
        return out


_POOLS = {}


def _pool(lo, hi, max_den):
    key = (Fraction(lo), Fraction(hi), max_den)
    if key not in _POOLS:
        lo, hi = key[0], key[1]
        if lo <= 0 or hi < lo or max_den < 1:
            raise InputError(f"bad value pool [{lo}, {hi}] with denominators <= {max_den}")
        values = set()
        for q in range(1, max_den + 1):
            start = -(-lo.numerator * q // lo.denominator)  # ceil(lo * q)
            stop = hi.numerator * q // hi.denominator
            values.update(Fraction(p, q) for p in range(start, stop + 1))
        _POOLS[key] = tuple(sorted(values))
    return _POOLS[key]


def _random_partition(rng, items):
    """Split ``items`` into at least two nonempty blocks."""
    items = list(items)
    rng.shuffle(items)
    m = len(items)
    blocks = rng.randint(2, min(m, 4))
    cuts = sorted(rng.sample(range(1, m), blocks - 1))
    bounds = [0] + cuts + [m]
    return [items[bounds[i]:bounds[i + 1]] for i in range(blocks)]


def _ultrametric_matrix(rng, n, pool):
    """Laminar hierarchy: split, assign the split level to cross-block pairs, recurse.

    A block of m points needs at most m - 1 strictly decreasing levels, so
    each level is drawn with enough smaller pool values left below it.
    """
    d = [[Fraction(0)] * n for _ in range(n)]
    if n - 1 > len(pool):
        raise GenerationError(f"value pool has {len(pool)} values; {n} points need {n - 1} levels")
    stack = [(list(range(n)), len(pool))]  # (block, exclusive upper index into pool)
    while stack:
        block, upper = stack.pop()
        m = len(block)
        if m < 2:
            continue
        idx = rng.randrange(m - 2, upper)
        level = pool[idx]
        parts = _random_partition(rng, block)
        for a in range(len(parts)):
            for b in range(a + 1, len(parts)):
                for i in parts[a]:
                    for j in parts[b]:
                        d[i][j] = d[j][i] = level
        for part in parts:
            stack.append((part, idx))
    return d


def gen_ultrametric(spec: GenSpec) -> Dissimilarity:
    if spec.n < 1:
        raise InputError("n must be at least 1")
    rng = spec.rng()
    space = Dissimilarity(_ultrametric_matrix(rng, spec.n, spec.pool()))
    if not classify_space(space).ultrametric:
        raise GenerationError(f"generated space failed the ultrametric check: {spec}")
    return space


def gen_metric(spec: GenSpec, embed=None) -> Dissimilarity:
    """Random symmetric matrix closed under shortest paths.

    ``embed`` places a fixed k x k block on the first k points; the other
    entries are then drawn at least half the block's largest value, so the
    closure cannot shorten any embedded distance.
    """
    rng = spec.rng()
    pool = spec.pool()
    n = spec.n
    d = [[Fraction(0)] * n for _ in range(n)]
    k = 0
    floor = Fraction(0)
    if embed is not None:
        block = Dissimilarity(embed)
        k = block.n
        if k > n:
            raise InputError(f"embedded block of size {k} exceeds n={n}")
        for i in range(k):
            for j in range(k):
                d[i][j] = block[i, j]
        floor = max(block.values()) / 2 if k > 1 else Fraction(0)
    choices = [v for v in pool if v >= floor] or [max(pool[-1], floor)]
    for i in range(n):
        for j in range(i + 1, n):
            if j < k:
                continue
            d[i][j] = d[j][i] = rng.choice(choices)
    for m in range(n):
        dm = d[m]
        for i in range(n):
            dim = d[i][m]
            di = d[i]
            for j in range(n):
                via = dim + dm[j]
                if via < di[j]:
                    di[j] = via
    space = Dissimilarity(d)
    report = classify_space(space)
    if not report.metric:
        raise GenerationError(f"generated space failed the metric check: {spec}")
    if embed is not None and any(space[i, j] != block[i, j] for i in range(k) for j in range(k)):
        raise GenerationError("shortest-path closure altered the embedded block")
    log.debug("gen_metric seed=%s incidentally ultrametric=%s", spec.seed, report.ultrametric)
    return space


def gen_pseudoultrametric(spec: GenSpec, zero_pairs=Fraction(1, 3)) -> Dissimilarity:
    """Ultrametric on m groups lifted to n points; same-group points sit at distance 0.

    ``zero_pairs`` is the fraction of the n - 1 possible merges performed.
    """
    zero_pairs = Fraction(zero_pairs)
    if not 0 <= zero_pairs <= 1:
        raise InputError("zero_pairs must lie in [0, 1]")
    rng = spec.rng()
    n = spec.n
    merges = int(zero_pairs * (n - 1))
    if zero_pairs > 0 and n > 1:
        merges = max(merges, 1)
    m = n - merges
    base = _ultrametric_matrix(rng, m, spec.pool())
    group = list(range(m)) + [rng.randrange(m) for _ in range(n - m)]
    rng.shuffle(group)
    d = [[base[group[i]][group[j]] for j in range(n)] for i in range(n)]
    space = Dissimilarity(d)
    report = classify_space(space)
    if not report.pseudoultrametric or (m < n and report.ultrametric):
        raise GenerationError(f"generated space failed the pseudoultrametric check: {spec}")
    return space


# --- functions ---------------------------------------------------------------

def _breakpoints(rng, pool, count):
    return sorted(rng.sample(pool, count))


def _assemble(rng, knots, values, at_zero):
    """Pieces between ``knots`` with the given (left, right) limit values.

    ``at_zero`` not None adds a degenerate piece {0}; otherwise the first
    piece is closed at 0.  Interior closures are random.  The last entry of
    ``values`` is the constant value on the unbounded tail.
    """
    pieces = []
    left = Fraction(0)
    left_closed = True
    if at_zero is not None:
        pieces.append(Piece(left, left, True, True, Fraction(0), Fraction(at_zero)))
        left_closed = False
    for right, (u, w) in zip(knots, values):
        slope = (w - u) / (right - left)
        right_closed = rng.random() < 0.5
        pieces.append(Piece(left, right, left_closed, right_closed, slope, u - slope * left))
        left, left_closed = right, not right_closed
    tail = values[len(knots)][0]
    pieces.append(Piece(left, None, left_closed, False, Fraction(0), tail))
    return PiecewiseAffine(pieces)


def _value(rng, lo, hi, den=8):
    """Random rational in [lo, hi] on a 1/den grid anchored at lo."""
    lo, hi = Fraction(lo), Fraction(hi)
    steps = int((hi - lo) * den)
    return lo + Fraction(rng.randint(0, steps), den) if steps > 0 else lo


def _draw_increasing(rng, pool, pieces, amenable):
    knots = _breakpoints(rng, pool, pieces - 1)
    values = []
    if amenable:
        at_zero = 0 if rng.random() < 0.5 else None
        if at_zero is None:
            # closed at 0: start from f(0) = 0 with a positive slope
            current = Fraction(0)
        else:
            current = _value(rng, Fraction(0), Fraction(4))
    else:
        at_zero = None
        current = Fraction(0)
    for idx in range(len(knots)):
        if idx == 0 and at_zero is None:
            u = Fraction(0)
        else:
            u = current + (_value(rng, 0, 2) if rng.random() < 0.5 else 0)
        w = u + _value(rng, 0, 3)
        if amenable and u == 0 and w == 0:
            w = Fraction(1)
        if not amenable and idx == 0:
            w = Fraction(0) if rng.random() < 0.5 else w
        values.append((u, w))
        current = w
    tail = current + _value(rng, 0, 2)
    if amenable and tail == 0:
        tail = Fraction(1)
    values.append((tail, tail))
    return _assemble(rng, knots, values, at_zero)


def _draw_doubling(rng, pool, pieces, violate):
    """Amenable; values kept >= half the running maximum unless ``violate``."""
    knots = _breakpoints(rng, pool, pieces - 1)
    values = []
    running = None
    drop_at = rng.randrange(1, len(knots) + 1) if violate else None
    for idx in range(len(knots) + 1):
        if running is None:
            u = _value(rng, Fraction(1, 2), Fraction(4))
            w = _value(rng, u / 2, u * 3 / 2)
        elif idx == drop_at:
            # strictly below half the running maximum
            u = running / _value(rng, Fraction(5, 2), Fraction(6))
            w = u
        else:
            u = _value(rng, running / 2, running * 3 / 2)
            w = _value(rng, max(running, u) / 2, max(running, u) * 3 / 2)
        if idx == len(knots):
            w = u  # constant tail
        values.append((u, w))
        running = max(running or 0, u, w)
    return _assemble(rng, knots, values, 0)


def _draw_non_amenable(rng, pool, pieces):
    if rng.random() < 0.5:
        base = _draw_increasing(rng, pool, pieces, amenable=True)
        shift = _value(rng, Fraction(1, 8), Fraction(2))
        return PiecewiseAffine(
            Piece(p.lo, p.hi, p.lo_closed, p.hi_closed, p.slope, p.intercept + shift)
            for p in base.pieces
        )
    return _draw_increasing(rng, pool, pieces, amenable=False)


def gen_function(spec: GenSpec, cls: str, max_pieces: int = 8) -> PiecewiseAffine:
    """Random piecewise-affine function (at most ``max_pieces`` pieces) of class ``cls``.

    ``amenable_doubling`` and ``non_increasing`` samples are always
    non-increasing; ``amenable_non_doubling`` samples are amenable.
    """
    if cls not in FUNCTION_CLASSES:
        raise InputError(f"unknown function class {cls!r}; expected one of {FUNCTION_CLASSES}")
    rng = spec.rng()
    pool = spec.pool()
    for attempt in range(RETRY_CAP):
        pieces = rng.randint(2, min(max_pieces, len(pool) + 1))
        if cls == "increasing_amenable":
            f = _draw_increasing(rng, pool, pieces, amenable=True)
        elif cls == "increasing_zero_at_zero":
            f = _draw_increasing(rng, pool, pieces, amenable=rng.random() < 0.5)
        elif cls == "amenable_doubling":
            f = _draw_doubling(rng, pool, pieces, violate=False)
        elif cls == "amenable_non_doubling":
            f = _draw_doubling(rng, pool, pieces, violate=True)
        elif cls == "non_increasing":
            f = _draw_doubling(rng, pool, pieces, violate=rng.random() < 0.5)
        else:
            f = _draw_non_amenable(rng, pool, pieces)
        if _in_class(f, cls):
            if attempt:
                log.info("gen_function %s seed=%s accepted after %d rejections", cls, spec.seed, attempt)
            return f
        log.debug("gen_function %s seed=%s attempt %d rejected", cls, spec.seed, attempt)
    raise GenerationError(f"no {cls} function after {RETRY_CAP} attempts (seed {spec.seed})")


def _in_class(f, cls) -> bool:
    c = classify_function(f)
    if cls == "increasing_amenable":
        return c.ultrametric_preserving
    if cls == "increasing_zero_at_zero":
        return c.pseudoultrametric_preserving
    if cls == "amenable_doubling":
        return c.amenable.holds and c.doubling.holds and not c.increasing.holds
    if cls == "amenable_non_doubling":
        return c.amenable.holds and not c.doubling.holds
    if cls == "non_increasing":
        return not c.increasing.holds and c.zero_at_zero
    return not c.amenable.holds
