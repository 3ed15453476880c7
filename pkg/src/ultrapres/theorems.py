"""Transforms f o d, self-verifying counterexamples, and ultrametricity probes."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import InputError, NoWitnessError, PreconditionError, UndecidedError
from .exact import (
    DEFAULT_MAX_PRECISION,
    DEFAULT_PRECISION,
    certified_sign,
    format_value,
    power,
)
from .functions import (
    TransformFunction,
    evaluate,
    evaluate_exact,
    function_from_json,
    is_amenable,
    is_doubling,
    is_exactly_applicable,
    is_increasing,
    make_fab,
)
from .spaces import (
    Dissimilarity,
    check_triangle_perimeter,
    classify_space,
    violates,
    worst_ultrametric_violation,
)

log = logging.getLogger(__name__)


def apply(f: TransformFunction, space: Dissimilarity) -> Dissimilarity:
    """Entrywise f(d(i, j)).

    Non-integer powers have no exact image; use :func:`probe_snowflake` for them.
    """
    if not is_exactly_applicable(f):
        raise InputError(
            f"t**{f.alpha} cannot be applied exactly; use probe_snowflake for non-integer powers"
        )
    cache = {}

    def image(v):
        if v not in cache:
            cache[v] = evaluate_exact(f, v)
        return cache[v]

    return space.map(image)


@dataclass(frozen=True)
class WitnessPackage:
    """A space, a function, and the axiom that f o d is shown to break."""

    function: TransformFunction
    space: Dissimilarity
    transformed: Dissimilarity
    violated_axiom: str
    indices: tuple
    values_before: tuple
    values_after: tuple
    notes: dict = field(default_factory=dict)

    def replay(self) -> bool:
        """Re-derive the failure from scratch; True iff it is confirmed."""
        report = classify_space(self.transformed)
        if report.axiom(self.violated_axiom).holds:
            return False
        if not violates(self.transformed, self.violated_axiom, self.indices):
            return False
        if self.violated_axiom == "triangle":
            i, j, k = self.indices
            if check_triangle_perimeter(self.transformed, i, j, k):
                return False
        if is_exactly_applicable(self.function) and apply(self.function, self.space) != self.transformed:
            return False
        return True

    @classmethod
    def from_json(cls, obj) -> "WitnessPackage":
        """Rebuild a package from a report; call :meth:`replay` to re-check it."""
        return cls(
            function=function_from_json(obj["function"]),
            space=Dissimilarity(obj["space"]["d"]),
            transformed=Dissimilarity(obj["transformed"]["d"]),
            violated_axiom=obj["violated_axiom"],
            indices=tuple(obj["indices"]),
            values_before=tuple(Fraction(v) for v in obj["values_before"]),
            values_after=tuple(Fraction(v) for v in obj["values_after"]),
            notes=dict(obj.get("notes", {})),
        )

    def to_json(self) -> dict:
        return {
            "function": self.function.to_json(),
            "space": self.space.to_json(),
            "transformed": self.transformed.to_json(),
            "violated_axiom": self.violated_axiom,
            "indices": list(self.indices),
            "values_before": [format_value(v) for v in self.values_before],
            "values_after": [format_value(v) for v in self.values_after],
            "notes": {k: format_value(v) if isinstance(v, Fraction) else v for k, v in self.notes.items()},
        }


def _package(f, space, axiom, indices, **notes) -> WitnessPackage:
    transformed = apply(f, space)
    d, e = space.entries, transformed.entries
    if axiom == "reflexive":
        (i,) = indices
        cells = [(i, i)]
    elif axiom == "identity":
        cells = [tuple(indices)]
    else:
        x, y, z = indices
        cells = [(x, y), (x, z), (z, y)]
    pkg = WitnessPackage(
        function=f,
        space=space,
        transformed=transformed,
        violated_axiom=axiom,
        indices=tuple(indices),
        values_before=tuple(d[i][j] for i, j in cells),
        values_after=tuple(e[i][j] for i, j in cells),
        notes=notes,
    )
    if not pkg.replay():
        raise AssertionError(f"constructed witness failed to replay: {pkg}")
    return pkg


def witness_not_pseudoultrametric_preserving(f: TransformFunction, witness=None) -> WitnessPackage:
    """Ultrametric space whose image under f is not a pseudoultrametric.

    If f(0) != 0 the image has a nonzero diagonal.  Otherwise, for a < b with
    f(a) > f(b), the three-point ultrametric with sides d12 = d13 = b and
    d23 = a has an image breaking the strong triangle inequality at the side
    (x2, x3).  ``witness`` may be given in either order.
    """
    f0 = evaluate(f, 0)
    if f0 != 0:
        space = Dissimilarity([[0, 1], [1, 0]])
        return _package(f, space, "reflexive", (0,), f_at_zero=f0)
    if witness is None:
        check = is_increasing(f)
        if check.holds:
            raise NoWitnessError("f is increasing with f(0) = 0; no witness exists")
        witness = check.witness
    a, b = sorted(witness)
    fa, fb = evaluate_exact(f, a), evaluate_exact(f, b)
    if not (0 < a < b and fa > fb):
        raise PreconditionError(f"({a}, {b}) is not a monotonicity witness: f(a)={fa}, f(b)={fb}")
    space = Dissimilarity.from_sides(b, b, a)
    if not classify_space(space).ultrametric:
        raise AssertionError("constructed space is not ultrametric")
    return _package(f, space, "strong_triangle", (1, 2, 0), a=a, b=b)


def witness_not_semimetric_preserving(f: TransformFunction) -> WitnessPackage:
    """Two-point ultrametric whose image is not a semimetric."""
    check = is_amenable(f)
    if check.holds:
        raise NoWitnessError("f is amenable; no witness exists")
    (t,) = check.witness
    if t == 0:
        space = Dissimilarity([[0, 1], [1, 0]])
        return _package(f, space, "reflexive", (0,), t=t)
    space = Dissimilarity([[0, t], [t, 0]])
    return _package(f, space, "identity", (0, 1), t=t)


def witness_not_ultrametric_metric_preserving(f: TransformFunction, witness=None) -> WitnessPackage:
    """Three-point ultrametric (a, b, b) whose image violates the triangle inequality.

    Requires f amenable and a doubling witness a <= b with f(a) > 2 f(b).
    """
    if not is_amenable(f).holds:
        raise PreconditionError("f is not amenable; use witness_not_semimetric_preserving")
    if witness is None:
        check = is_doubling(f)
        if check.holds:
            raise NoWitnessError("f satisfies f(a) <= 2 f(b) for a <= b; no witness exists")
        witness = check.witness
    a, b = sorted(witness)
    fa, fb = evaluate_exact(f, a), evaluate_exact(f, b)
    if not fa > 2 * fb:
        raise PreconditionError(f"({a}, {b}) is not a doubling witness: f(a)={fa}, f(b)={fb}")
    # a > 0 and a < b follow from amenability: f(0) = 0 and f(a) > 2 f(a) is impossible
    space = Dissimilarity.from_sides(a, b, b)
    if not classify_space(space).ultrametric:
        raise AssertionError("constructed space is not ultrametric")
    return _package(f, space, "triangle", (0, 1, 2), a=a, b=b)


def witness_not_ultrametric_preserving(f: TransformFunction) -> WitnessPackage:
    """Dispatch: amenability failure first, then monotonicity failure."""
    if not is_amenable(f).holds:
        return witness_not_semimetric_preserving(f)
    if not is_increasing(f).holds:
        return witness_not_pseudoultrametric_preserving(f)
    raise NoWitnessError("f is amenable and increasing; no witness exists")


def _require_metric(space: Dissimilarity, what: str):
    report = classify_space(space)
    if not report.metric:
        raise PreconditionError(f"{what} needs a metric space; input is not a metric")
    return report


def dual_witness(space: Dissimilarity) -> Optional[WitnessPackage]:
    """For a non-ultrametric metric, an amenable increasing f_{a,b} with f o d not a metric.

    Returns None for an ultrametric: no amenable increasing function can then
    break the triangle inequality.
    """
    _require_metric(space, "dual_witness")
    worst = worst_ultrametric_violation(space)
    if worst is None:
        return None
    f = make_fab(worst.a, worst.b)
    return _package(f, space, "triangle", worst.triple, a=worst.a, b=worst.b)


@dataclass(frozen=True)
class ProbeResult:
    ultrametric: bool
    pairs_checked: int
    failing_pair: Optional[tuple] = None
    witness: Optional[WitnessPackage] = None


def probe_fab(space: Dissimilarity) -> ProbeResult:
    """Apply f_{a,b} for every pair a < b of positive occurring distances.

    f_{a,b} o d depends on d only through comparisons with a and b, so the
    occurring values are a sufficient test set.  Stops at the first pair
    (in increasing (a, b) order) whose image is not a metric.
    """
    report = _require_metric(space, "probe_fab")
    values = [v for v in space.values() if v > 0]
    checked = 0
    result = ProbeResult(True, 0)
    for i, a in enumerate(values):
        for b in values[i + 1:]:
            checked += 1
            f = make_fab(a, b)
            image = apply(f, space)
            image_report = classify_space(image)
            if not image_report.metric:
                pkg = _package(f, space, "triangle", image_report.triangle.witness, a=a, b=b)
                result = ProbeResult(False, checked, (a, b), pkg)
                break
        if not result.ultrametric:
            break
    else:
        result = ProbeResult(True, checked)
    if result.ultrametric != report.ultrametric:
        raise AssertionError("probe_fab disagrees with the direct ultrametric check")
    return result


# --- snowflake probes ---------------------------------------------------------

def _sorted_triples(space: Dissimilarity):
    """Distinct triples as (triple, x, y, z): z = d(t0, t1) is the largest side."""
    d = space.entries
    n = space.n
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                options = ((d[i][j], (i, j, k)), (d[i][k], (i, k, j)), (d[j][k], (j, k, i)))
                z, triple = max(options, key=lambda o: o[0])
                x, y = d[triple[0]][triple[2]], d[triple[1]][triple[2]]
                yield triple, x, y, z


class _PowerCache:
    def __init__(self, alpha):
        self.alpha = Fraction(alpha)
        self._cache = {}

    def __call__(self, t, bits):
        key = (t, bits)
        if key not in self._cache:
            self._cache[key] = power(t, self.alpha, bits)
        return self._cache[key]


def _snowflake_sign(pw, x, y, z, precision, max_precision):
    """Sign of x^alpha + y^alpha - z^alpha."""

    def build(bits):
        return pw(x, bits) + pw(y, bits) - pw(z, bits)

    return certified_sign(build, precision=precision, max_precision=max_precision, what="snowflake triangle")


@dataclass(frozen=True)
class SnowflakeResult:
    """``metric`` is None when some triple stayed undecided and none failed."""

    metric: Optional[bool]
    alpha: Fraction
    witness: Optional[tuple] = None
    undecided: tuple = ()


def probe_snowflake(
    space: Dissimilarity,
    alpha,
    precision: int = DEFAULT_PRECISION,
    max_precision: int = DEFAULT_MAX_PRECISION,
) -> SnowflakeResult:
    """Is d ** alpha a metric?  Exact for integer alpha, certified enclosures otherwise."""
    alpha = Fraction(alpha)
    if alpha <= 1:
        raise InputError(f"probe_snowflake needs alpha > 1, got {alpha}")
    _require_metric(space, "probe_snowflake")
    pw = _PowerCache(alpha)
    undecided = []
    for triple, x, y, z in _sorted_triples(space):
        if z <= max(x, y):
            continue  # strong triangle holds here, so every power does too
        try:
            s = _snowflake_sign(pw, x, y, z, precision, max_precision)
        except UndecidedError:
            undecided.append(triple)
            continue
        if s < 0:
            return SnowflakeResult(False, alpha, triple, tuple(undecided))
    return SnowflakeResult(None if undecided else True, alpha, None, tuple(undecided))


@dataclass(frozen=True)
class CriticalExponent:
    """Root of x^a + y^a = z^a for the critical triple, bracketed by [lo, hi]."""

    lo: Fraction
    hi: Fraction
    triple: tuple

    @property
    def alpha(self) -> Fraction:
        return (self.lo + self.hi) / 2


def _root_bracket(x, y, z, tol, precision, max_precision, below=None):
    """Bisection on g(a) = x^a + y^a - z^a, strictly decreasing for z > max(x, y).

    Keeps g(lo) >= 0 > g(hi).  With ``below`` set, returns None as soon as the
    root is known to be >= below.
    """
    def sign(a):
        pw = _PowerCache(a)
        try:
            return _snowflake_sign(pw, x, y, z, precision, max_precision)
        except UndecidedError:
            return 0  # |g(a)| below the cap: a is a root to working accuracy

    lo = Fraction(1)  # g(1) >= 0 by the triangle inequality
    if below is not None and sign(below) >= 0:
        return None
    hi = Fraction(2)
    while sign(hi) >= 0:
        lo, hi = hi, hi * 2
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if sign(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


def min_falsifying_exponent(
    space: Dissimilarity,
    tol=Fraction(1, 2 ** 30),
    precision: int = DEFAULT_PRECISION,
    max_precision: int = DEFAULT_MAX_PRECISION,
) -> Optional[CriticalExponent]:
    """Smallest alpha beyond which d ** alpha stops being a metric; None for ultrametrics."""
    _require_metric(space, "min_falsifying_exponent")
    tol = Fraction(tol)
    best = None
    for triple, x, y, z in _sorted_triples(space):
        if z <= max(x, y):
            continue
        bracket = _root_bracket(
            x, y, z, tol, precision, max_precision, below=None if best is None else best.lo
        )
        if bracket is None:
            continue
        lo, hi = bracket
        if best is None or lo < best.lo:
            best = CriticalExponent(lo, hi, triple)
    return best
