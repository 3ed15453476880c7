"""k-separating families of increasing amenable functions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InputError, NoWitnessError, PreconditionError, UndecidedError
from .exact import DEFAULT_MAX_PRECISION, DEFAULT_PRECISION, as_enclosure, certified_sign, parse_value
from .functions import (
    TransformFunction,
    evaluate,
    function_from_json,
    is_amenable,
    is_exactly_applicable,
    is_increasing,
)
from .spaces import Dissimilarity, classify_space
from .theorems import _sorted_triples, apply


@dataclass(frozen=True)
class FunctionFamily:
    members: tuple

    def __init__(self, members: Sequence[TransformFunction]):
        members = tuple(members)
        if not members:
            raise InputError("a family needs at least one member")
        for idx, f in enumerate(members):
            inc = is_increasing(f)
            if not inc.holds:
                raise InputError(f"member {idx} is not increasing: witness {inc.witness}", idx)
            amen = is_amenable(f)
            if not amen.holds:
                raise InputError(f"member {idx} is not amenable: witness {amen.witness}", idx)
        object.__setattr__(self, "members", members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @classmethod
    def from_json(cls, obj) -> "FunctionFamily":
        if not isinstance(obj, list):
            raise InputError("a family file must hold a JSON list of function specs")
        return cls(function_from_json(item, where=f"family[{i}]") for i, item in enumerate(obj))

    def to_json(self):
        return [f.to_json() for f in self.members]


def _weighted_gap(f, t1, t2, k):
    """Enclosure builder for f(t2) - k f(t1)."""

    def build(bits):
        gap = as_enclosure(evaluate(f, t2, bits)) - as_enclosure(evaluate(f, t1, bits)).scale(k)
        return gap.lo if gap.is_exact else gap

    return build


def separation_sign(f, t1, t2, k, precision=DEFAULT_PRECISION, max_precision=DEFAULT_MAX_PRECISION) -> int:
    """Sign of f(t2) - k f(t1); +1 means f separates the pair at level k."""
    return certified_sign(
        _weighted_gap(f, t1, t2, k), precision=precision, max_precision=max_precision,
        what=f"k*f({t1}) < f({t2})",
    )


def _ordered_pair(t1, t2):
    t1, t2 = parse_value(t1), parse_value(t2)
    if not t1 < t2:
        raise InputError(f"need t1 < t2, got ({t1}, {t2})")
    return t1, t2


def _check_k(k):
    k = parse_value(k)
    if k <= 1:
        raise InputError(f"k must exceed 1, got {k}")
    return k


def find_separator(family: FunctionFamily, t1, t2, k, precision=DEFAULT_PRECISION,
                   max_precision=DEFAULT_MAX_PRECISION) -> Optional[int]:
    """Index of the first member with k f(t1) < f(t2), or None."""
    t1, t2 = _ordered_pair(t1, t2)
    k = _check_k(k)
    for idx, f in enumerate(family):
        if separation_sign(f, t1, t2, k, precision, max_precision) > 0:
            return idx
    return None


def power_separator_exponent(t1, t2, k) -> Fraction:
    """Smallest integer alpha with k t1**alpha < t2**alpha.

    Doubling finds a power of two that works, then integer bisection below
    it.  Integer exponents keep the final check exact.
    """
    t1, t2 = _ordered_pair(t1, t2)
    k = _check_k(k)
    if t1 == 0:
        raise InputError("t1 must be positive")

    def works(alpha):
        return k * t1 ** alpha < t2 ** alpha

    hi = 1
    while not works(hi):
        hi *= 2
    lo = hi // 2  # fails, or 0 when hi == 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if works(mid):
            hi = mid
        else:
            lo = mid
    if not works(hi):
        raise AssertionError("separator exponent failed verification")
    return Fraction(hi)


@dataclass(frozen=True)
class SeparationResult:
    holds: bool
    failing_pair: Optional[tuple] = None
    margins: tuple = ()


def is_k_separating_on(family: FunctionFamily, k, pairs, precision=DEFAULT_PRECISION,
                       max_precision=DEFAULT_MAX_PRECISION) -> SeparationResult:
    """k-separation restricted to a finite list of pairs t1 < t2.

    On failure, ``margins`` holds f(t2) - k f(t1) for every member at the
    failing pair (Fractions, or Enclosures for non-integer powers).
    """
    k = _check_k(k)
    checked = [_ordered_pair(t1, t2) for t1, t2 in pairs]
    for t1, t2 in checked:
        if find_separator(family, t1, t2, k, precision, max_precision) is None:
            margins = tuple(_weighted_gap(f, t1, t2, k)(precision) for f in family)
            return SeparationResult(False, (t1, t2), margins)
    return SeparationResult(True)


def image_is_metric(f: TransformFunction, space: Dissimilarity, precision=DEFAULT_PRECISION,
                    max_precision=DEFAULT_MAX_PRECISION) -> bool:
    """Is f o d a metric?  Certified triple scan when f has no exact image."""
    if is_exactly_applicable(f):
        return classify_space(apply(f, space)).metric
    # non-integer power: 0 -> 0 and positive -> positive, so only triangles can fail
    if not classify_space(space).semimetric:
        return False
    for _triple, x, y, z in _sorted_triples(space):
        def build(bits, x=x, y=y, z=z):
            return as_enclosure(evaluate(f, x, bits)) + evaluate(f, y, bits) - evaluate(f, z, bits)

        if certified_sign(build, precision=precision, max_precision=max_precision) < 0:
            return False
    return True


@dataclass(frozen=True)
class Certificate:
    t3: Fraction
    metric: bool
    ultrametric: bool
    member_metric: tuple

    @property
    def valid(self) -> bool:
        return self.metric and not self.ultrametric and all(self.member_metric)


def counterexample_space(family: FunctionFamily, t1, t2):
    """Metric, non-ultrametric space on which every member still yields a metric.

    Exists exactly when no member satisfies 2 f(t1) < f(t2).  Uses
    t3 = (t1 + t2) / 2 and sides d12 = t2, d13 = d23 = t3.
    """
    t1, t2 = _ordered_pair(t1, t2)
    if t1 == 0:
        raise InputError("t1 must be positive")
    for idx, f in enumerate(family):
        if separation_sign(f, t1, t2, 2) > 0:
            raise NoWitnessError(
                f"member {idx} separates ({t1}, {t2}) at k=2; the family is 2-separating "
                "on this pair and no counterexample exists"
            )
    t3 = (t1 + t2) / 2
    for idx, f in enumerate(family):
        # monotonicity gives 2 f(t3) >= f(t2); evaluated anyway
        if separation_sign(f, t3, t2, 2) > 0:
            raise AssertionError(f"member {idx} is not monotone at t3")
    space = Dissimilarity.from_sides(t2, t3, t3)
    report = classify_space(space)
    cert = Certificate(
        t3=t3,
        metric=report.metric,
        ultrametric=report.ultrametric,
        member_metric=tuple(image_is_metric(f, space) for f in family),
    )
    if not cert.valid:
        raise AssertionError(f"counterexample certificate failed: {cert}")
    return space, cert


@dataclass(frozen=True)
class FamilyVerdict:
    """``ultrametric`` is None when 2-separation could not be certified."""

    ultrametric: Optional[bool]
    inconclusive_pair: Optional[tuple] = None
    failing_member: Optional[int] = None

    @property
    def label(self) -> str:
        if self.ultrametric is None:
            return "inconclusive"
        return "ultrametric" if self.ultrametric else "not_ultrametric"


def ultrametric_by_family(family: FunctionFamily, space: Dissimilarity,
                          certified_2_separating: bool = False,
                          precision=DEFAULT_PRECISION,
                          max_precision=DEFAULT_MAX_PRECISION) -> FamilyVerdict:
    """Decide ultrametricity of a metric from "f o d is a metric for all f in F".

    Sound when F 2-separates every pair of distinct positive distances in d;
    that is checked here unless the caller vouches for global 2-separation.
    """
    report = classify_space(space)
    if not report.metric:
        raise PreconditionError("ultrametric_by_family needs a metric space")
    if not certified_2_separating:
        values = [v for v in space.values() if v > 0]
        for i, t1 in enumerate(values):
            for t2 in values[i + 1:]:
                try:
                    sep = find_separator(family, t1, t2, 2, precision, max_precision)
                except UndecidedError:
                    sep = None
                if sep is None:
                    return FamilyVerdict(None, (t1, t2))
    failing = None
    for idx, f in enumerate(family):
        if not image_is_metric(f, space, precision, max_precision):
            failing = idx
            break
    verdict = failing is None
    if verdict != report.ultrametric:
        raise AssertionError("family verdict disagrees with the direct ultrametric check")
    return FamilyVerdict(verdict, None, failing)
