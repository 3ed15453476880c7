"""Factor a pseudoultrametric as (threshold function) o (ultrametric), and back."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import PreconditionError
from .exact import format_value
from .functions import (
    PiecewiseAffine,
    TransformFunction,
    classify_function,
    evaluate_exact,
    make_threshold,
    vanishes_on,
)
from .spaces import Dissimilarity, classify_space
from .theorems import apply


@dataclass(frozen=True)
class DecompositionResult:
    r_star: Fraction
    ultrametric: Dissimilarity
    threshold_fn: PiecewiseAffine
    composition_verified: bool

    def to_json(self) -> dict:
        return {
            "r_star": format_value(self.r_star),
            "ultrametric": self.ultrametric.to_json(),
            "threshold_fn": self.threshold_fn.to_json(),
            "composition_verified": self.composition_verified,
        }


def decompose(rho: Dissimilarity) -> DecompositionResult:
    """Write a non-ultrametric pseudoultrametric rho as f* o d with d ultrametric.

    r* is the smallest positive value of rho; d replaces each off-diagonal
    zero by r*/2, and f* is 0 on [0, r*/2] and the identity above.  When
    every distance is zero, r* := 1 by convention.
    """
    report = classify_space(rho)
    if not report.pseudoultrametric:
        raise PreconditionError("decompose needs a pseudoultrametric")
    if report.ultrametric:
        raise PreconditionError("input is already an ultrametric; f = identity factors it trivially")
    positive = [v for v in rho.values() if v > 0]
    r_star = min(positive) if positive else Fraction(1)
    half = r_star / 2
    n = rho.n
    d = [
        [0 if i == j else (rho[i, j] if rho[i, j] > 0 else half) for j in range(n)]
        for i in range(n)
    ]
    ultra = Dissimilarity(d, rho.labels)
    f_star = make_threshold(r_star)
    verified = classify_space(ultra).ultrametric and apply(f_star, ultra) == rho
    if not verified:
        raise AssertionError("decomposition failed its own verification")
    return DecompositionResult(r_star, ultra, f_star, verified)


def zero_gap_radius(space: Dissimilarity, f: TransformFunction) -> Optional[Fraction]:
    """Smallest positive distance collapsed to 0 by f, when f o d loses ultrametricity.

    Confirms that f vanishes on all of [0, r0).  Returns None when f o d is
    still an ultrametric.
    """
    if not classify_space(space).ultrametric:
        raise PreconditionError("zero_gap_radius needs an ultrametric space")
    cls = classify_function(f)
    if not cls.pseudoultrametric_preserving:
        raise PreconditionError("zero_gap_radius needs f increasing with f(0) = 0")
    image = apply(f, space)
    if classify_space(image).ultrametric:
        return None
    r0 = min(v for v in space.values() if v > 0 and evaluate_exact(f, v) == 0)
    if isinstance(f, PiecewiseAffine) and not vanishes_on(f, r0):
        raise AssertionError(f"f does not vanish on [0, {r0})")
    return r0
