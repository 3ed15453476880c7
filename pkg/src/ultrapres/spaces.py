"""Finite dissimilarity spaces and exhaustive axiom checking.

Triples are reported as ordered ``(x, y, z)`` meaning the inequality for the
side ``d(x, y)`` through the pivot ``z`` failed:

* triangle:        d(x, y) > d(x, z) + d(z, y)
* strong triangle: d(x, y) > max(d(x, z), d(z, y))

All indices are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from .errors import InputError
from .exact import format_value, parse_value

AXIOMS = ("reflexive", "identity", "triangle", "strong_triangle")
CLASSES = ("semimetric", "pseudometric", "pseudoultrametric", "metric", "ultrametric")


@dataclass(frozen=True)
class Dissimilarity:
    """Symmetric nonnegative n x n matrix of exact rationals.

    A zero diagonal is *not* enforced; it is checked by :func:`classify_space`.
    """

    entries: tuple
    labels: Optional[tuple] = None

    def __init__(self, entries: Sequence[Sequence], labels=None):
        rows = []
        for i, row in enumerate(entries):
            rows.append(tuple(parse_value(v, where=(i, j)) for j, v in enumerate(row)))
        n = len(rows)
        if n == 0:
            raise InputError("a space needs at least one point")
        for i, row in enumerate(rows):
            if len(row) != n:
                raise InputError(f"row {i} has {len(row)} entries, expected {n}", (i,))
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise InputError(
                        f"asymmetric entries d[{i}][{j}]={rows[i][j]} and d[{j}][{i}]={rows[j][i]}",
                        (i, j),
                    )
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n:
                raise InputError(f"{len(labels)} labels for {n} points")
        object.__setattr__(self, "entries", tuple(rows))
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_sides(cls, d12, d13, d23, labels=None) -> "Dissimilarity":
        """Three-point space with zero diagonal."""
        return cls([[0, d12, d13], [d12, 0, d23], [d13, d23, 0]], labels)

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __len__(self):
        return self.n

    def sides(self):
        """(d01, d02, d12) for a three-point space."""
        return (self.entries[0][1], self.entries[0][2], self.entries[1][2])

    def values(self):
        """Sorted distinct off-diagonal values."""
        n = self.n
        return sorted({self.entries[i][j] for i in range(n) for j in range(i + 1, n)})

    def map(self, fn) -> "Dissimilarity":
        return Dissimilarity([[fn(v) for v in row] for row in self.entries], self.labels)

    @cached_property
    def scaled(self):
        # Common-denominator integer copy: comparisons on ints are much cheaper than on Fractions.
        den = 1
        for row in self.entries:
            for v in row:
                den = math.lcm(den, v.denominator)
        return tuple(tuple(v.numerator * (den // v.denominator) for v in row) for row in self.entries)

    def to_json(self) -> dict:
        out = {"n": self.n}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        out["d"] = [[format_value(v) for v in row] for row in self.entries]
        return out


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.holds


@dataclass(frozen=True)
class AxiomReport:
    reflexive: Verdict
    identity: Verdict
    triangle: Verdict
    strong_triangle: Verdict
    classes: dict = field(default_factory=dict)

    def __getattr__(self, name):
        # Class booleans read as attributes: report.ultrametric, report.metric, ...
        classes = self.__dict__.get("classes", {})
        if name in classes:
            return classes[name]
        raise AttributeError(name)

    def axiom(self, name) -> Verdict:
        return getattr(self, name)

    def to_json(self) -> dict:
        axioms = {}
        for name in AXIOMS:
            v = getattr(self, name)
            axioms[name] = {"holds": v.holds, "witness": list(v.witness) if v.witness else None}
        return {"axioms": axioms, "classes": dict(self.classes)}


def _first_reflexive_failure(m):
    for i, row in enumerate(m):
        if row[i] != 0:
            return (i,)
    return None


def _first_identity_failure(m):
    n = len(m)
    for i in range(n):
        row = m[i]
        for j in range(i + 1, n):
            if row[j] == 0:
                return (i, j)
    return None


def _distinct_triples_ok(m, strong):
    """Fast check over unordered distinct triples.

    With a zero diagonal, every degenerate ordered triple holds trivially, so
    distinct triples decide both inequalities.
    """
    n = len(m)
    for i in range(n):
        mi = m[i]
        for j in range(i + 1, n):
            dij = mi[j]
            mj = m[j]
            for k in range(j + 1, n):
                p, q = mi[k], mj[k]
                if strong:
                    # the largest side must be attained at least twice
                    if dij > p:
                        if q != dij:
                            return False
                    elif p > dij:
                        if q != p:
                            return False
                    elif q > dij:
                        return False
                else:
                    if 2 * max(dij, p, q) > dij + p + q:
                        return False
    return True


def _first_ordered_failure(m, strong):
    n = len(m)
    rng = range(n)
    for x in rng:
        mx = m[x]
        for y in rng:
            dxy = mx[y]
            my = m[y]
            for z in rng:
                a, b = mx[z], my[z]  # d(y, z) == d(z, y) by symmetry
                bad = dxy > (a if a > b else b) if strong else dxy > a + b
                if bad:
                    return (x, y, z)
    return None


def _triangle_family(m, strong, reflexive):
    if reflexive and _distinct_triples_ok(m, strong):
        return None
    return _first_ordered_failure(m, strong)


def classify_space(space: Dissimilarity) -> AxiomReport:
    """Check every axiom over all points, pairs, and ordered triples.

    Each failed axiom carries its lexicographically first witness.
    """
    m = space.scaled
    refl = _first_reflexive_failure(m)
    ident = _first_identity_failure(m)
    tri = _triangle_family(m, False, refl is None)
    strong = _triangle_family(m, True, refl is None)
    reflexive = refl is None
    semimetric = reflexive and ident is None
    classes = {
        "semimetric": semimetric,
        "pseudometric": reflexive and tri is None,
        "pseudoultrametric": reflexive and strong is None,
        "metric": semimetric and tri is None,
        "ultrametric": semimetric and strong is None,
    }
    return AxiomReport(
        reflexive=Verdict(reflexive, refl),
        identity=Verdict(ident is None, ident),
        triangle=Verdict(tri is None, tri),
        strong_triangle=Verdict(strong is None, strong),
        classes=classes,
    )


def violates(space: Dissimilarity, axiom: str, indices) -> bool:
    """Direct evaluation of one axiom at one witness."""
    d = space.entries
    if axiom == "reflexive":
        (i,) = indices
        return d[i][i] != 0
    if axiom == "identity":
        i, j = indices
        return i != j and d[i][j] == 0
    x, y, z = indices
    if axiom == "triangle":
        return d[x][y] > d[x][z] + d[z][y]
    if axiom == "strong_triangle":
        return d[x][y] > max(d[x][z], d[z][y])
    raise ValueError(f"unknown axiom {axiom!r}")


def check_triangle_perimeter(space: Dissimilarity, i: int, j: int, k: int) -> bool:
    """Twice the longest side of {i, j, k} is at most the perimeter.

    Equivalent to all three triangle inequalities on the triple.
    """
    n = space.n
    for idx in (i, j, k):
        if not 0 <= idx < n:
            raise IndexError(f"index {idx} out of range for {n} points")
    d = space.entries
    sides = (d[i][j], d[j][k], d[k][i])
    return 2 * max(sides) <= sum(sides)


@dataclass(frozen=True)
class UltrametricViolation:
    """A triple with b = d(x1, x2) > a = max(d(x1, x3), d(x2, x3))."""

    triple: tuple
    a: Fraction
    b: Fraction


def worst_ultrametric_violation(space: Dissimilarity) -> Optional[UltrametricViolation]:
    """The strong-triangle violation with the largest gap b - a.

    Ties go to the larger b, then to the lexicographically first triple.
    Returns None for a space satisfying the strong triangle inequality on
    distinct points.
    """
    d = space.entries
    n = space.n
    best = None
    best_key = None
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                sides = ((d[i][j], (i, j, k)), (d[i][k], (i, k, j)), (d[j][k], (j, k, i)))
                for b, triple in sides:
                    x, y, z = triple
                    a = max(d[x][z], d[y][z])
                    if b > a:
                        key = (-(b - a), -b, triple)
                        if best_key is None or key < best_key:
                            best_key = key
                            best = UltrametricViolation(triple, a, b)
    return best
