"""Brute-force reference checks written straight from the definitions.

Nothing here imports the package's checkers; tests compare against these.
"""

from fractions import Fraction
from itertools import product


def axioms(m):
    n = len(m)
    idx = range(n)
    reflexive = all(m[i][i] == 0 for i in idx)
    identity = all(m[i][j] != 0 for i in idx for j in idx if i != j)
    triangle = all(m[x][y] <= m[x][z] + m[z][y] for x, y, z in product(idx, repeat=3))
    strong = all(m[x][y] <= max(m[x][z], m[z][y]) for x, y, z in product(idx, repeat=3))
    return {
        "reflexive": reflexive,
        "identity": identity,
        "triangle": triangle,
        "strong_triangle": strong,
    }


def classes(m):
    a = axioms(m)
    return {
        "semimetric": a["reflexive"] and a["identity"],
        "pseudometric": a["reflexive"] and a["triangle"],
        "pseudoultrametric": a["reflexive"] and a["strong_triangle"],
        "metric": a["reflexive"] and a["identity"] and a["triangle"],
        "ultrametric": a["reflexive"] and a["identity"] and a["strong_triangle"],
    }


def three_triangle_inequalities(m, i, j, k):
    pts = (i, j, k)
    return all(m[x][y] <= m[x][z] + m[z][y] for x, y, z in product(pts, repeat=3))


def sides(m):
    return (m[0][1], m[0][2], m[1][2])


def matrix(d12, d13, d23):
    return [[0, d12, d13], [d12, 0, d23], [d13, d23, 0]]


def grid(upper, count=1200):
    """Rational grid on [0, upper] with ``count`` + 1 points, plus a few halves."""
    upper = Fraction(upper)
    return [upper * i / count for i in range(count + 1)]


def grid_increasing_violation(values):
    """First adjacent pair (a, b) with f(a) > f(b) from sorted (t, f(t)) samples."""
    best = None
    for (a, fa) in values:
        if best is not None and best[1] > fa:
            return best[0], a
        if best is None or fa > best[1]:
            best = (a, fa)
    return None


def grid_doubling_violation(values):
    running = None
    for t, ft in values:
        if running is None or ft > running[1]:
            running = (t, ft)
        if running[1] > 2 * ft:
            return running[0], t
    return None


def grid_amenable_violation(values):
    for t, ft in values:
        if (t == 0) != (ft == 0):
            return t
    return None
