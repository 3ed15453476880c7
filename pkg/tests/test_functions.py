import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultrapres import (
    InputError,
    PiecewiseAffine,
    Power,
    affine,
    classify_function,
    evaluate,
    identity,
    is_amenable,
    is_doubling,
    is_increasing,
    make_cap,
    make_fab,
    make_power,
    make_threshold,
    running_max,
    step_function,
)
from ultrapres.functions import Piece, function_from_json, vanishes_on

import oracles

F = Fraction


def drop_step():
    # 0 at 0, 1 on (0,1], 1/2 on (1, inf)
    return step_function(0, [(1, 1), (None, F(1, 2))])


def big_drop_step():
    return step_function(0, [(1, 3), (None, 1)])


def test_evaluate_examples():
    f = make_fab(1, 3)
    assert [evaluate(f, t) for t in (0, F(1, 2), 1, 2)] == [0, F(1, 2), F(1, 2), 3]
    assert evaluate(identity(), 0) == 0
    assert evaluate(make_power(2), F(3, 2)) == F(9, 4)
    assert evaluate(make_cap(F(3, 2)), 2) == F(3, 2)
    assert [evaluate(make_threshold(1), t) for t in (F(1, 4), F(1, 2), 1)] == [0, 0, 1]


def test_increasing_examples():
    for a, b in [(1, 3), (F(1, 3), 7), (2, 1), (5, 5)]:
        assert is_increasing(make_fab(a, b))
    v = is_increasing(drop_step())
    assert not v.holds and v.witness == (1, 2)
    assert is_increasing(make_power(F(1, 3))) and is_increasing(make_power(5))


def test_fab_with_small_b_is_not_increasing():
    # f(a) = a/2 > b = f(a+1) once b < a/2
    v = is_increasing(make_fab(4, 1))
    assert not v.holds
    a, b = v.witness
    assert a < b and evaluate(make_fab(4, 1), a) > evaluate(make_fab(4, 1), b)


def test_amenable_examples():
    v = is_amenable(affine(1, 1))
    assert not v.holds and v.witness == (0,)
    v = is_amenable(make_threshold(1))
    assert not v.holds and v.witness == (F(1, 2),)
    assert is_amenable(identity())
    assert is_amenable(make_power(F(5, 2)))


def test_doubling_examples():
    for a, b in [(1, 3), (2, 1), (4, 1), (1, F(1, 4)), (4, F(1, 2))]:
        # running max on the tail is max(a/2, b), so doubling iff a/2 <= 2b
        assert is_doubling(make_fab(a, b)).holds is (F(a) / 2 <= 2 * F(b))
    v = is_doubling(big_drop_step())
    assert not v.holds and v.witness == (1, 2)
    assert is_doubling(make_power(F(3, 2)))


def test_classify_examples():
    c = classify_function(make_fab(1, 3))
    assert c.increasing and c.amenable and c.ultrametric_preserving and c.ultrametric_metric_preserving
    assert classify_function(make_cap(F(3, 2))).ultrametric_preserving
    c = classify_function(make_threshold(1))
    assert c.pseudoultrametric_preserving and not c.semimetric_preserving


def test_constructors_reject_nonpositive():
    for bad in (lambda: make_fab(0, 1), lambda: make_cap(0), lambda: make_threshold(-1), lambda: Power(0)):
        with pytest.raises(InputError):
            bad()


def test_piece_validation():
    with pytest.raises(InputError):  # gap between 1 and 2
        PiecewiseAffine([Piece(F(0), F(1), True, True, F(0), F(1)), Piece(F(2), None, True, False, F(0), F(1))])
    with pytest.raises(InputError):  # overlap at 1
        PiecewiseAffine([Piece(F(0), F(1), True, True, F(0), F(1)), Piece(F(1), None, True, False, F(0), F(1))])
    with pytest.raises(InputError):  # negative on the tail
        affine(-1, 5)
    with pytest.raises(InputError):  # bounded last piece
        PiecewiseAffine([Piece(F(0), F(1), True, True, F(0), F(1))])


def test_decreasing_bounded_piece_allowed():
    f = PiecewiseAffine([
        Piece(F(0), F(4), True, True, F(-1), F(4)),
        Piece(F(4), None, False, False, F(0), F(1)),
    ])
    assert evaluate(f, 4) == 0 and evaluate(f, 5) == 1
    assert not is_increasing(f)


def test_running_max():
    m = running_max(big_drop_step())
    assert [evaluate(m, t) for t in (0, F(1, 2), 1, 2, 100)] == [0, 3, 3, 3, 3]
    m = running_max(make_fab(1, 3))
    assert [evaluate(m, t) for t in (0, 1, 2)] == [0, F(1, 2), 3]


def test_vanishes_on():
    assert vanishes_on(make_threshold(1), F(1, 2))
    assert vanishes_on(make_threshold(1), F(1, 4))
    assert not vanishes_on(make_threshold(1), 1)


def test_json_round_trip():
    for f in (make_fab(1, 3), make_cap(F(3, 2)), drop_step(), make_power(F(5, 2)), make_threshold(2)):
        assert function_from_json(f.to_json()) == f


def test_json_defaults():
    f = function_from_json({
        "kind": "piecewise_affine",
        "pieces": [
            {"from": 0, "to": 0, "intercept": 0},
            {"from": 0, "to": 1, "from_closed": False, "to_closed": True, "intercept": "1/2"},
            {"from": 1, "to": None, "from_closed": False, "intercept": 3},
        ],
    })
    assert f == make_fab(1, 3)
    with pytest.raises(InputError):
        function_from_json({"kind": "spline"})


# --- random functions and grid cross-validation ------------------------------

def random_pwa(rng: random.Random) -> PiecewiseAffine:
    """Random valid piecewise-affine function with explicit limits and closures."""
    count = rng.randint(1, 6)
    knots = sorted(rng.sample(range(1, 40), count - 1))
    knots = [F(0)] + [F(k, 4) for k in knots]
    pieces = []
    vals = [F(0), F(1, 2), F(1), F(2), F(3)]
    prefix_closed = rng.random() < 0.6
    if rng.random() < 0.5:
        pieces.append(Piece(F(0), F(0), True, True, F(0), rng.choice(vals[:3])))
        start_closed = False
    else:
        start_closed = True
    for idx, lo in enumerate(knots):
        last = idx == len(knots) - 1
        left = rng.choice(vals)
        lo_closed = start_closed if idx == 0 else not prefix_closed
        if last:
            slope = rng.choice([F(0), F(1, 2), F(1)])
            pieces.append(Piece(lo, None, lo_closed, False, slope, left - slope * lo))
        else:
            hi = knots[idx + 1]
            right = rng.choice(vals)
            slope = (right - left) / (hi - lo)
            pieces.append(Piece(lo, hi, lo_closed, prefix_closed, slope, left - slope * lo))
    return PiecewiseAffine(pieces)


def sample_grid(f):
    bps = [b for b in f.breakpoints() if b is not None]
    upper = 2 * max(bps + [F(1)])
    pts = set(oracles.grid(upper, 1200)) | set(bps)
    return sorted((t, evaluate(f, t)) for t in pts)


def _check_against_grid(f):
    samples = sample_grid(f)
    inc, dbl, amen = is_increasing(f), is_doubling(f), is_amenable(f)
    if oracles.grid_increasing_violation(samples):
        assert not inc.holds
    if oracles.grid_doubling_violation(samples):
        assert not dbl.holds
    if oracles.grid_amenable_violation(samples) is not None:
        assert not amen.holds
    if not inc.holds:
        a, b = inc.witness
        assert a < b and evaluate(f, a) > evaluate(f, b)
    if not dbl.holds:
        a, b = dbl.witness
        assert a <= b and evaluate(f, a) > 2 * evaluate(f, b)
    if not amen.holds:
        (t,) = amen.witness
        assert (t == 0 and evaluate(f, 0) != 0) or (t > 0 and evaluate(f, t) == 0)
    if inc.holds:
        assert dbl.holds
    return inc, dbl, amen


@settings(max_examples=300)
@given(st.integers(0, 2 ** 32))
def test_checks_agree_with_grid(seed):
    _check_against_grid(random_pwa(random.Random(seed)))


def test_increasing_implies_doubling_ten_thousand():
    rng = random.Random(7)
    seen = {"increasing": 0, "non_increasing_doubling": 0, "not_doubling": 0}
    for _ in range(10_000):
        f = random_pwa(rng)
        inc, dbl = is_increasing(f), is_doubling(f)
        assert not inc.holds or dbl.holds
        if inc.holds:
            seen["increasing"] += 1
        elif dbl.holds:
            seen["non_increasing_doubling"] += 1
        else:
            seen["not_doubling"] += 1
    # the sample actually exercises all three regions
    assert min(seen.values()) > 100, seen


def test_open_end_violation_located_inside():
    # M - 2f on (0, 2) reaches its sup only in the open limit at 2; witness must be interior
    f = PiecewiseAffine([
        Piece(F(0), F(0), True, True, F(0), F(0)),
        Piece(F(0), F(1), False, True, F(0), F(4)),
        Piece(F(1), F(2), False, False, F(-2), F(4)),
        Piece(F(2), None, True, False, F(0), F(3)),
    ])
    v = is_doubling(f)
    assert not v.holds
    a, b = v.witness
    assert a <= b and evaluate(f, a) > 2 * evaluate(f, b)
