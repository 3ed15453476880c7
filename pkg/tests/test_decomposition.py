from fractions import Fraction

import pytest

from ultrapres import (
    Dissimilarity,
    GenSpec,
    PreconditionError,
    apply,
    classify_function,
    classify_space,
    decompose,
    gen_function,
    gen_pseudoultrametric,
    gen_ultrametric,
    identity,
    make_cap,
    make_threshold,
    zero_gap_radius,
)
from ultrapres.functions import vanishes_on

import oracles

F = Fraction


def test_zero_pair_example():
    rho = Dissimilarity([[0, 0, 1], [0, 0, 1], [1, 1, 0]])
    res = decompose(rho)
    assert res.r_star == 1
    assert res.ultrametric.entries == (
        (0, F(1, 2), 1),
        (F(1, 2), 0, 1),
        (1, 1, 0),
    )
    assert res.threshold_fn == make_threshold(1)
    assert apply(res.threshold_fn, res.ultrametric) == rho
    assert res.composition_verified


def test_all_zero_convention():
    rho = Dissimilarity([[0] * 3 for _ in range(3)])
    res = decompose(rho)
    assert res.r_star == 1
    assert set(res.ultrametric.values()) == {F(1, 2)}
    assert apply(res.threshold_fn, res.ultrametric) == rho


def test_rejects_ultrametric_and_non_pseudoultrametric():
    with pytest.raises(PreconditionError):
        decompose(Dissimilarity.from_sides(1, 2, 2))
    with pytest.raises(PreconditionError):
        decompose(Dissimilarity.from_sides(3, 4, 5))


def test_zero_gap_examples():
    d = Dissimilarity.from_sides(F(1, 4), 2, 2)
    assert zero_gap_radius(d, make_threshold(1)) == F(1, 4)
    assert vanishes_on(make_threshold(1), F(1, 4))
    assert zero_gap_radius(d, identity()) is None
    for s in range(20):
        assert zero_gap_radius(gen_ultrametric(GenSpec(seed=s, n=5)), make_cap(F(3, 2))) is None


def test_round_trip_on_generated():
    for s in range(150):
        rho = gen_pseudoultrametric(GenSpec(seed=s, n=2 + s % 11))
        res = decompose(rho)
        assert oracles.classes(res.ultrametric.entries)["ultrametric"]
        assert apply(res.threshold_fn, res.ultrametric) == rho
        assert classify_function(res.threshold_fn).pseudoultrametric_preserving


def test_zero_gap_forward_direction_on_generated():
    hits = 0
    for s in range(200):
        d = gen_ultrametric(GenSpec(seed=s, n=6))
        f = gen_function(GenSpec(seed=10_000 + s), "increasing_zero_at_zero")
        image = apply(f, d)
        r0 = zero_gap_radius(d, f)
        if classify_space(image).ultrametric:
            assert r0 is None
        else:
            hits += 1
            assert r0 > 0 and vanishes_on(f, r0)
    assert hits > 10
