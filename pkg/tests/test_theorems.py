import random
from dataclasses import replace
from fractions import Fraction

import pytest

from ultrapres import (
    Dissimilarity,
    GenSpec,
    InputError,
    NoWitnessError,
    PreconditionError,
    PiecewiseAffine,
    affine,
    apply,
    classify_space,
    dual_witness,
    gen_function,
    gen_metric,
    gen_pseudoultrametric,
    gen_ultrametric,
    identity,
    make_cap,
    make_fab,
    make_power,
    make_threshold,
    min_falsifying_exponent,
    probe_fab,
    probe_snowflake,
    step_function,
    witness_not_pseudoultrametric_preserving,
    witness_not_semimetric_preserving,
    witness_not_ultrametric_metric_preserving,
    witness_not_ultrametric_preserving,
)
from ultrapres.functions import Piece

import oracles

F = Fraction


def tri(d12, d13, d23):
    return Dissimilarity.from_sides(F(d12), F(d13), F(d23))


def test_apply_examples():
    assert apply(make_cap(F(3, 2)), tri(1, 2, 2)).sides() == (1, F(3, 2), F(3, 2))
    assert classify_space(apply(make_cap(F(3, 2)), tri(1, 2, 2))).ultrametric
    assert apply(make_fab(4, 5), tri(3, 4, 5)).sides() == (2, 2, 5)
    d = tri(3, 4, 5)
    assert apply(identity(), d) == d
    assert apply(make_power(2), d).sides() == (9, 16, 25)


def test_apply_rejects_fractional_power():
    with pytest.raises(InputError):
        apply(make_power(F(5, 2)), tri(3, 4, 5))


def test_pseudoultrametric_witness():
    f = step_function(0, [(1, 1), (None, F(1, 2))])
    pkg = witness_not_pseudoultrametric_preserving(f)
    assert pkg.space.sides() == (2, 2, 1)
    assert pkg.transformed.sides() == (F(1, 2), F(1, 2), 1)
    assert pkg.violated_axiom == "strong_triangle"
    assert pkg.replay()
    with pytest.raises(NoWitnessError):
        witness_not_pseudoultrametric_preserving(make_fab(1, 3))


def test_pseudoultrametric_witness_bounded_decreasing_piece():
    # decreasing on (0, 4), constant 1 afterwards
    f = PiecewiseAffine([
        Piece(F(0), F(0), True, True, F(0), F(0)),
        Piece(F(0), F(4), False, False, F(-1, 2), F(3)),
        Piece(F(4), None, True, False, F(0), F(1)),
    ])
    pkg = witness_not_pseudoultrametric_preserving(f, witness=(1, 2))
    assert pkg.space.sides() == (2, 2, 1)
    assert pkg.transformed.sides() == (2, 2, F(5, 2))
    assert pkg.replay()
    # orientation is normalized
    assert witness_not_pseudoultrametric_preserving(f, witness=(2, 1)).space == pkg.space


def test_pseudoultrametric_witness_nonzero_at_zero():
    pkg = witness_not_pseudoultrametric_preserving(affine(1, 1))
    assert pkg.violated_axiom == "reflexive" and pkg.replay()


def test_semimetric_witness():
    pkg = witness_not_semimetric_preserving(affine(1, 1))
    assert pkg.violated_axiom == "reflexive"
    i = pkg.indices[0]
    assert pkg.transformed[i, i] == 1
    pkg = witness_not_semimetric_preserving(make_threshold(1))
    assert pkg.violated_axiom == "identity"
    x, y = pkg.indices
    assert x != y and pkg.transformed[x, y] == 0
    with pytest.raises(NoWitnessError):
        witness_not_semimetric_preserving(identity())


def test_ultrametric_metric_witness():
    f = step_function(0, [(1, 3), (None, 1)])
    pkg = witness_not_ultrametric_metric_preserving(f)
    assert classify_space(pkg.space).ultrametric
    assert sorted(pkg.space.sides()) == [1, 2, 2]
    assert sorted(pkg.transformed.sides()) == [1, 1, 3]
    assert pkg.violated_axiom == "triangle"
    i, j, k = pkg.indices
    assert pkg.transformed[i, j] > pkg.transformed[i, k] + pkg.transformed[k, j]
    assert pkg.replay()
    with pytest.raises(NoWitnessError):
        witness_not_ultrametric_metric_preserving(make_fab(1, 3))
    with pytest.raises(NoWitnessError):
        witness_not_ultrametric_metric_preserving(make_cap(2))


def test_ultrametric_preserving_dispatch():
    assert witness_not_ultrametric_preserving(make_threshold(1)).violated_axiom == "identity"
    f = step_function(0, [(1, 1), (None, F(1, 2))])
    assert witness_not_ultrametric_preserving(f).violated_axiom == "strong_triangle"
    with pytest.raises(NoWitnessError):
        witness_not_ultrametric_preserving(identity())


def test_witness_tamper_fails_replay():
    f = step_function(0, [(1, 3), (None, 1)])
    pkg = witness_not_ultrametric_metric_preserving(f)
    forged = replace(pkg, transformed=pkg.space)
    assert not forged.replay()


def test_dual_witness_examples():
    pkg = dual_witness(tri(3, 4, 5))
    assert (pkg.notes["a"], pkg.notes["b"]) == (4, 5)
    assert pkg.transformed.sides() == (2, 2, 5)
    assert pkg.replay()
    assert dual_witness(tri(1, 2, 2)) is None
    pkg = dual_witness(tri(F(3, 2), 1, F(5, 4)))
    assert (pkg.notes["a"], pkg.notes["b"]) == (F(5, 4), F(3, 2))
    with pytest.raises(PreconditionError):
        dual_witness(tri(1, 1, 3))


def test_probe_fab_examples():
    r = probe_fab(tri(3, 4, 5))
    assert not r.ultrametric and r.failing_pair == (4, 5)
    assert r.witness.replay()
    r = probe_fab(tri(1, 2, 2))
    assert r.ultrametric and r.pairs_checked > 0
    assert probe_fab(Dissimilarity([[0, 1], [1, 0]])).ultrametric


def test_snowflake_examples():
    assert probe_snowflake(tri(3, 4, 5), 2).metric is True
    r = probe_snowflake(tri(3, 4, 5), 3)
    assert r.metric is False and r.witness == (1, 2, 0)
    for alpha in (2, F(5, 2), 7):
        assert probe_snowflake(tri(1, 2, 2), alpha).metric is True
    with pytest.raises(InputError):
        probe_snowflake(tri(3, 4, 5), 1)


def test_snowflake_fractional_alpha():
    # 3^(3/2) + 4^(3/2) = 13.196..., 5^(3/2) = 11.18..., so still a metric
    assert probe_snowflake(tri(3, 4, 5), F(3, 2)).metric is True
    assert probe_snowflake(tri(3, 4, 5), F(5, 2)).metric is False


def test_snowflake_undecided_at_tiny_cap():
    # alpha = 2 + 10^-6 sits next to the exact tie at 2; 8 bits cannot separate it
    r = probe_snowflake(tri(3, 4, 5), F(2000001, 1000000), precision=8, max_precision=8)
    assert r.metric is None and r.undecided == ((1, 2, 0),)


def test_min_exponent_examples():
    tol = F(1, 2 ** 20)
    r = min_falsifying_exponent(tri(3, 4, 5), tol)
    assert abs(r.alpha - 2) <= tol
    r = min_falsifying_exponent(tri(1, 1, 2), tol)
    assert abs(r.alpha - 1) <= tol
    assert min_falsifying_exponent(tri(1, 2, 2)) is None


def test_min_exponent_brackets_behaviour():
    d = gen_metric(GenSpec(seed=11, n=6))
    r = min_falsifying_exponent(d, F(1, 2 ** 16))
    assert r is not None
    # above the bracket the snowflake fails; the critical triple still passes below it
    above = r.hi + F(1, 2 ** 10)
    assert probe_snowflake(d, above).metric is False
    x, y, z = r.triple
    crit = Dissimilarity.from_sides(d[x, y], d[x, z], d[y, z])
    below = r.lo - F(1, 2 ** 10)
    if below > 1:
        assert probe_snowflake(crit, below).metric is True


# --- soundness and completeness on generated inputs ---------------------------

def test_increasing_amenable_preserves_ultrametrics():
    for s in range(60):
        f = gen_function(GenSpec(seed=s), "increasing_amenable")
        d = gen_ultrametric(GenSpec(seed=1000 + s, n=1 + s % 12))
        assert oracles.classes(apply(f, d).entries)["ultrametric"]


def test_increasing_zero_at_zero_preserves_pseudoultrametrics():
    for s in range(60):
        f = gen_function(GenSpec(seed=s), "increasing_zero_at_zero")
        d = gen_pseudoultrametric(GenSpec(seed=2000 + s, n=2 + s % 10))
        assert oracles.classes(apply(f, d).entries)["pseudoultrametric"]


def test_amenable_doubling_yields_metrics():
    for s in range(60):
        f = gen_function(GenSpec(seed=s), "amenable_doubling")
        d = gen_ultrametric(GenSpec(seed=3000 + s, n=2 + s % 10))
        assert oracles.classes(apply(f, d).entries)["metric"]


@pytest.mark.parametrize(
    "cls,builder",
    [
        ("non_increasing", witness_not_pseudoultrametric_preserving),
        ("non_amenable", witness_not_semimetric_preserving),
        ("amenable_non_doubling", witness_not_ultrametric_metric_preserving),
    ],
)
def test_failing_functions_yield_replaying_witnesses(cls, builder):
    for s in range(40):
        pkg = builder(gen_function(GenSpec(seed=s), cls))
        assert pkg.replay()
        # independent confirmation from the definitional oracle
        cls_after = oracles.axioms(pkg.transformed.entries)
        assert not cls_after[pkg.violated_axiom]


def test_probe_fab_matches_classification_on_generated_metrics():
    rng = random.Random(5)
    for s in range(80):
        d = gen_metric(GenSpec(seed=rng.randrange(10 ** 6), n=2 + s % 8))
        assert probe_fab(d).ultrametric == classify_space(d).ultrametric
    for s in range(40):
        assert probe_fab(gen_ultrametric(GenSpec(seed=s, n=2 + s % 10))).ultrametric


def test_fab_pairs_restricted_to_a_below_b():
    # with b < a/4 the step function is not doubling and breaks even an ultrametric,
    # which is why the probe only ranges over a < b
    image = apply(make_fab(1, F(1, 8)), tri(1, 2, 2))
    assert image.sides() == (F(1, 2), F(1, 8), F(1, 8))
    assert not classify_space(image).metric
