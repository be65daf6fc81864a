from fractions import Fraction
from itertools import product as iproduct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from measuregame import bdd
from measuregame.adversaries import RandomI
from measuregame.fubini import fub1_transform, fub2_transform, fubini_check
from measuregame.game import referee
from measuregame.measure import Bernoulli, Explicit, Fair, Product
from measuregame.sets import Clopen
from measuregame.strategies import OpenCoverII, ShrinkingCoverII

ZERO = Fraction(0)
lopsided = Explicit(1, {"0": Fraction(1), "1": ZERO})
factors = st.sampled_from([Fair(), Bernoulli(Fraction(1, 3)), lopsided])
word = st.text(alphabet="01", max_size=3)


def fub1_run(P, w, eps, seed, depth=5):
    # covers of the point x = w w w ... on the first coordinate; measure tends to 0
    tau = ShrinkingCoverII(P, lambda k: bdd.cube((w * (k // len(w) + 1))[:k], lambda j: 2 * j),
                           f"x=({w})^inf", "G2")
    t = fub1_transform(tau, P, eps)
    tr = referee(RandomI(seed), t, ZERO, None, P.first, depth)
    return tr, t.runs[-1]


@settings(max_examples=15)
@given(st.sampled_from([Product(Fair(), Fair()), Product(Bernoulli(Fraction(1, 3)), Fair())]),
       st.text(alphabet="01", min_size=7, max_size=7),
       st.sampled_from([Fraction(1, 4), Fraction(1, 2)]), st.integers(0, 500))
def test_fub1_bounds_hold_each_round(P, w, eps, seed):
    tr, run = fub1_run(P, w, eps, seed)
    assert tr.violation is None
    assert len(run.history) == 5
    for ctx in run.history:
        assert run.check_context(ctx) == []
        assert ctx.q_sum() < eps * ctx.m
        assert run.dead_mass(ctx) < eps
        assert ctx.exact


def test_fub1_rejects_bad_eps():
    P = Product(Fair(), Fair())
    with pytest.raises(ValueError):
        fub1_transform(OpenCoverII(P, bdd.FALSE, variant="G2"), P, Fraction(1))
    with pytest.raises(ValueError):
        fub1_transform(OpenCoverII(P, bdd.FALSE, variant="G2"), Fair(), Fraction(1, 2))


@settings(max_examples=15)
@given(st.sampled_from(["0", "1"]), st.sampled_from(["0", "1", "00", "11"]),
       st.sampled_from([Fraction(1, 2), Fraction(2, 3)]), st.integers(0, 500))
def test_fub2_bounds_hold_each_round(u, v, eps, seed):
    P = Product(Fair(), Fair())
    cover = bdd.rectangle(u, v)
    if P.measure_of(cover) > 1 - eps:
        return
    tau = OpenCoverII(P, cover, 1 - eps, "G2")
    t = fub2_transform(tau, P, eps, eps / 2)
    assert t.beta == 1 - (1 - eps) / (1 - eps / 2)
    tr = referee(RandomI(seed), t, 1 - eps / 2, None, P.first, 5)
    run = t.runs[-1]
    assert tr.violation is None and len(run.history) == 5
    for ctx in run.history:
        assert run.check_context(ctx) == []
        assert ctx.q_sum() < (1 - run.beta) * ctx.m
        assert run.dead_mass(ctx) <= 1 - run.beta
    # the live second-coordinate tree is playable for I at stake 0
    last = run.history[-1]
    if last.live_nodes():
        assert run.section_strategy_I(last).player == "I"


def test_fub2_gamma_must_be_below_eps():
    P = Product(Fair(), Fair())
    tau = OpenCoverII(P, bdd.FALSE, Fraction(1, 2), "G2")
    with pytest.raises(ValueError):
        fub2_transform(tau, P, Fraction(1, 2), Fraction(1, 2))


# -- exact check ---------------------------------------------------------------

def brute_fubini(P, rects, d):
    """Oracle: measure and positive sections from explicit rectangle membership."""
    words = ["".join(w) for w in iproduct("01", repeat=d)]

    def inside(u, v):
        return any(u.startswith(a) and v.startswith(b) for a, b in rects)

    mx, my = P.first, P.second
    total = sum((mx.mass(u) * my.mass(v) for u in words for v in words if inside(u, v)), ZERO)
    xs = sum((mx.mass(u) for u in words
              if sum((my.mass(v) for v in words if inside(u, v)), ZERO) > 0), ZERO)
    ys = sum((my.mass(v) for v in words
              if sum((mx.mass(u) for u in words if inside(u, v)), ZERO) > 0), ZERO)
    return total, xs, ys


@given(factors, factors, st.lists(st.tuples(word, word), max_size=3))
def test_fubini_check_matches_rectangle_oracle(a, b, rects):
    P = Product(a, b)
    A = Clopen(bdd.disj_all(bdd.rectangle(u, v) for u, v in rects))
    r = fubini_check(P, A, 3)
    total, xs, ys = brute_fubini(P, rects, 3)
    assert (r.measure, r.x_mass, r.y_mass) == (total, xs, ys)
    assert r.ok


def test_fubini_examples():
    P = Product(Fair(), Fair())
    r = fubini_check(P, Clopen(bdd.rectangle("0", "1")), 1)
    assert r.measure == Fraction(1, 4) and r.x_positive == ["0"] and r.y_positive == ["1"]
    Q = Product(lopsided, Fair())
    r = fubini_check(Q, Clopen(bdd.rectangle("1", "")), 2)
    assert r.measure == 0 and r.x_positive == [] and r.y_positive == []
    assert r.conditions == (True, True, True)
    with pytest.raises(ValueError):
        fubini_check(P, Clopen(bdd.rectangle("000", "")), 2)
