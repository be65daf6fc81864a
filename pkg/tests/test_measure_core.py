import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from measuregame import bdd
from measuregame.measure import (Atoms, Bernoulli, Explicit, Fair, Point, Product, cylinder_mass,
                                 from_json, parse_shorthand)
from measuregame.rational import fmt, open_interval, q, simplest_between, split_many
from measuregame.scaled import (ScaledMeasure, nodes_to_depth, prune_antichain, prune_scaled_measure,
                                validate_scaled_measure)
from measuregame.sets import (IN, MIXED, OUT, Clopen, ClosedTree, Complement, LimSup, OpenUnion,
                              set_measure_bounds)
from measuregame.sets import from_json as set_from_json
from measuregame.suites import random_scaled

from strategies_h import clopen_nodes, measures

H = Fraction(1, 2)


def brute_simplest(lo, hi):
    """Oracle: scan denominators upward, then numerators."""
    den = 1
    while True:
        num = -(-lo.numerator * den // lo.denominator) - 1
        for n in range(num, num + den * int(hi - lo + 2) + 2):
            x = Fraction(n, den)
            if lo < x < hi:
                return x
        den += 1


# -- rationals --------------------------------------------------------------

def test_q_is_exact_and_refuses_floats():
    assert q("3/6") == Fraction(1, 2)
    assert q("0.125") == Fraction(1, 8)
    assert fmt(Fraction(2, 1)) == "2/1"
    with pytest.raises(TypeError):
        q(0.5)
    with pytest.raises(TypeError):
        q(True)


@given(st.fractions(min_value=0, max_value=3, max_denominator=50),
       st.fractions(min_value=0, max_value=3, max_denominator=50))
def test_simplest_between_matches_brute_force(a, b):
    lo, hi = min(a, b), max(a, b)
    if lo == hi:
        return
    assert simplest_between(lo, hi) == brute_simplest(lo, hi)


def test_simplest_between_examples():
    assert simplest_between(Fraction(1, 3), Fraction(1, 2)) == Fraction(2, 5)
    assert simplest_between(Fraction(0), Fraction(1)) == H
    assert simplest_between(Fraction(5, 2), None) == 3
    with pytest.raises(ValueError):
        simplest_between(H, H)


@given(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=32), min_size=2, max_size=4),
       st.data())
def test_split_many_lands_in_every_interval(caps, data):
    caps = [c for c in caps if c > 0]
    if len(caps) < 2:
        return
    parts = [open_interval(0, c) for c in caps]
    total = sum(caps) * data.draw(st.fractions(min_value=0, max_value=1, max_denominator=64)
                                  .filter(lambda x: 0 < x < 1))
    out = split_many(total, parts)
    assert sum(out) == total
    assert all(v in p for v, p in zip(out, parts))


# -- measures ---------------------------------------------------------------

def test_cylinder_mass_examples():
    assert cylinder_mass(Fair(), "01") == Fraction(1, 4)
    assert cylinder_mass(Bernoulli(Fraction(1, 3)), "11") == Fraction(1, 9)
    assert cylinder_mass(Atoms([(Fraction(1), Point("", "0"))]), "00") == 1
    assert cylinder_mass(Atoms([(Fraction(1), Point("", "0"))]), "01") == 0


@given(measures(), st.text(alphabet="01", max_size=12))
def test_measures_are_additive(mu, t):
    assert mu.mass("") == 1
    assert mu.mass(t) == mu.mass(t + "0") + mu.mass(t + "1")
    assert mu.mass(t) >= 0


def test_product_and_atoms_are_additive():
    P = Product(Bernoulli(Fraction(1, 3)), Fair())
    A = Atoms([(Fraction(1, 3), Point("1", "01")), (Fraction(2, 3), Point("", "0"))])
    for mu in (P, A):
        for t in nodes_to_depth(8):
            assert mu.mass(t) == mu.mass(t + "0") + mu.mass(t + "1")
    assert P.rect("1", "0") == Fraction(1, 3) * H
    assert P.mass("10") == Fraction(1, 6)  # x0 = 1, y0 = 0


def test_bernoulli_child_one_gets_p():
    mu = Bernoulli(Fraction(1, 5))
    assert mu.mass("1") == Fraction(1, 5)
    assert mu.mass("0") == Fraction(4, 5)


def test_measure_json_round_trip():
    for mu in (Fair(), Bernoulli(Fraction(2, 7)),
               Explicit(2, {"00": H, "01": Fraction(1, 4), "10": Fraction(1, 4), "11": 0}),
               Atoms([(Fraction(1), Point("1", "10"))]),
               Product(Fair(), Bernoulli(Fraction(1, 3)))):
        obj = mu.to_json()
        again = from_json(json.loads(json.dumps(obj)))
        assert again.to_json() == obj
        assert all(again.mass(t) == mu.mass(t) for t in nodes_to_depth(4))
    assert parse_shorthand("fair*bernoulli:1/3").to_json() == Product(Fair(), Bernoulli(Fraction(1, 3))).to_json()


def test_explicit_rejects_bad_tables():
    with pytest.raises(ValueError):
        Explicit(1, {"0": H, "1": Fraction(1, 4)})
    with pytest.raises(ValueError):
        Explicit(1, {"00": 1})


# -- sets -------------------------------------------------------------------

def test_set_measure_bounds_examples():
    mu = Fair()
    b = set_measure_bounds(mu, Clopen.of(["0"]), 1)
    assert (b.lower, b.upper) == (H, H)
    b = set_measure_bounds(mu, Complement(Clopen.of(["00"])), 2)
    assert (b.lower, b.upper) == (Fraction(3, 4), Fraction(3, 4))
    b = set_measure_bounds(mu, ClosedTree.no_substring("11"), 4)
    # Fibonacci count of admissible depth-4 nodes: 8 of 16
    assert b.upper == Fraction(8, 16)
    assert b.lower <= H


def fib_admissible(n):
    """Oracle: words of length n with no two adjacent ones, counted directly."""
    return sum(1 for i in range(2 ** n) if "11" not in format(i, f"0{n}b"))


@pytest.mark.parametrize("d", range(1, 9))
def test_no_substring_upper_bound_counts_words(d):
    b = set_measure_bounds(Fair(), ClosedTree.no_substring("11"), d)
    assert b.upper == Fraction(fib_admissible(d), 2 ** d)


@given(measures(), clopen_nodes)
def test_complement_duality(mu, nodes):
    A = Clopen(bdd.disj_all(bdd.cube(t) for t in nodes)) if nodes else Clopen.empty()
    m = set_measure_bounds(mu, A, 7)
    c = set_measure_bounds(mu, Complement(A), 7)
    assert m.lower == m.upper and c.lower == c.upper
    assert m.lower + c.lower == 1


@given(measures(), st.sampled_from(["11", "101", "00", "010"]), st.integers(0, 7))
def test_bounds_monotone_in_depth(mu, pattern, d):
    S = ClosedTree.no_substring(pattern)
    a = set_measure_bounds(mu, S, d)
    b = set_measure_bounds(mu, S, d + 1)
    assert a.lower <= b.lower <= b.upper <= a.upper


def test_classification_and_limsup_truncation():
    A = Clopen.of(["01"])
    assert A.classify("01") == IN and A.classify("1") == OUT and A.classify("0") == MIXED
    L = LimSup([bdd.cube("1", lambda i: i + k) for k in range(4)], horizon=3)
    assert L.truncated
    assert set_measure_bounds(Fair(), L, 6).truncated
    U = OpenUnion(["1", "01"])
    assert U.classify("011") == IN


def test_set_json_round_trip():
    for S in (Clopen.of(["0", "11"]), Complement(Clopen.of(["1"])), ClosedTree.no_substring("11"),
              OpenUnion(["1"])):
        obj = json.loads(json.dumps(S.to_json()))
        assert set_from_json(obj).to_json() == S.to_json()


def test_clopen_rejects_comparable_nodes():
    with pytest.raises(ValueError):
        Clopen.of(["0", "01"])


# -- scaled measures --------------------------------------------------------

def test_measure_is_a_scaled_measure_of_itself():
    mu = Fair()
    assert validate_scaled_measure(ScaledMeasure(mu, mu.mass), mu, 5).ok


def test_validity_report_names_violations():
    mu = Fair()
    bad_add = ScaledMeasure.from_table(mu, {"": Fraction(1), "0": Fraction(1), "1": Fraction(1)})
    rep = validate_scaled_measure(bad_add, mu, 1)
    assert rep.violations["additivity"]["node"] == ""
    dom = ScaledMeasure.from_table(mu, {"": Fraction(3, 4), "0": Fraction(3, 4), "1": Fraction(0)})
    rep = validate_scaled_measure(dom, mu, 1)
    assert rep.violations["domination"]["node"] == "0"


def test_prune_examples():
    mu = Fair()
    M = ScaledMeasure(mu, mu.mass)
    P = prune_scaled_measure(M, mu, H, 4)
    assert all(P(t) == M(t) for t in nodes_to_depth(4))
    half_on_zero = ScaledMeasure.from_table(mu, {"": H, "0": H, "1": Fraction(0)})
    assert prune_antichain(half_on_zero, mu, Fraction(1, 4), 1) == ["1"]
    P = prune_scaled_measure(half_on_zero, mu, Fraction(1, 4), 1)
    assert P.root == H


def test_prune_rejects_large_eps():
    mu = Fair()
    with pytest.raises(ValueError):
        prune_scaled_measure(ScaledMeasure.scaled(mu, H), mu, H, 3)


@given(measures(), st.integers(1, 6), st.integers(1, 7), st.randoms(use_true_random=False))
def test_prune_invariants(mu, d, k, rng):
    M = random_scaled(rng, mu, d)
    eps = M.root * Fraction(k, 8)
    P = prune_scaled_measure(M, mu, eps, d)
    assert P.root > M.root - eps
    assert validate_scaled_measure(P, mu, d).ok
    for t in nodes_to_depth(d):
        if P(t) > 0:
            assert M(t) >= eps * mu.mass(t)
