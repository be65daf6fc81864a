from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from measuregame import bdd
from measuregame.adversaries import RandomI
from measuregame.borel_cantelli import (EventFamily, bc_convergence_strategy, bc_divergence_blocks,
                                        bc_divergence_strategy, check_mutual_independence,
                                        choose_side, delta_for_eta, liminf_surrogate,
                                        min_index_bound, rl_strategy, window_sums)
from measuregame.game import referee
from measuregame.measure import Bernoulli, Fair
from measuregame.strategies import OpenCoverII
from measuregame.suites import rl_ratio_oracle

mu = Fair()
pos_frac = st.fractions(min_value=Fraction(1, 64), max_value=4, max_denominator=64)


def test_coordinate_events_are_independent():
    fam = EventFamily.coordinate(Bernoulli(Fraction(1, 3)))
    assert check_mutual_independence(fam, range(5)).ok


def test_nested_events_are_not_independent():
    fam = EventFamily.from_list(mu, [bdd.cube("1"), bdd.cube("11")])
    rep = check_mutual_independence(fam, [0, 1])
    assert not rep.ok
    assert rep.joint == Fraction(1, 4) and rep.product == Fraction(1, 8)
    with pytest.raises(IndexError):
        fam.event(2)


def test_min_index_bound_examples():
    assert min_index_bound([1, 1], [1, 2], [Fraction(1, 2), Fraction(1, 2)]) == (1, Fraction(1, 8))
    # ties go to the first index
    assert min_index_bound([1, 1], [1, 1], [Fraction(1, 2), Fraction(1, 2)])[0] == 0
    with pytest.raises(ValueError):
        min_index_bound([1], [0], [1])
    with pytest.raises(ValueError):
        min_index_bound([1], [1], [Fraction(1, 2)])


@given(st.lists(st.tuples(pos_frac, pos_frac, st.integers(1, 9)), min_size=1, max_size=6))
def test_min_index_bound_is_below_cauchy_schwarz_ratio(rows):
    a = [r[0] for r in rows]
    b = [r[1] for r in rows]
    w = [r[2] for r in rows]
    c = [Fraction(x, sum(w)) for x in w]
    i, v = min_index_bound(a, b, c)
    assert v == a[i] * c[i] / b[i] ** 2
    assert all(v <= a[j] * c[j] / b[j] ** 2 for j in range(len(a)))
    assert v <= sum(a) / sum(b) ** 2


def test_delta_for_eta_example():
    assert delta_for_eta(Fraction(1), Fraction(1, 2)) == Fraction(1, 8)


def holds(delta, D, eta):
    gap = eta - delta
    return gap > 0 and gap * gap > delta * D


@given(st.fractions(min_value=0, max_value=8, max_denominator=16),
       st.fractions(min_value=Fraction(1, 16), max_value=2, max_denominator=16))
def test_delta_for_eta_is_largest_power(D, eta):
    d = delta_for_eta(D, eta)
    assert d.numerator == 1 and d.denominator & (d.denominator - 1) == 0
    assert holds(d, D, eta)
    if d < Fraction(1, 2):
        assert not holds(2 * d, D, eta)


def brute_sums(fam, K, L, H):
    """Oracle: integrate every pair directly."""
    a, b = [], []
    for n in range(L, L + H + 1):
        idx = range(L, n + 1)
        a.append(sum(fam.mu.measure_of(bdd.conj_all((fam.event(i), fam.event(j), K)))
                      for i in idx for j in idx))
        b.append(sum(fam.mu.measure_of(bdd.conj(fam.event(i), K)) for i in idx))
    return a, b


@settings(max_examples=30)
@given(st.sampled_from([Fair(), Bernoulli(Fraction(1, 3))]), st.integers(0, 1),
       st.integers(0, 3), st.integers(0, 3), st.text(alphabet="01", max_size=4))
def test_window_sums_match_pair_integration(m, bit, offset, L, t):
    fam = EventFamily.coordinate(m, offset=offset, bit=bit)
    K = bdd.cube(t)
    sums = window_sums(fam, K, L, 6)
    a, b = brute_sums(fam, K, L, 6)
    assert list(sums.a) == a and list(sums.b) == b


@pytest.mark.parametrize("H", [0, 1, 7, 16, 64])
def test_liminf_surrogate_matches_closed_form(H):
    val = liminf_surrogate(EventFamily.coordinate(mu), H)
    assert val == rl_ratio_oracle(H)
    assert 1 <= val


def test_liminf_at_default_horizon():
    assert liminf_surrogate(EventFamily.coordinate(mu), 64) == Fraction(66, 65)


def test_choose_side_ties_go_to_zero():
    fam = EventFamily.coordinate(mu, offset=1)
    c = choose_side(fam, bdd.TRUE, "", 0, 8, [Fraction(1, 4), Fraction(1, 4)])
    assert c.side == 0 and not c.switched and c.votes[1] == 0


def test_choose_side_follows_the_event():
    fam = EventFamily.coordinate(mu)
    c = choose_side(fam, bdd.TRUE, "", 0, 8, [Fraction(1, 4), Fraction(1, 4)])
    assert c.side == 1 and all(v.ok for v in c.values)


def test_block_schedule_constant_probability():
    sched = bc_divergence_blocks(lambda i: Fraction(1, 2), lambda k: Fraction(1, 2 ** (k + 3)), 3)
    # 2^-4 < 1/8, 2^-5 < 1/16, 2^-6 < 1/32
    assert sched.blocks == [(0, 3), (4, 8), (9, 14)]
    assert sched.products == [Fraction(1, 16), Fraction(1, 32), Fraction(1, 64)]
    assert not sched.partial


def test_block_schedule_reports_partial():
    sched = bc_divergence_blocks(lambda i: Fraction(0), lambda k: Fraction(1, 2), 2, horizon=50)
    assert sched.partial and sched.blocks == []


def test_divergence_strategy_hits_every_completed_block():
    fam = EventFamily.coordinate(mu, bit=0)
    res = bc_divergence_strategy(fam, lambda i: Fraction(1, 2), Fraction(1, 4), 8)
    assert res.certificate.check() == []
    assert res.certificate.root > Fraction(3, 4)
    assert res.hits_every_block(fam) == []
    assert res.completed


def test_divergence_strategy_needs_a_block():
    fam = EventFamily.coordinate(mu, bit=0)
    with pytest.raises(ValueError):
        bc_divergence_strategy(fam, lambda i: Fraction(1, 2), Fraction(1, 64), 3)


def test_convergence_strategy_avoids_tail_events():
    covers = [bdd.cube("1" * (i + 1)) for i in range(10)]
    inputs = [(Fraction(1, 2 ** (i + 1)), OpenCoverII(mu, c, Fraction(1, 2 ** (i + 1))))
              for i, c in enumerate(covers)]
    tau = bc_convergence_strategy(mu, inputs, lambda n: Fraction(1, 2 ** n), 8)
    for seed in range(20):
        tr = referee(RandomI(seed), tau, Fraction(0), None, mu, 8)
        first = sum(tr.moves[0].masses)
        n = tau.cutoff(first)
        assert Fraction(1, 2 ** n) < first
        assert not tr.final_node.startswith("1" * (n + 1))
    with pytest.raises(ValueError):
        bc_convergence_strategy(mu, inputs, None, 8)


def test_rl_strategy_keeps_stand_ins():
    fam = EventFamily.coordinate(mu)
    tau = rl_strategy(fam, Fraction(1), 32)
    for seed in range(6):
        tr = referee(RandomI(seed, grid_totals=True), tau, Fraction(0), None, mu, 8)
        assert tr.violation is None
        run = tau.runs[-1]
        st_ = run.last_state
        assert len(st_.rounds) == 8
        for rec in st_.rounds:
            assert rec["before"]["ok"]
            assert rec["choice"]["values"][rec["side"]]["ok"]
        assert all(run.block_hits(st_))
        assert st_.cuts == sorted(st_.cuts) and len(set(st_.cuts)) == len(st_.cuts)


def test_rl_oracle_values():
    assert rl_ratio_oracle(0) == 2
    assert rl_ratio_oracle(1) == Fraction(3, 2)
    N = 65
    assert rl_ratio_oracle(64) == 1 + Fraction(1, N)


def test_finite_window_floor_can_run_out():
    # the window sum over 65 events is about 32.5 mu(K & N_t); pending blocks shrink K
    fam = EventFamily.coordinate(mu)
    tau = rl_strategy(fam, Fraction(1), 64)
    tr = referee(RandomI(80, grid_totals=True), tau, Fraction(0), None, mu, 20)
    assert tr.violation["rule"] == "resigned" and tr.violation["round"] == 11
    dump = tau.runs[-1].last_failure
    side0 = dump["values"][0]
    assert side0["inha"] == "9780925/92012544"
    assert side0["inhb"] == "15795/67108864" and side0["inhb_floor"] == "1/4096"
    st_ = tau.runs[-1].last_state
    K = bdd.conj(st_.K, bdd.cube(st_.node + "0"))
    assert mu.measure_of(K) / mu.mass(st_.node + "0") == Fraction(243, 8192)
