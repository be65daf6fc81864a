from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from measuregame import bdd
from measuregame.adversaries import RandomI, adversary_suite
from measuregame.certify import IIWitness, IWitness, extract_scaled_measure, extract_tree
from measuregame.game import MoveI, MoveII, Position, referee, validate_move
from measuregame.measure import Bernoulli, Fair
from measuregame.minimax import grid_minimax
from measuregame.sets import Clopen, Complement
from measuregame.strategies import (OpenCoverII, ShrinkingCoverII, decide_by_measure,
                                    strategy_I_from_closed, strategy_II_from_open)
from measuregame.transforms import (approximants, check_real_move, intersect_strategies,
                                    rationalize_strategy, swap_strategy)

from strategies_h import clopen_nodes, measures, stake

mu = Fair()


def payoff(nodes):
    return Clopen(bdd.disj_all(bdd.cube(t) for t in nodes)) if nodes else Clopen.empty()


def never_loses(strategy, player, m, A, s, n=12, seed=0, d=7):
    opp = adversary_suite("II" if player == "I" else "I", m, A.clopen(), n, seed)
    bad = []
    for o in opp:
        pair = (strategy, o) if player == "I" else (o, strategy)
        tr = referee(pair[0], pair[1], s, A, m, d)
        lost = tr.outcome == ("II-decided" if player == "I" else "I-decided")
        if lost or (tr.violation and tr.violation["player"] == player):
            bad.append(tr.to_json())
    return bad


# -- deciding clopen games ---------------------------------------------------

@given(measures(), clopen_nodes, stake)
def test_winner_is_determined_by_complement_measure(m, nodes, s):
    A = payoff(nodes)
    dec = decide_by_measure(m, A, s)
    comp = m.measure_of(bdd.neg(A.clopen()))
    assert dec.measure_of_complement == comp
    assert dec.winner == ("I" if comp > s else "II")


@settings(max_examples=25)
@given(measures(), clopen_nodes, stake, st.integers(0, 1000))
def test_decided_strategy_beats_adversaries(m, nodes, s, seed):
    A = payoff(nodes)
    dec = decide_by_measure(m, A, s)
    assert never_loses(dec.strategy, dec.winner, m, A, s, seed=seed) == []


def test_decide_examples():
    assert decide_by_measure(mu, Clopen.of(["1"]), Fraction(1, 4)).winner == "I"
    assert decide_by_measure(mu, Clopen.of(["1"]), Fraction(1, 2)).winner == "II"
    b = Bernoulli(Fraction(1, 3))
    # complement of N_11 has mass 8/9
    assert decide_by_measure(b, Clopen.of(["11"]), Fraction(8, 9)).winner == "II"
    assert decide_by_measure(b, Clopen.of(["11"]), Fraction(7, 9)).winner == "I"


def test_constructors_reject_bad_inputs():
    with pytest.raises(ValueError):
        strategy_II_from_open(mu, Clopen.of(["1"]), Fraction(1, 4))
    with pytest.raises(ValueError):
        strategy_I_from_closed(mu, Clopen.of(["1"]), Fraction(1, 2))
    with pytest.raises(ValueError):
        strategy_I_from_closed(mu, Clopen.of(["1"]), Fraction(1, 4), eps=Fraction(1, 2))


def test_closed_set_values_sit_in_window():
    F = Clopen.of(["0", "11"])
    sigma = strategy_I_from_closed(mu, F, Fraction(1, 2))
    w = extract_scaled_measure(sigma, Fraction(1, 2), 4, mu)
    assert w.check() == []
    for t, v in w.table.items():
        f = mu.measure_of(F.clopen(), t)
        assert (v == 0) if f == 0 else ((1 - sigma.eps) * f < v < f)


# -- certificates ------------------------------------------------------------

@given(st.sampled_from(["00", "1", "011", "010"]), st.integers(1, 8))
def test_extract_tree_level_bound_and_avoidance(node, k):
    cover = bdd.cube(node)
    s = mu.measure_of(cover)
    eps = Fraction(k, 16) * (1 - s)
    tau = OpenCoverII(mu, cover, s)
    cert = extract_tree(tau, s, eps, 5, mu)
    assert cert.check(tau) == []
    for n in range(6):
        assert cert.level_sum(n) <= s + (1 - Fraction(1, 2 ** n)) * eps
    for u in cert.level_nodes(5):
        assert not u.startswith(node)


def test_extract_tree_records_exits():
    tau = OpenCoverII(mu, bdd.cube("1"), Fraction(1, 2))
    cert = extract_tree(tau, Fraction(1, 2), Fraction(1, 4), 3, mu)
    assert cert.exits.get("1") == Fraction(1, 2)
    assert set(cert.level_nodes(1)) == {"0"}


def test_certificates_round_trip_json():
    w = extract_scaled_measure(strategy_I_from_closed(mu, Clopen.of(["0"]), Fraction(1, 4)),
                               Fraction(1, 4), 3, mu)
    assert IWitness.from_json(w.to_json()).to_json() == w.to_json()
    t = extract_tree(OpenCoverII(mu, bdd.cube("11"), Fraction(1, 4)), Fraction(1, 4), Fraction(1, 8), 3, mu)
    assert IIWitness.from_json(t.to_json()).to_json() == t.to_json()


def test_tampered_witness_fails_check():
    w = extract_scaled_measure(strategy_I_from_closed(mu, Clopen.of(["0"]), Fraction(1, 4)),
                               Fraction(1, 4), 2, mu)
    w.table["00"] += Fraction(1, 64)
    assert w.check() != []


# -- transformations ---------------------------------------------------------

@settings(max_examples=20)
@given(clopen_nodes, stake)
def test_swap_I_to_II(nodes, s):
    A = payoff(nodes)
    dec = decide_by_measure(mu, A, s)
    if dec.winner != "I" or s == 0:
        return
    out = swap_strategy("I->II", dec.strategy, s, None, 6, mu)
    target = Complement(A)
    assert out.target_stake == 1 - s
    for seed in range(15):
        tr = referee(RandomI(seed), out.strategy, 1 - s, target, mu, 7)
        assert tr.outcome != "I-decided", tr.to_json()


@settings(max_examples=20)
@given(st.sampled_from(["00", "1", "011", "10"]), st.integers(1, 4))
def test_swap_II_to_I(node, k):
    cover = bdd.cube(node)
    m = mu.measure_of(cover)
    eps = Fraction(k, 8) * (1 - m)
    s = m + eps
    A = Clopen(bdd.neg(cover))
    tau = OpenCoverII(mu, cover, m)
    out = swap_strategy("II->I", tau, s, eps, 5, mu)
    target = Complement(A)
    assert never_loses(out.strategy, "I", mu, target, 1 - s, n=10) == []


def test_swap_rejects_bad_arguments():
    tau = OpenCoverII(mu, bdd.cube("1"), Fraction(1, 2))
    with pytest.raises(ValueError):
        swap_strategy("II->I", tau, Fraction(1, 2), None, 3, mu)
    with pytest.raises(ValueError):
        swap_strategy("sideways", tau, Fraction(1, 2), None, 3, mu)


def test_intersection_keeps_run_in_every_set():
    covers = [bdd.cube("11"), bdd.cube("011"), bdd.cube("1010")]
    pairs = [(mu.measure_of(c), OpenCoverII(mu, c, mu.measure_of(c))) for c in covers]
    eps = sum(e for e, _ in pairs) + Fraction(1, 16)
    out = intersect_strategies(pairs, eps, 5, mu)
    assert out.cover_measure < eps
    meet = Clopen(bdd.neg(bdd.disj_all(covers)))
    for seed in range(25):
        tr = referee(RandomI(seed), out.strategy, eps, meet, mu, 6)
        assert tr.outcome != "I-decided"


def test_intersection_needs_room():
    tau = OpenCoverII(mu, bdd.cube("1"), Fraction(1, 2))
    with pytest.raises(ValueError):
        intersect_strategies([(Fraction(1, 2), tau)], Fraction(1, 2), 3, mu)


def test_shrinking_cover_picks_first_small_cover():
    covers = lambda k: bdd.cube("1" * (k + 1))
    tau = ShrinkingCoverII(mu, covers, "ones")
    assert tau.cover_for(Fraction(1, 5)) == bdd.cube("111")
    assert tau.cover_for(Fraction(3, 4)) == bdd.cube("1")


@given(st.decimals(min_value=Decimal("0.26"), max_value=Decimal("0.49"), places=3),
       st.decimals(min_value=Decimal("0.01"), max_value=Decimal("0.49"), places=3),
       st.integers(1, 9))
def test_rationalized_shadow_is_legal_and_close(a, b, k):
    eps = Fraction(k, 10)
    s = Fraction(1, 8)
    pos = Position.start("G", s, mu)
    mv = MoveI((a, b))
    if check_real_move(pos, mv.masses) is not None or not Fraction(a + b) > s / (1 - eps):
        return
    tau = rationalize_strategy(OpenCoverII(mu, bdd.cube("11"), s), s, eps)
    real = pos.apply(mv)
    shadow = tau.paired_position(real)
    rat = shadow.moves[0]
    assert validate_move(pos, rat) is None
    for m_real, m in zip(mv.masses, rat.masses):
        m_real = Fraction(m_real)
        assert (1 - eps) * m_real < m < m_real
    assert isinstance(tau.move(real), MoveII)


def test_approximants_keep_zero():
    assert approximants([Decimal("0"), Decimal("0.5")], Fraction(1, 4))[0] == 0
    with pytest.raises(ValueError):
        rationalize_strategy(OpenCoverII(mu, bdd.FALSE), Fraction(0), Fraction(1))
    with pytest.raises(TypeError):
        check_real_move(Position.start("G", Fraction(0), mu), [True, Fraction(1, 4)])


# -- grid minimax ------------------------------------------------------------

@settings(max_examples=40)
@given(measures(explicit_depth=2), clopen_nodes.filter(lambda ns: all(len(t) <= 3 for t in ns)), stake)
def test_grid_minimax_agrees_with_measure_outside_band(m, nodes, s):
    A = payoff(nodes)
    Q = 16
    res = grid_minimax(m, A, s, Q, 3)
    if res.inconclusive:
        return
    assert res.winner == decide_by_measure(m, A, s).winner


def test_grid_minimax_examples():
    A = Clopen.of(["1"])
    assert grid_minimax(mu, A, Fraction(1, 4), 8, 2).winner == "I"
    assert grid_minimax(mu, A, Fraction(3, 4), 8, 2).winner == "II"
    assert grid_minimax(mu, Clopen.full(), Fraction(0), 8, 2).winner == "II"
    with pytest.raises(ValueError):
        grid_minimax(mu, A, Fraction(1, 4), 1, 2)
    with pytest.raises(ValueError):
        grid_minimax(mu, Clopen.of(["0001"]), Fraction(1, 4), 4, 2)
