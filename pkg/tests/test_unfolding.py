from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from measuregame import bdd
from measuregame.adversaries import RandomI, adversary_suite
from measuregame.game import MoveII, Position, referee
from measuregame.measure import Fair
from measuregame.rational import simplest_between
from measuregame.sets import Clopen, ClosedTree
from measuregame.strategies import OpenCoverII, strategy_I_from_closed
from measuregame.unfolding import (ConstantDigitII, CopyFirstII, Line, PairTree, ScaledPlayI,
                                   StabilizeError, UnfoldError, check_unfold_positions,
                                   frontier_mass, project_strategy_II, replay_issues,
                                   reveal_enumeration, stabilize, unfold_strategy_I, uniformize)

mu = Fair()
D = 8


# -- enumeration and pair trees ------------------------------------------------

@given(st.integers(1, 3), st.integers(1, 4))
def test_reveal_enumeration_lists_prefixes_first(k, n):
    seq = reveal_enumeration(k, n)
    assert len(seq) == sum(k ** i for i in range(1, n + 1))
    assert len(set(seq)) == len(seq)
    index = {t: i for i, t in enumerate(seq)}
    for t in seq:
        if len(t) > 1:
            assert index[t[:-1]] < index[t]
    assert seq == sorted(seq, key=lambda t: (len(t), t))


@given(st.text(alphabet="01", max_size=5), st.lists(st.integers(0, 2), max_size=5))
def test_pair_trees_are_closed_under_shortening(u, v):
    v = tuple(v)
    trees = [PairTree.first_digit_equal(3), PairTree.full(3),
             PairTree.cylinder_product(Clopen.of(["01", "1"]), 3)]
    for R in trees:
        if R.compatible(u, v):
            assert R.compatible(u[:-1], v) and R.compatible(u, v[:-1])
    assert not PairTree.empty(3).compatible(u, v)


def test_pair_tree_examples():
    R = PairTree.first_digit_equal()
    assert R.compatible("0", (0,)) and not R.compatible("0", (1,))
    assert R.compatible("", (1,)) and R.compatible("1", ())
    P = PairTree.from_pairs([("0", (1,)), ("", ())], 2, 1)
    assert P.compatible("01", (1, 0)) and not P.compatible("1", (1,))
    assert P.to_json()["name"] == "pairs"


# -- projection ----------------------------------------------------------------

def test_projected_strategy_drops_digits_and_avoids_cover():
    cover = bdd.cube("11")
    tau = CopyFirstII(OpenCoverII(mu, cover, Fraction(1, 4), variant="unfolded"))
    proj = project_strategy_II(tau, 2)
    for seed in range(20):
        tr = referee(RandomI(seed), proj, Fraction(1, 4), Clopen(bdd.neg(cover)), mu, 5)
        assert tr.outcome != "I-decided"
        assert all(m.y is None for m in tr.moves if isinstance(m, MoveII))


def test_projected_shadow_carries_inner_digits():
    tau = CopyFirstII(OpenCoverII(mu, bdd.FALSE, variant="unfolded"))
    proj = project_strategy_II(tau, 2)
    tr = referee(RandomI(5), proj, Fraction(0), None, mu, 3)
    pos = Position.start("G", Fraction(0), mu)
    for mv in tr.moves:
        pos = pos.apply(mv)
    shadow = proj.shadow(pos)
    assert shadow.variant == "unfolded"
    assert shadow.node == pos.node
    assert shadow.y_prefix == (int(pos.node[0]),)


# -- lines and stabilization ---------------------------------------------------

def start(c):
    return Position.start("unfolded", c / 2, mu, 2)


def test_line_follows_scaled_play():
    c = Fraction(1, 4)
    line = Line(ScaledPlayI(c), start(c))
    for v in ("0", "01", "110", "0101"):
        assert line.mass(v) == c * mu.mass(v)
    assert line.root_mass() == c


def test_line_reveal_triggers_kill():
    c = Fraction(1, 4)
    line = Line(ScaledPlayI(c, kill=0, kill_side=0), start(c), reveal="1", digit=0)
    assert line.mass("1") == Fraction(1, 8)
    assert line.mass("10") == 0 and line.mass("11") == Fraction(1, 8)
    _, pos = line.at("1")
    assert pos.y_prefix == (0,)
    _, pos0 = line.at("0")
    with pytest.raises(ValueError):
        Line(line.sigma, pos0).at("1")


@pytest.mark.parametrize("kill,kill_side", [(0, 0), (0, 1), (1, 0), (1, 1)])
def test_stabilize_halves_the_remainder_each_iteration(kill, kill_side):
    c = Fraction(1, 4)
    sigma = ScaledPlayI(c, kill, kill_side)
    p = start(c)
    S = Line(sigma, p).support_leaves("", D)
    res = stabilize(sigma, p, S, c / 2, Fraction(1, 10), kill, D)
    # oracle: revealing the kill digit loses half of what is left
    assert res.masses == [1 - Fraction(1, 2 ** (i + 1)) for i in range(res.iterations)]
    assert res.masses[-1] > Fraction(9, 10)
    assert res.disjoint()
    for u, pos in res.positions.items():
        assert pos.y_prefix == (kill,)
        assert replay_issues(sigma, pos) == []


def test_stabilize_is_immediate_when_digit_is_harmless():
    c = Fraction(1, 4)
    sigma = ScaledPlayI(c, kill=0)
    p = start(c)
    S = Line(sigma, p).support_leaves("", D)
    res = stabilize(sigma, p, S, c / 2, Fraction(1, 3), 1, D)
    assert res.iterations == 1 and res.masses == [1]
    assert frontier_mass(mu, res.leaves) == res.frontier_S


@settings(max_examples=20)
@given(st.sampled_from([Fraction(1, 8), Fraction(1, 4), Fraction(3, 8)]), st.integers(0, 1),
       st.integers(0, 1), st.sampled_from([Fraction(1, 10), Fraction(1, 3), Fraction(1, 2)]),
       st.integers(0, 1))
def test_stabilize_invariants(c, kill, kill_side, beta, digit):
    sigma = ScaledPlayI(c, kill, kill_side)
    p = start(c)
    S = Line(sigma, p).support_leaves("", 6)
    res = stabilize(sigma, p, S, c / 2, beta, digit, 6)
    assert frontier_mass(mu, res.leaves) > (1 - beta) * res.frontier_S
    assert res.disjoint()
    assert set(res.leaves) <= set(S)
    assert set(res.reveal.values()) == set(res.positions)


def test_stabilize_rejects_bad_inputs():
    c = Fraction(1, 4)
    sigma = ScaledPlayI(c)
    p = start(c)
    S = Line(sigma, p).support_leaves("", 4)
    with pytest.raises(ValueError):
        stabilize(sigma, p, S, c / 2, Fraction(1), 0, 4)
    with pytest.raises(ValueError):
        stabilize(sigma, p, S, c, Fraction(1, 2), 0, 4)  # floor c * mu is not strictly below
    with pytest.raises(ValueError):
        stabilize(sigma, p, ["00"], c / 2, Fraction(1, 2), 0, 4)


def test_scaled_play_guards_its_parameters():
    with pytest.raises(ValueError):
        ScaledPlayI(Fraction(3, 4), kill=0)
    with pytest.raises(ValueError):
        ScaledPlayI(Fraction(1))


def test_stabilize_error_carries_a_dump():
    err = StabilizeError("boom", {"node": "0"})
    assert err.dump == {"node": "0"} and str(err) == "boom"


# -- unfolding pipeline -------------------------------------------------------

@pytest.fixture(scope="module")
def unfolded():
    s = Fraction(1, 2)
    A = Clopen.of(["11"])
    sigma = strategy_I_from_closed(mu, ClosedTree.of_clopen(bdd.neg(A.clopen())), s, variant="unfolded")
    return s, A, sigma, unfold_strategy_I(sigma, s, mu, 2, 4)


def test_unfold_keeps_every_level_above_target(unfolded):
    s, _, sigma, res = unfolded
    eps = sigma.eps
    root = sum(simplest_between((1 - eps) * f, f) for f in (Fraction(1, 2), Fraction(1, 4)))
    assert res.delta == root - s
    assert res.target == s + res.delta / 2
    assert res.levels_ok() == []
    assert all(not w.startswith("11") for w in res.leaves)
    assert res.depth == 6
    assert len(res.steps) == 1 + 6  # the prune plus 2 + 4 reveal strings


def test_unfold_positions_replay(unfolded):
    _, _, sigma, res = unfolded
    assert check_unfold_positions(res, sigma) == []


def test_unfolded_strategy_wins(unfolded):
    s, A, _, res = unfolded
    for opp in adversary_suite("II", mu, A.clopen(), 15):
        tr = referee(res.strategy, opp, s, A, mu, 6)
        assert tr.winner == "I", tr.to_json()
    assert res.to_json()["format"] == "measuregame.unfold/1"


def test_unfold_rejects_a_losing_first_move():
    sigma = ScaledPlayI(Fraction(1, 4))
    with pytest.raises(UnfoldError):
        unfold_strategy_I(sigma, Fraction(1, 4), mu, 2, 3)


# -- uniformization ------------------------------------------------------------

def test_uniformize_copy_first_digit():
    R = PairTree.first_digit_equal()
    tau = CopyFirstII(OpenCoverII(mu, bdd.FALSE, variant="unfolded"))
    u = uniformize(tau, R, Fraction(1, 4), 5, mu)
    assert u.monotone() == [] and u.incompatible() == []
    assert u.complement_mass() <= Fraction(1, 4)
    assert any(len(n) == 5 for n in u.table)
    for node, y in u.table.items():
        if node:
            assert y == (int(node[0]),)
    assert u.to_json()["format"] == "measuregame.uniformization/1"


def test_uniformize_flags_incompatible_digits():
    R = PairTree.first_digit_equal()
    tau = ConstantDigitII(OpenCoverII(mu, bdd.FALSE, variant="unfolded"), 1)
    u = uniformize(tau, R, Fraction(1, 4), 3, mu)
    bad = u.incompatible()
    assert bad and all(n.startswith("0") for n in bad)
