"""Strategies built from measure data, and the measure-based decision procedure."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import bdd
from .bdd import Node
from .game import MoveI, Position, Resign, Strategy, ThresholdII
from .measure import DyadicMeasure
from .rational import Interval, fmt, open_interval, q, split_many
from .sets import ClosedTree, SetExpr, antichain_of

ZERO = Fraction(0)


def exact_clopen(S: SetExpr, what: str) -> Node:
    f = S.clopen()
    if f is None:
        raise ValueError(f"{what} must be finitely decided to compute exact conditional masses")
    return f


class OpenCoverII(ThresholdII):
    """Player II avoiding the open set U.

    Picks the first side whose assigned mass exceeds the measure of U on that
    side.  While mu(U & N_u) < m_u holds at the current node such a side
    exists, and the run never enters U.
    """

    name = "open-cover"

    def __init__(self, mu: DyadicMeasure, cover: Node, stake: Optional[Fraction] = None,
                 variant: str = "G"):
        self.mu = mu
        self.cover = cover
        self.stake = stake
        self.variant = variant

    def thresholds(self, pos: Position) -> list[Fraction]:
        return [self.mu.measure_of(self.cover, pos.child(j)) for j in range(pos.arity)]

    @property
    def params(self) -> dict:
        out = {"cover": antichain_of(self.cover), "variant": self.variant}
        if self.stake is not None:
            out["stake"] = fmt(self.stake)
        return out


def strategy_II_from_open(mu: DyadicMeasure, U: SetExpr, s: Fraction, variant: str = "G") -> OpenCoverII:
    s = q(s)
    cover = exact_clopen(U, "the open cover")
    measure = mu.measure_of(cover)
    if measure > s:
        raise ValueError(f"cover measure {measure} exceeds the stake {s}")
    return OpenCoverII(mu, cover, s, variant)


class ShrinkingCoverII(ThresholdII):
    """Player II avoiding a null set through covers that shrink on demand.

    ``covers(k)`` is an open neighbourhood of the null set whose measure
    tends to 0.  Once I's first move totals r, the least k with
    mu(covers(k)) < r is fixed and the run avoids that cover.
    """

    name = "shrinking-cover"

    def __init__(self, mu: DyadicMeasure, covers, label: str = "custom", variant: str = "G",
                 max_k: int = 4096):
        self.mu = mu
        self.covers = covers
        self.label = label
        self.variant = variant
        self.max_k = max_k
        self._chosen: dict[Fraction, Node] = {}

    def cover_for(self, r: Fraction) -> Node:
        hit = self._chosen.get(r)
        if hit is None:
            for k in range(self.max_k):
                f = self.covers(k)
                if self.mu.measure_of(f) < r:
                    hit = f
                    break
            else:
                raise ValueError(f"no cover below {r} up to index {self.max_k}")
            self._chosen[r] = hit
        return hit

    def thresholds_at(self, pos: Position, r: Fraction) -> list[Fraction]:
        total = r if pos.round == 0 else sum(pos.moves[0].masses, ZERO)
        cover = self.cover_for(total)
        return [self.mu.measure_of(cover, pos.child(j)) for j in range(pos.arity)]

    def thresholds(self, pos: Position) -> list[Fraction]:
        return self.thresholds_at(pos, sum(pos.moves[0].masses, ZERO))

    @property
    def params(self) -> dict:
        return {"covers": self.label, "variant": self.variant}


class ClosedSetI(Strategy):
    """Player I playing a scaled measure squeezed under mu restricted to F.

    Every assigned value lies in ((1 - eps) f, f) where f is the measure of F
    on that node, and is 0 where f = 0.  Values are the simplest rationals
    available, so the strategy is a pure function of the position.
    """

    player = "I"
    name = "closed-set"

    def __init__(self, mu: DyadicMeasure, closed: Node, stake: Fraction, eps: Fraction,
                 variant: str = "G"):
        self.mu = mu
        self.closed = closed
        self.stake = stake
        self.eps = eps
        self.variant = variant

    def _window(self, f: Fraction) -> Interval:
        if f == 0:
            return Interval(ZERO, ZERO)
        return open_interval((1 - self.eps) * f, f)

    def move(self, pos: Position):
        fs = [self.mu.measure_of(self.closed, pos.child(j)) for j in range(pos.arity)]
        windows = [self._window(f) for f in fs]
        if pos.round == 0:
            return MoveI(tuple(w.pick() for w in windows))
        try:
            return MoveI(split_many(pos.mass, windows))
        except ValueError:
            return Resign("I", f"mass {fmt(pos.mass)} is outside the closed-set window")

    @property
    def params(self) -> dict:
        return {
            "closed": antichain_of(self.closed),
            "stake": fmt(self.stake),
            "eps": fmt(self.eps),
            "variant": self.variant,
        }


def default_eps(mass: Fraction, s: Fraction) -> Fraction:
    """Half of the largest eps with (1 - eps) * mass > s."""
    return (1 - s / mass) / 2


def strategy_I_from_closed(mu: DyadicMeasure, F: SetExpr, s: Fraction,
                           eps: Optional[Fraction] = None, variant: str = "G") -> ClosedSetI:
    s = q(s)
    node = exact_clopen(F, "the closed set")
    mass = mu.measure_of(node)
    if not mass > s:
        raise ValueError(f"closed set measure {mass} is not above the stake {s}")
    eps = default_eps(mass, s) if eps is None else q(eps)
    if not (0 < eps < 1 and (1 - eps) * mass > s):
        raise ValueError(f"eps {eps} leaves (1 - eps) * {mass} <= {s}")
    return ClosedSetI(mu, node, s, eps, variant)


@dataclass
class Decision:
    winner: str
    strategy: Strategy
    measure_of_complement: Fraction
    stake: Fraction
    payoff: SetExpr
    mu: DyadicMeasure

    def certificate(self, d: Optional[int] = None):
        from .certify import extract_scaled_measure, extract_tree

        depth = d if d is not None else max(1, self.payoff.decided_depth() or 1)
        if self.winner == "I":
            return extract_scaled_measure(self.strategy, self.stake, depth, self.mu)
        eps = (1 - self.stake) / 2
        return extract_tree(self.strategy, self.stake, eps, depth, self.mu)

    def to_json(self) -> dict:
        return {
            "winner": self.winner,
            "stake": fmt(self.stake),
            "complement_measure": fmt(self.measure_of_complement),
            "strategy": self.strategy.to_json(),
        }


def decide_by_measure(mu: DyadicMeasure, A: SetExpr, s: Fraction) -> Decision:
    """Winner of G(s, A) for clopen A, with a winning strategy."""
    s = q(s)
    a = exact_clopen(A, "the payoff")
    comp = bdd.neg(a)
    value = mu.measure_of(comp)
    if value > s:
        F = ClosedTree.of_clopen(comp)
        return Decision("I", strategy_I_from_closed(mu, F, s), value, s, A, mu)
    return Decision("II", OpenCoverII(mu, comp, s), value, s, A, mu)
