"""Backward induction on a finite grid of moves: an independent check of who wins.

Player I is restricted to totals j/Q at the root and to splits (a m / Q,
(Q - a) m / Q) below it.  A grid win for I is a genuine winning strategy;
a grid win for II only says that the grid strategies all fail, which can
happen near the threshold.  Results within 2/Q of the threshold are
flagged as resolution-limited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import bdd
from .measure import DyadicMeasure
from .rational import fmt, q
from .sets import IN, OUT, SetExpr

ZERO = Fraction(0)


@dataclass(frozen=True)
class GridResult:
    winner: str
    root_total: Optional[Fraction]  # I's first-move total on the grid, when I wins
    complement_measure: Fraction
    inconclusive: bool
    states: int

    def to_json(self) -> dict:
        return {
            "winner": self.winner,
            "root_total": None if self.root_total is None else fmt(self.root_total),
            "complement_measure": fmt(self.complement_measure),
            "resolution_limited": self.inconclusive,
            "states": self.states,
        }


def grid_minimax(mu: DyadicMeasure, A: SetExpr, s: Fraction, Q: int, d: int) -> GridResult:
    s = q(s)
    if Q < 2:
        raise ValueError("Q must be at least 2")
    f = A.clopen()
    if f is None:
        raise ValueError("grid minimax needs a finitely decided payoff")
    depth = A.decided_depth() or 0
    if depth > d:
        raise ValueError(f"payoff is decided at depth {depth} > {d}")
    memo: dict[tuple[str, Fraction], bool] = {}

    def i_wins(node: str, mass: Fraction) -> bool:
        c = A.classify(node)
        if c == IN:
            return False
        if c == OUT:
            return True
        key = (node, mass)
        hit = memo.get(key)
        if hit is not None:
            return hit
        caps = (mu.mass(node + "0"), mu.mass(node + "1"))
        result = False
        for a in range(Q + 1):
            m0 = mass * a / Q
            m1 = mass - m0
            if not _legal(m0, caps[0]) or not _legal(m1, caps[1]):
                continue
            if (m0 == 0 or i_wins(node + "0", m0)) and (m1 == 0 or i_wins(node + "1", m1)):
                result = True
                break
        memo[key] = result
        return result

    comp = mu.measure_of(bdd.neg(f))
    inconclusive = abs(comp - s) <= Fraction(2, Q)
    c = A.classify("")
    if c == IN:
        return GridResult("II", None, comp, inconclusive, 0)
    # smaller totals are never worse for I, so the least grid total above s decides
    j = math.floor(s * Q) + 1
    total = Fraction(j, Q)
    winner, used = "II", None
    if j < Q:
        caps = (mu.mass("0"), mu.mass("1"))
        for a in range(Q + 1):
            m0 = total * a / Q
            m1 = total - m0
            if not _legal(m0, caps[0]) or not _legal(m1, caps[1]):
                continue
            if (m0 == 0 or i_wins("0", m0)) and (m1 == 0 or i_wins("1", m1)):
                winner, used = "I", total
                break
    return GridResult(winner, used, comp, inconclusive, len(memo))


def _legal(m: Fraction, cap: Fraction) -> bool:
    return 0 <= m <= cap and not (cap > 0 and m == cap)
