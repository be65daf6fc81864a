"""Opponents used to stress constructed strategies.

Random opponents draw from a generator seeded by the run seed and the
position, so they are stateless and a replay reproduces every choice.
Greedy opponents lean toward the payoff (for II) or away from it (for I).
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from . import bdd
from .bdd import Node
from .game import MoveI, MoveII, Position, Resign, Strategy, legal_interval
from .measure import DyadicMeasure
from .rational import Interval, interval_sum, simplest_between

ZERO = Fraction(0)


def _rng(seed: int, pos: Position) -> random.Random:
    return random.Random(f"{seed}:{pos.key()}")


def _interior(rng: random.Random, iv: Interval, K: int) -> Fraction:
    """A random point lo + (hi - lo) k / K with 0 < k < K, or the single point."""
    if iv.lo == iv.hi:
        return iv.lo
    k = rng.randint(1, K - 1)
    return iv.lo + (iv.hi - iv.lo) * k / K


def random_split(rng: random.Random, total: Fraction, caps: list[Fraction], K: int) -> tuple:
    parts = [legal_interval(c) for c in caps]
    out = []
    remaining = total
    for i, part in enumerate(parts[:-1]):
        rest = interval_sum(parts[i + 1:])
        mirrored = Interval(remaining - rest.hi, remaining - rest.lo, rest.hi_open, rest.lo_open)
        feasible = part & mirrored
        a = _interior(rng, feasible, K)
        if a not in feasible:
            a = feasible.pick()
        out.append(a)
        remaining -= a
    out.append(remaining)
    return tuple(out)


def random_total(rng: random.Random, s: Fraction, K: int) -> Fraction:
    """A first-move total s + (1 - s) k / K with 0 < k < K."""
    return s + (1 - s) * rng.randint(1, K - 1) / K


class RandomI(Strategy):
    player = "I"
    name = "random-I"

    def __init__(self, seed: int, K: int = 16, variant: str = "G", grid_totals: bool = False):
        self.seed = seed
        self.K = K
        self.variant = variant
        self.grid_totals = grid_totals

    def move(self, pos: Position):
        rng = _rng(self.seed, pos)
        if pos.round == 0:
            if self.grid_totals:
                # totals k/K on the grid above the stake
                ks = [k for k in range(1, self.K) if Fraction(k, self.K) > pos.stake]
                total = Fraction(rng.choice(ks), self.K)
            else:
                total = random_total(rng, pos.stake, self.K)
        else:
            total = pos.mass
        return MoveI(random_split(rng, total, pos.caps(), self.K))

    @property
    def params(self) -> dict:
        return {"seed": self.seed, "K": self.K, "grid_totals": self.grid_totals}


class RandomII(Strategy):
    player = "II"
    name = "random-II"

    def __init__(self, seed: int, variant: str = "G", alphabet: Optional[int] = None):
        self.seed = seed
        self.variant = variant
        self.alphabet = alphabet

    def move(self, pos: Position):
        rng = _rng(self.seed, pos)
        sides = [j for j, m in enumerate(pos.pending.masses) if m > 0]
        if not sides:
            return Resign("II", "every side carries mass 0")
        side = rng.choice(sides)
        y = rng.randrange(self.alphabet) if self.alphabet else None
        return MoveII(side, y)

    @property
    def params(self) -> dict:
        return {"seed": self.seed}


def _conditional(mu: DyadicMeasure, f: Node, pos: Position) -> list[Fraction]:
    return [mu.measure_of(f, pos.child(j)) for j in range(pos.arity)]


class GreedyI(Strategy):
    """Pushes mass away from the payoff A.

    ``proportional``: split in proportion to the measure of A's complement on
    each side, falling back to the deterministic legal split.
    ``concentrate``: load the side with the highest conditional measure of
    the complement as heavily as the rules allow.
    """

    player = "I"

    def __init__(self, mu: DyadicMeasure, payoff: Node, mode: str = "proportional",
                 variant: str = "G"):
        if mode not in ("proportional", "concentrate"):
            raise ValueError(f"unknown greedy mode {mode!r}")
        self.mu = mu
        self.comp = bdd.neg(payoff)
        self.mode = mode
        self.variant = variant
        self.name = f"greedy-I-{mode}"

    def _total(self, pos: Position) -> Fraction:
        if pos.round == 0:
            return simplest_between(pos.stake, (pos.stake + 1) / 2)
        return pos.mass

    def move(self, pos: Position):
        total = self._total(pos)
        caps = pos.caps()
        legal = [legal_interval(c) for c in caps]
        if self.mode == "proportional":
            weights = _conditional(self.mu, self.comp, pos)
            if sum(weights, ZERO) == 0:
                weights = caps
            W = sum(weights, ZERO)
            masses = tuple(total * w / W for w in weights)
            if all(m in iv for m, iv in zip(masses, legal)):
                return MoveI(masses)
            return MoveI(_ordered_split(total, legal, list(range(pos.arity))))
        comp = _conditional(self.mu, self.comp, pos)
        order = sorted(range(pos.arity),
                       key=lambda j: (-(comp[j] / caps[j]) if caps[j] else 1, j))
        return MoveI(_ordered_split(total, legal, order, heavy=True))

    @property
    def params(self) -> dict:
        return {"mode": self.mode}


def _ordered_split(total: Fraction, legal: list[Interval], order: list[int],
                   heavy: bool = False, K: int = 64) -> tuple:
    """Assign sides in ``order``; with ``heavy`` each takes close to its maximum."""
    out = [ZERO] * len(legal)
    remaining = total
    for idx, j in enumerate(order[:-1]):
        rest = interval_sum([legal[k] for k in order[idx + 1:]])
        mirrored = Interval(remaining - rest.hi, remaining - rest.lo, rest.hi_open, rest.lo_open)
        feasible = legal[j] & mirrored
        if heavy and feasible.lo < feasible.hi:
            a = feasible.lo + (feasible.hi - feasible.lo) * (K - 1) / K
        else:
            a = feasible.pick()
        out[j] = a
        remaining -= a
    out[order[-1]] = remaining
    return tuple(out)


class GreedyII(Strategy):
    """Picks the nonzero side where the payoff is heaviest.

    ``conditional`` compares mu(A & N_c) / mu(N_c); ``absolute`` compares
    mu(A & N_c).  Ties go to the lower side.
    """

    player = "II"

    def __init__(self, mu: DyadicMeasure, payoff: Node, mode: str = "conditional",
                 variant: str = "G"):
        if mode not in ("conditional", "absolute"):
            raise ValueError(f"unknown greedy mode {mode!r}")
        self.mu = mu
        self.payoff = payoff
        self.mode = mode
        self.variant = variant
        self.name = f"greedy-II-{mode}"

    def move(self, pos: Position):
        masses = pos.pending.masses
        weights = _conditional(self.mu, self.payoff, pos)
        caps = pos.caps()
        best, best_key = None, None
        for j, m in enumerate(masses):
            if m <= 0:
                continue
            w = weights[j] / caps[j] if self.mode == "conditional" else weights[j]
            if best is None or w > best_key:
                best, best_key = j, w
        if best is None:
            return Resign("II", "every side carries mass 0")
        return MoveII(best)

    @property
    def params(self) -> dict:
        return {"mode": self.mode}


def adversary_suite(player: str, mu: DyadicMeasure, payoff: Node, n_random: int = 100,
                    seed: int = 0, variant: str = "G") -> list[Strategy]:
    """``n_random`` random opponents for ``player`` plus the two greedy ones."""
    if player == "I":
        out: list[Strategy] = [RandomI(seed * 1000003 + i, variant=variant) for i in range(n_random)]
        out += [GreedyI(mu, payoff, "proportional", variant), GreedyI(mu, payoff, "concentrate", variant)]
    else:
        out = [RandomII(seed * 1000003 + i, variant=variant) for i in range(n_random)]
        out += [GreedyII(mu, payoff, "conditional", variant), GreedyII(mu, payoff, "absolute", variant)]
    return out
