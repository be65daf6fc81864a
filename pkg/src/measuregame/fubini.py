"""Section strategies from strategies in the four-quadrant game, and an exact Fubini check.

A transformer plays II in the one-dimensional game on the first
coordinate.  Alongside the run x_0 x_1 ... it keeps, for every second
coordinate node p of the current length, a value q_p and (for live p) a
position of the two-dimensional game consistent with the source strategy
tau, sitting over N_{x_0..x_{n-1}} x N_p with mass q_p.  Dead nodes carry
the full product mass of their rectangle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Optional

from . import bdd
from .certify import delta_with_witnesses, replay_position
from .game import MoveI, MoveII, Position, Resign, Strategy, replay_moves
from .measure import Product, join_pair
from .rational import fmt, q, simplest_between
from .sets import Clopen, SetExpr
from .strategies import strategy_I_from_closed

ZERO = Fraction(0)


@dataclass
class QEntry:
    q: Fraction
    live: bool
    position: Optional[Position] = None  # G2 position after tau's reply, I to move
    witness: Optional[MoveI] = None  # the move q-hat that tau answered
    delta: Optional[tuple] = None  # 4-tuple at ``position`` once computed

    def to_json(self) -> dict:
        out = {"q": fmt(self.q), "live": self.live}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.delta is not None:
            out["delta"] = [fmt(d) for d in self.delta]
        return out


@dataclass
class QuadrantContext:
    """Bookkeeping after n rounds: x has length n and entries cover 2^n."""

    x: str
    m: Fraction
    entries: dict
    bound: Fraction  # the strict upper bound for the sum of q at this level
    rounds: list = field(default_factory=list)
    exact: bool = True

    @property
    def level(self) -> int:
        return len(self.x)

    def q_sum(self) -> Fraction:
        return sum((e.q for e in self.entries.values()), ZERO)

    def live_nodes(self) -> list[str]:
        return sorted(p for p, e in self.entries.items() if e.live)

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "m": fmt(self.m),
            "bound": fmt(self.bound),
            "q_sum": fmt(self.q_sum()),
            "exact": self.exact,
            "entries": {p: e.to_json() for p, e in sorted(self.entries.items())},
        }


class _Transformer(Strategy):
    """Shared machinery; subclasses fix the root total, the root side and the bound factor."""

    player = "II"
    variant = "G"

    def __init__(self, tau: Strategy, P: Product, Q: int = 64):
        if not isinstance(P, Product):
            raise ValueError("the source game needs a product measure")
        self.tau = tau
        self.P = P
        self.Q = Q
        self._contexts: dict[str, QuadrantContext] = {}
        self.history: list[QuadrantContext] = []
        self.runs: list["_Transformer"] = []

    def _register(self, copy: "_Transformer") -> "_Transformer":
        # copies report back so a caller can audit the run they took part in
        self.runs.append(copy)
        return copy

    # subclass hooks
    stake2: Fraction = ZERO

    def factor(self) -> Fraction:  # pragma: no cover - abstract
        raise NotImplementedError

    def root_total(self, masses) -> Fraction:  # pragma: no cover - abstract
        raise NotImplementedError

    def root_side(self, masses, sums) -> int:
        return _min_ratio(masses, sums)

    # context tracking
    def context_for(self, pos: Position) -> QuadrantContext:
        """Context after the completed rounds of ``pos``."""
        base = pos if pos.to_move == "I" else Position(
            pos.variant, pos.stake, pos.mu, pos.moves[:-1], pos.node, pos.mass, pos.ys, pos.alphabet)
        key = base.key()
        hit = self._contexts.get(key)
        if hit is not None:
            return hit
        if base.round == 0:
            return None
        start = Position.start(base.variant, base.stake, base.mu, base.alphabet)
        parent = replay_moves(start, base.moves[:-2])
        ctx = self._advance(self.context_for(parent), base.moves[-2].masses, base.round - 1)
        if ctx.x != base.node:
            raise RuntimeError(f"recorded side {base.node} differs from the transformer's choice {ctx.x}")
        self._contexts[key] = ctx
        return ctx

    def move(self, pos: Position):
        prev = self.context_for(pos)
        try:
            ctx = self._advance(prev, pos.pending.masses, pos.round)
        except _Stuck as exc:
            return Resign("II", str(exc))
        side = int(ctx.x[-1])
        self._contexts[pos.apply(MoveII(side)).key()] = ctx
        self.history.append(ctx)
        return MoveII(side)

    def _advance(self, prev: Optional[QuadrantContext], masses, rnd: int) -> QuadrantContext:
        masses = tuple(q(m) for m in masses)
        P, tau = self.P, self.tau
        factor = self.factor()
        if prev is None:
            r0 = self.root_total(masses)
            start = Position.start("G2", self.stake2, P)
            parents = {"": QEntry(r0, True, start)}
            x_prev, m_prev = "", sum(masses, ZERO)
        else:
            parents = prev.entries
            x_prev, m_prev = prev.x, prev.m
        exact = True if prev is None else prev.exact
        deltas: dict[str, tuple] = {}
        moves: dict[str, list] = {}
        for p, e in parents.items():
            if e.live:
                r = e.q
                d4, mv4, ex, _ = delta_with_witnesses(tau, e.position, r, r, self.Q)
                exact = exact and ex
                deltas[p] = tuple(d4)
                moves[p] = mv4
                e.delta = tuple(d4)
            else:
                deltas[p] = tuple(P.rect(x_prev + str(i), p + str(k)) for i in (0, 1) for k in (0, 1))
        sums = [sum((deltas[p][2 * i + k] for p in parents for k in (0, 1)), ZERO) for i in (0, 1)]
        if prev is None:
            side = self.root_side(masses, sums)
        else:
            side = _min_ratio(masses, sums)
        if side is None:
            raise _Stuck("every side carries mass 0")
        x = x_prev + str(side)
        m = masses[side]
        bound = factor * m
        S = sums[side]
        if not S < bound:
            raise _Stuck(f"quadrant sum {fmt(S)} is not below {fmt(bound)}")
        # live children share the slack evenly
        kids = []
        for p in sorted(parents):
            for k in (0, 1):
                child = p + str(k)
                cap = P.rect(x, child)
                dv = deltas[p][2 * side + k]
                e = parents[p]
                alive = e.live and dv < cap and moves[p][2 * side + k] is not None
                kids.append((child, p, k, cap, dv, alive))
        n_live = sum(1 for c in kids if c[5])
        each = (bound - S) / (2 * n_live) if n_live else ZERO
        entries: dict[str, QEntry] = {}
        for child, p, k, cap, dv, alive in kids:
            if not alive:
                entries[child] = QEntry(cap if not parents[p].live or dv >= cap else dv, False)
                if parents[p].live and dv < cap:
                    exact = False  # no witness at this resolution
                continue
            pos_p = parents[p].position
            quad = 2 * side + k
            mv = _witness_near(tau, pos_p, parents[p].q, quad, dv, dv + each, moves[p][quad], self.Q)
            after = pos_p.apply(mv)
            reply = tau.move(after)
            if not (isinstance(reply, MoveII) and reply.side == quad):
                raise _Stuck(f"source does not answer the witness at {child}")
            entries[child] = QEntry(mv.masses[quad], True, after.apply(reply), mv)
        ctx = QuadrantContext(x, m, entries, bound, list(prev.rounds) if prev else [], exact)
        record = {
            "round": rnd,
            "x": x,
            "sums": [fmt(v) for v in sums],
            "masses": [fmt(v) for v in masses],
            "parent_ratio": None if prev is None else fmt(prev.q_sum() / m_prev),
            "chosen_ratio": fmt(S / m),
            "q_sum": fmt(ctx.q_sum()),
            "bound": fmt(bound),
        }
        ctx.rounds.append(record)
        return ctx

    # audits
    def check_context(self, ctx: QuadrantContext) -> list[str]:
        issues = []
        if not ctx.q_sum() < ctx.bound:
            issues.append(f"level {ctx.level}: sum of q {fmt(ctx.q_sum())} not below {fmt(ctx.bound)}")
        for p, e in ctx.entries.items():
            cap = self.P.rect(ctx.x, p)
            if e.live:
                if not e.q < cap:
                    issues.append(f"{p}: live value {fmt(e.q)} not below {fmt(cap)}")
                msg = replay_position(self.tau, e.position, join_pair(ctx.x, p), e.q)
                if msg:
                    issues.append(f"{p}: {msg}")
            elif e.q != cap:
                issues.append(f"{p}: dead value {fmt(e.q)} != {fmt(cap)}")
        for rec in ctx.rounds:
            if rec["parent_ratio"] is not None and q(rec["chosen_ratio"]) > q(rec["parent_ratio"]):
                issues.append(f"round {rec['round']}: chosen ratio above the parent ratio")
        return issues

    def dead_mass(self, ctx: QuadrantContext) -> Fraction:
        """Sum of mu_y(N_p) over the dead nodes p at the context's level."""
        second = self.P.second
        return sum((second.mass(p) for p, e in ctx.entries.items() if not e.live), ZERO)

    def live_tree(self, ctx: QuadrantContext) -> list[str]:
        return ctx.live_nodes()


class _Stuck(RuntimeError):
    pass


def _min_ratio(masses, sums) -> Optional[int]:
    """Nonzero side minimizing sums[i] / masses[i]; ties go to 0."""
    best, key = None, None
    for i in (0, 1):
        if masses[i] <= 0:
            continue
        v = sums[i] / masses[i]
        if key is None or v < key:
            best, key = i, v
    return best


def _witness_near(tau: Strategy, pos: Position, r: Fraction, quad: int, lo: Fraction,
                  hi: Fraction, fallback: Optional[MoveI], Q: int) -> MoveI:
    """A move at ``pos`` tau answers with ``quad`` whose value lies in [lo, hi)."""
    if fallback is not None and lo <= fallback.masses[quad] < hi:
        return fallback
    _, mv4, _, _ = delta_with_witnesses(tau, pos, r, hi - lo, Q)
    mv = mv4[quad]
    if mv is None or not mv.masses[quad] < hi:
        raise _Stuck("no witness within the slack")
    return mv


class Fub1II(_Transformer):
    """II in G(0, B_eps), B_eps = {x : II wins G(eps, A_x)}, from tau winning G2(0, A)."""

    name = "fub1"

    def __init__(self, tau: Strategy, P: Product, eps: Fraction, Q: int = 64):
        super().__init__(tau, P, Q)
        self.eps = q(eps)
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        self.stake2 = ZERO

    def fresh(self) -> "Fub1II":
        return self._register(Fub1II(self.tau.fresh(), self.P, self.eps, self.Q))

    def factor(self) -> Fraction:
        return self.eps

    def root_side(self, masses, sums) -> int:
        # the root deltas are at most r0, so the heavier side works
        if masses[0] <= 0 and masses[1] <= 0:
            return None
        return 0 if masses[0] >= masses[1] else 1

    def root_total(self, masses) -> Fraction:
        top = max(masses)
        return min(self.eps * top / 2, Fraction(1, 2))

    def frontier_bound(self) -> Fraction:
        return self.eps

    @property
    def params(self) -> dict:
        return {"eps": fmt(self.eps), "source": self.tau.to_json()}


class Fub2II(_Transformer):
    """II in G(1 - gamma, B^c) from tau winning G2(1 - eps, A^c), 0 < gamma < eps."""

    name = "fub2"

    def __init__(self, tau: Strategy, P: Product, eps: Fraction, gamma: Fraction, Q: int = 64):
        super().__init__(tau, P, Q)
        self.eps, self.gamma = q(eps), q(gamma)
        if not 0 < self.gamma < self.eps < 1:
            raise ValueError("need 0 < gamma < eps < 1")
        self.beta = 1 - (1 - self.eps) / (1 - self.gamma)
        self.stake2 = 1 - self.eps

    def fresh(self) -> "Fub2II":
        return self._register(Fub2II(self.tau.fresh(), self.P, self.eps, self.gamma, self.Q))

    def factor(self) -> Fraction:
        return 1 - self.beta

    def root_total(self, masses) -> Fraction:
        total = sum(masses, ZERO)
        hi = total * (1 - self.beta)
        if not 1 - self.eps < hi:
            raise _Stuck(f"first move total {fmt(total)} is not above the stake")
        return simplest_between(1 - self.eps, hi)

    def frontier_bound(self) -> Fraction:
        return 1 - self.beta

    def section_strategy_I(self, ctx: QuadrantContext):
        """I's strategy in G(0, complement of the live tree) on the second coordinate."""
        live = ctx.live_nodes()
        F = Clopen(bdd.disj_all(bdd.cube(p) for p in live))
        return strategy_I_from_closed(self.P.second, F, ZERO)

    @property
    def params(self) -> dict:
        return {"eps": fmt(self.eps), "gamma": fmt(self.gamma), "beta": fmt(self.beta),
                "source": self.tau.to_json()}


def fub1_transform(tau: Strategy, P: Product, eps: Fraction, Q: int = 64) -> Fub1II:
    return Fub1II(tau, P, eps, Q)


def fub2_transform(tau: Strategy, P: Product, eps: Fraction, gamma: Fraction, Q: int = 64) -> Fub2II:
    return Fub2II(tau, P, eps, gamma, Q)


# -- exact check on clopen sets -------------------------------------------

@dataclass
class FubiniReport:
    measure: Fraction
    x_positive: list  # first-coordinate cylinders whose sections are non-null
    y_positive: list
    x_mass: Fraction  # mu_x of the union of those cylinders
    y_mass: Fraction
    depth: int

    @property
    def conditions(self) -> tuple[bool, bool, bool]:
        return self.measure == 0, self.x_mass == 0, self.y_mass == 0

    @property
    def ok(self) -> bool:
        c = self.conditions
        return c[0] == c[1] == c[2]

    def to_json(self) -> dict:
        return {
            "format": "measuregame.fubini/1",
            "measure": fmt(self.measure),
            "x_positive": self.x_positive,
            "y_positive": self.y_positive,
            "x_mass": fmt(self.x_mass),
            "y_mass": fmt(self.y_mass),
            "conditions": list(self.conditions),
            "ok": self.ok,
        }


def fubini_check(P: Product, A: SetExpr, d: int) -> FubiniReport:
    """Measure of A and of its non-null sections, exactly, for A decided at depth d per coordinate."""
    f = A.clopen()
    if f is None:
        raise ValueError("fubini_check needs a clopen set")
    top = max(bdd.support(f), default=-1)
    if top >= 2 * d:
        raise ValueError(f"set depends on coordinates beyond depth {d}")
    words = ["".join(w) for w in iproduct("01", repeat=d)]
    inside = {}
    for u in words:
        for v in words:
            inside[(u, v)] = bdd.restrict_bits(f, join_pair(u, v)) is bdd.TRUE
    mx, my = P.first, P.second
    measure = P.measure_of(f)
    xs = [u for u in words if mx.mass(u) > 0
          and sum((my.mass(v) for v in words if inside[(u, v)]), ZERO) > 0]
    ys = [v for v in words if my.mass(v) > 0
          and sum((mx.mass(u) for u in words if inside[(u, v)]), ZERO) > 0]
    return FubiniReport(measure, xs, ys, sum((mx.mass(u) for u in xs), ZERO),
                        sum((my.mass(v) for v in ys), ZERO), d)
