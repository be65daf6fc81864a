"""Borel-Cantelli in both directions and the Renyi-Lamperti strategy for II.

Events are clopen sets given by BDDs.  The Renyi-Lamperti strategy keeps
two finite-horizon stand-ins for the quantities maintained along a run:

``inha``  min over n in [n0, L + H] of  a_n / b_n^2 * (mu(N_t) - m_t),
          which must stay below 1, and
``inhb``  b_{L+H}, which must exceed ``floor * mu(N_t)``,

where K = N_t intersected with the committed blocks, L is the last cut,
a_n = sum over L <= i, j <= n of mu(A_i & A_j & K),
b_n = sum over L <= i <= n of mu(A_i & K), and n0 is the first index with
b_n > 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import bdd
from .bdd import Node
from .game import MoveII, Position, Resign, Strategy
from .measure import DyadicMeasure
from .rational import fmt, q
from .sets import IN, Clopen, antichain_of
from .strategies import decide_by_measure
from .transforms import intersect_strategies, swap_strategy

ZERO = Fraction(0)
ONE = Fraction(1)


# -- event families -------------------------------------------------------

class EventFamily:
    """A sequence of clopen events with cached exact masses.

    ``rule`` maps an index to a BDD; ``spec`` is its JSON description.
    """

    def __init__(self, mu: DyadicMeasure, rule: Callable[[int], Node], spec: dict,
                 size: Optional[int] = None):
        self.mu = mu
        self.rule = rule
        self.spec = spec
        self.size = size
        self._events: dict[int, Node] = {}
        self._supports: dict[int, frozenset] = {}
        self._p: dict[int, Fraction] = {}
        self._pp: dict[tuple[int, int], Fraction] = {}
        self._colpre: dict[int, list[Fraction]] = {}
        self._between: dict[tuple[int, int], Fraction] = {}

    @classmethod
    def coordinate(cls, mu: DyadicMeasure, offset: int = 0, bit: int = 1) -> "EventFamily":
        """A_i = {x : x_{i+offset} = bit}."""
        return cls(mu, lambda i: bdd.literal(i + offset, bit),
                   {"kind": "coordinate", "offset": offset, "bit": bit})

    @classmethod
    def constant_full(cls, mu: DyadicMeasure) -> "EventFamily":
        return cls(mu, lambda i: bdd.TRUE, {"kind": "full"})

    @classmethod
    def from_list(cls, mu: DyadicMeasure, events: Sequence[Node]) -> "EventFamily":
        events = list(events)
        return cls(mu, lambda i: events[i],
                   {"kind": "list", "events": [antichain_of(e) for e in events]}, len(events))

    def event(self, i: int) -> Node:
        if self.size is not None and not 0 <= i < self.size:
            raise IndexError(f"event index {i} beyond the family of size {self.size}")
        hit = self._events.get(i)
        if hit is None:
            hit = self.rule(i)
            self._events[i] = hit
        return hit

    def support(self, i: int) -> frozenset:
        hit = self._supports.get(i)
        if hit is None:
            hit = frozenset(bdd.support(self.event(i)))
            self._supports[i] = hit
        return hit

    def p(self, i: int) -> Fraction:
        hit = self._p.get(i)
        if hit is None:
            hit = self.mu.measure_of(self.event(i))
            self._p[i] = hit
        return hit

    def pp(self, i: int, j: int) -> Fraction:
        if i > j:
            i, j = j, i
        hit = self._pp.get((i, j))
        if hit is None:
            hit = self.mu.measure_of(bdd.conj(self.event(i), self.event(j)))
            self._pp[(i, j)] = hit
        return hit

    def column_prefix(self, j: int, k: int) -> Fraction:
        """sum over i < k of P(A_i & A_j), for k <= j."""
        col = self._colpre.get(j)
        if col is None:
            col = [ZERO]
            self._colpre[j] = col
        while len(col) <= k:
            i = len(col) - 1
            col.append(col[-1] + self.pp(i, j))
        return col[k]

    def column_between(self, j: int, c: int) -> Fraction:
        """sum over c <= i < j of P(A_i & A_j)."""
        key = (j, c)
        hit = self._between.get(key)
        if hit is None:
            hit = self.column_prefix(j, j) - self.column_prefix(j, c)
            self._between[key] = hit
        return hit

    def meet(self, i: int, t: str = "") -> Fraction:
        """mu(A_i & N_t)."""
        return self.mu.measure_of(self.event(i), t)

    def meet2(self, i: int, j: int, t: str = "") -> Fraction:
        """mu(A_i & A_j & N_t)."""
        return self.mu.measure_of(bdd.conj(self.event(i), self.event(j)), t)

    def block(self, a: int, b: int) -> Node:
        """A_[a, b): union of A_i for a <= i < b."""
        return bdd.disj_all(self.event(i) for i in range(a, b))

    def complement_block(self, a: int, b: int) -> Node:
        """Union of the complements A_i^c for a <= i < b."""
        return bdd.disj_all(bdd.neg(self.event(i)) for i in range(a, b))

    def to_json(self) -> dict:
        return dict(self.spec)


@dataclass(frozen=True)
class IndependenceReport:
    ok: bool
    subset: tuple = ()
    joint: Optional[Fraction] = None
    product: Optional[Fraction] = None

    def to_json(self) -> dict:
        out: dict = {"ok": self.ok}
        if not self.ok:
            out.update(subset=list(self.subset), joint=fmt(self.joint), product=fmt(self.product))
        return out


def check_mutual_independence(family: EventFamily, F: Sequence[int]) -> IndependenceReport:
    """Check that every sub-collection of the indices in F multiplies."""
    F = sorted(set(F))
    for r in range(2, len(F) + 1):
        for sub in itertools.combinations(F, r):
            joint = family.mu.measure_of(bdd.conj_all(family.event(i) for i in sub))
            prod = ONE
            for i in sub:
                prod *= family.p(i)
            if joint != prod:
                return IndependenceReport(False, sub, joint, prod)
    return IndependenceReport(True)


# -- first direction ------------------------------------------------------

class ConvergenceII(Strategy):
    """II in G(0, union over m of the intersection of A_i for i >= m).

    On I's first move with total e, it picks the least n >= 1 whose tail sum
    is below e and from then on plays the combined strategy for the events
    A_i, n <= i < horizon, at stake (tail(n) + e) / 2.
    """

    player = "II"
    name = "bc-convergence"

    def __init__(self, mu: DyadicMeasure, inputs: Sequence[tuple[Fraction, Strategy]],
                 tail: Callable[[int], Fraction], depth: int, max_index: Optional[int] = None):
        self.mu = mu
        self.inputs = list(inputs)
        self.tail = tail
        self.depth = depth
        self.max_index = len(self.inputs) if max_index is None else max_index
        self._delegates: dict[int, tuple] = {}

    def cutoff(self, e: Fraction) -> int:
        n = 1
        while not self.tail(n) < e:
            n += 1
            if n > 10 ** 6:
                raise ValueError("tail bound never drops below the first-move total")
        return n

    def delegate(self, n: int, e: Fraction):
        hit = self._delegates.get(n)
        if hit is None:
            budget = (self.tail(n) + e) / 2
            pairs = [self.inputs[i] for i in range(n, min(self.max_index, len(self.inputs)))]
            combined = intersect_strategies(pairs, budget, self.depth, self.mu)
            hit = (combined, budget)
            self._delegates[n] = hit
        return hit

    def move(self, pos: Position):
        first = pos.moves[0]
        e = sum(first.masses, ZERO)
        n = self.cutoff(e)
        combined, _ = self.delegate(n, e)
        return combined.strategy.move(pos)


def bc_convergence_strategy(mu: DyadicMeasure, inputs: Sequence[tuple[Fraction, Strategy]],
                            tail: Callable[[int], Fraction], depth: int) -> ConvergenceII:
    if tail is None:
        raise ValueError("a tail-sum bound is required")
    return ConvergenceII(mu, inputs, tail, depth)


# -- second direction -----------------------------------------------------

@dataclass
class BlockSchedule:
    blocks: list  # (L_k, M_k), inclusive
    eps: list
    products: list
    partial: bool = False

    def to_json(self) -> dict:
        return {
            "format": "measuregame.blocks/1",
            "blocks": [list(b) for b in self.blocks],
            "eps": [fmt(e) for e in self.eps],
            "products": [fmt(p) for p in self.products],
            "partial": self.partial,
        }


def default_block_eps(eps: Fraction) -> Callable[[int], Fraction]:
    eps = q(eps)
    return lambda k: eps / 2 ** (k + 2)


def bc_divergence_blocks(s: Callable[[int], Fraction], eps_k: Callable[[int], Fraction],
                         count: int, horizon: int = 10_000) -> BlockSchedule:
    """Consecutive blocks [L_k, M_k] with prod (1 - s_i) < eps_k over each."""
    out = BlockSchedule([], [], [])
    L = 0
    for k in range(count):
        target = q(eps_k(k))
        prod = ONE
        M = L
        while True:
            if M >= horizon:
                out.partial = True
                return out
            prod *= 1 - q(s(M))
            if prod < target:
                break
            M += 1
        out.blocks.append((L, M))
        out.eps.append(target)
        out.products.append(prod)
        L = M + 1
    return out


@dataclass
class DivergenceResult:
    strategy: Strategy
    certificate: object
    schedule: BlockSchedule
    completed: list
    budget: Fraction
    block_strategies: list

    def hits_every_block(self, family: EventFamily) -> list[str]:
        """Support nodes at full depth lying outside the union of A_i^c over some completed block."""
        bad = []
        blocks = [Clopen(family.complement_block(L, M + 1)) for L, M in self.completed]
        for t in self.certificate.level(self.certificate.depth):
            for k, blk in enumerate(blocks):
                if blk.classify(t) != IN:
                    bad.append(f"{t}: block {k}")
                    break
        return bad


def bc_divergence_strategy(family: EventFamily, s: Callable[[int], Fraction], eps: Fraction,
                           d: int, eps_k: Optional[Callable[[int], Fraction]] = None) -> DivergenceResult:
    """I wins G(1 - eps, union of the intersections of A_i) for independent events.

    Each completed block (M_k < d) gets II's strategy for the union of the
    complements at stake prod (1 - s_i); these are intersected at a budget
    strictly between sum eps_k and eps, and swapped to a strategy for I.
    """
    from .certify import extract_scaled_measure

    eps = q(eps)
    mu = family.mu
    eps_k = eps_k or default_block_eps(eps)
    sched = bc_divergence_blocks(s, eps_k, d + 1)
    completed = [(L_, M_) for L_, M_ in sched.blocks if M_ < d]
    if not completed:
        raise ValueError(f"no block is complete by depth {d}")
    pairs, block_strats = [], []
    for (L_, M_), prod in zip(sched.blocks, sched.products):
        if M_ >= d:
            break
        payoff = Clopen(family.complement_block(L_, M_ + 1))
        dec = decide_by_measure(mu, payoff, prod)
        if dec.winner != "II":
            raise ValueError(f"block [{L_}, {M_}] is not won by II: independence fails")
        pairs.append((prod, dec.strategy))
        block_strats.append(dec)
    total_eps = _eps_sum_bound(eps_k, eps)
    budget = (total_eps + eps) / 2
    combined = intersect_strategies(pairs, budget, d, mu)
    swapped = swap_strategy("II->I", combined.strategy, eps, eps - budget, d, mu)
    cert = extract_scaled_measure(swapped.strategy, 1 - eps, d, mu)
    return DivergenceResult(swapped.strategy, cert, sched, completed, budget, block_strats)


def _eps_sum_bound(eps_k: Callable[[int], Fraction], eps: Fraction, terms: int = 64) -> Fraction:
    """An upper bound for sum eps_k, exact for the default geometric schedule."""
    first, second = q(eps_k(0)), q(eps_k(1))
    if first > 0 and second * 2 == first:
        total = 2 * first
    else:
        total = sum((q(eps_k(k)) for k in range(terms)), ZERO)
    if not total < eps:
        raise ValueError("block tolerances must sum below eps")
    return total


# -- Renyi-Lamperti lemmas ------------------------------------------------

def min_index_bound(a: Sequence, b: Sequence, c: Sequence) -> tuple[int, Fraction]:
    """argmin of a_i c_i / b_i^2 (first on ties) and its value."""
    a, b, c = [q(x) for x in a], [q(x) for x in b], [q(x) for x in c]
    if not (len(a) == len(b) == len(c)) or not a:
        raise ValueError("weights must be non-empty and of equal length")
    if any(x <= 0 for x in b) or any(x < 0 for x in a) or any(x < 0 for x in c):
        raise ValueError("need b_i > 0 and a_i, c_i >= 0")
    if sum(c, ZERO) != 1:
        raise ValueError("c must sum to 1")
    best, val = 0, None
    for i in range(len(a)):
        v = a[i] * c[i] / b[i] ** 2
        if val is None or v < val:
            best, val = i, v
    return best, val


def delta_for_eta(D: Fraction, eta: Fraction) -> Fraction:
    """Largest 2^-k (k >= 1) with eta > delta + sqrt(delta D), checked by squaring."""
    D, eta = q(D), q(eta)
    if not eta > 0 or D < 0:
        raise ValueError("need eta > 0 and D >= 0")
    k = 1
    while True:
        delta = Fraction(1, 2 ** k)
        gap = eta - delta
        if gap > 0 and gap * gap > delta * D:
            return delta
        k += 1


@dataclass(frozen=True)
class Sums:
    L: int
    H: int
    a: tuple  # a_n for n = L .. L + H
    b: tuple

    def ratio_min(self, scale: Fraction) -> tuple[Optional[Fraction], Optional[int]]:
        # compare a/b^2 by cross-multiplying integers; scale is applied once
        best, arg = None, None
        for k, (a, b) in enumerate(zip(self.a, self.b)):
            if b == 0:
                continue
            num = a.numerator * b.denominator ** 2
            den = a.denominator * b.numerator ** 2
            if best is None or num * best[1] < best[0] * den:
                best, arg = (num, den), self.L + k
        if best is None:
            return None, None
        return Fraction(best[0], best[1]) * scale, arg

    @property
    def tail(self) -> Fraction:
        return self.b[-1]


def window_sums(family: EventFamily, K: Node, L: int, H: int) -> Sums:
    """a_n and b_n over the window [L, L + H], intersected with K.

    Indices whose events are independent of K and of the earlier events of
    the window are handled through the unconditional pair table; the rest
    are integrated exactly.
    """
    mu = family.mu
    top = L + H
    muK = mu.measure_of(K)
    a_vals, b_vals = [], []
    if muK == 0:
        zeros = tuple([ZERO] * (H + 1))
        return Sums(L, H, zeros, zeros)
    if mu.product_depth is None:
        c = top + 1
    else:
        base = set(bdd.support(K)) | set(range(mu.product_depth))
        c = _free_start(family, base, L, top)
    nf = ZERO
    a = b = ZERO
    for n in range(L, top + 1):
        if n < c:
            mk = mu.measure_of(bdd.conj(family.event(n), K))
            nf += mk
            cross = ZERO
            for i in range(L, n):
                cross += mu.measure_of(bdd.conj_all((family.event(i), family.event(n), K)))
        else:
            pn = family.p(n)
            mk = muK * pn
            cross = nf * pn + muK * family.column_between(n, c)
        a += mk + 2 * cross
        b += mk
        a_vals.append(a)
        b_vals.append(b)
    return Sums(L, H, tuple(a_vals), tuple(b_vals))


def _free_start(family: EventFamily, base: set, L: int, top: int) -> int:
    """Least c such that events c..top avoid ``base`` and the supports of events L..c-1."""
    c = L
    for j in range(L, top + 1):
        if family.support(j) & base:
            c = j + 1
    while True:
        used = set(base)
        for i in range(L, c):
            used |= family.support(i)
        last = None
        for j in range(c, top + 1):
            if family.support(j) & used:
                last = j
        if last is None:
            return c
        c = last + 1


@dataclass
class SurrogateValue:
    inha: Optional[Fraction]
    argmin: Optional[int]
    inhb: Fraction
    bound: Fraction  # floor * mu(N_t)

    @property
    def ok_a(self) -> bool:
        return self.inha is not None and self.inha < 1

    @property
    def ok_b(self) -> bool:
        return self.inhb > self.bound

    @property
    def ok(self) -> bool:
        return self.ok_a and self.ok_b

    def to_json(self) -> dict:
        return {
            "inha": None if self.inha is None else fmt(self.inha),
            "argmin": self.argmin,
            "inhb": fmt(self.inhb),
            "inhb_floor": fmt(self.bound),
            "ok": self.ok,
        }


def surrogate(family: EventFamily, K: Node, L: int, H: int, node_mass: Fraction,
              m: Fraction, floor: Fraction = ONE) -> SurrogateValue:
    sums = window_sums(family, K, L, H)
    val, arg = sums.ratio_min(node_mass - m)
    return SurrogateValue(val, arg, sums.tail, floor * node_mass)


@dataclass
class SideChoice:
    side: int
    votes: list
    values: list  # SurrogateValue per side
    switched: bool  # the vote winner failed and the other side was taken

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "votes": self.votes,
            "switched": self.switched,
            "values": [v.to_json() for v in self.values],
        }


class SurrogateFailure(RuntimeError):
    def __init__(self, message: str, dump: dict):
        super().__init__(message)
        self.dump = dump


def choose_side(family: EventFamily, K: Node, t: str, L: int, H: int, masses: Sequence[Fraction],
                node_mass: Optional[Fraction] = None, m_t: Optional[Fraction] = None,
                floor: Fraction = ONE) -> SideChoice:
    """Pick the side along which both stand-ins survive.

    At each index where the parent ratio reaches a new low, the two-term
    split inequality names a side; the majority wins (ties to 0).  If the
    winner's stand-ins fail, the other side is taken.
    """
    mu = family.mu
    node_mass = mu.mass(t) if node_mass is None else node_mass
    m_t = sum(masses, ZERO) if m_t is None else m_t
    parent = window_sums(family, K, L, H)
    kids = []
    for side in (0, 1):
        Kc = bdd.conj(K, bdd.cube(t + str(side)))
        kids.append(window_sums(family, Kc, L, H))
    caps = [mu.mass(t + "0"), mu.mass(t + "1")]
    spread = node_mass - m_t
    if spread <= 0:
        raise SurrogateFailure("node mass not above the assigned mass", {"node": t})
    cs = [(caps[i] - masses[i]) / spread for i in (0, 1)]
    votes = [0, 0]
    record = None
    for k in range(H + 1):
        a, b = parent.a[k], parent.b[k]
        if b == 0:
            continue
        r = a / (b * b)
        if record is not None and not r < record:
            continue
        record = r
        cand = [i for i in (0, 1) if kids[i].b[k] > 0]
        if not cand:
            continue
        best = min(cand, key=lambda i: (kids[i].a[k] * cs[i] / kids[i].b[k] ** 2, i))
        votes[best] += 1
    winner = 0 if votes[0] >= votes[1] else 1
    values = []
    for side in (0, 1):
        val, arg = kids[side].ratio_min(caps[side] - masses[side])
        values.append(SurrogateValue(val, arg, kids[side].tail, floor * caps[side]))
    if values[winner].ok:
        return SideChoice(winner, votes, values, False)
    other = 1 - winner
    if values[other].ok:
        return SideChoice(other, votes, values, True)
    raise SurrogateFailure("neither side keeps the stand-in inequalities",
                           {"node": t, "votes": votes, "values": [v.to_json() for v in values]})


@dataclass
class Cutoff:
    cut: int
    value: SurrogateValue
    K: Node

    def to_json(self) -> dict:
        return {"cut": self.cut, **self.value.to_json()}


def commitment_cutoff(family: EventFamily, K: Node, L: int, H: int, node_mass: Fraction,
                      m: Fraction, floor: Fraction = ONE) -> Cutoff:
    """Least cut l > L such that committing to A_[L, l) keeps both stand-ins."""
    best = None
    for cut in range(L + 1, L + H + 1):
        K2 = bdd.conj(K, family.block(L, cut))
        val = surrogate(family, K2, cut, H, node_mass, m, floor)
        if val.ok:
            return Cutoff(cut, val, K2)
        if val.inha is not None and (best is None or val.inha < best[1].inha):
            best = (cut, val)
    raise SurrogateFailure("horizon exhausted before a cut preserved the stand-ins",
                           {"best_cut": None if best is None else best[0],
                            "best": None if best is None else best[1].to_json()})


# -- the strategy ---------------------------------------------------------

@dataclass
class RLState:
    node: str
    mass: Fraction
    cuts: list
    K: Node
    rounds: list = field(default_factory=list)


class RenyiLampertiII(Strategy):
    """II in G(1 - 1/D, limsup A_i).

    Each round: choose a side, fall back to the other side when I gave the
    chosen one mass 0, then commit to the next block of events.  The
    per-round record holds every stand-in value for audit.
    """

    player = "II"
    name = "renyi-lamperti"

    def __init__(self, family: EventFamily, D: Fraction, H: int = 64, floor: Fraction = ONE):
        self.family = family
        self.D = q(D)
        self.H = H
        self.floor = q(floor)
        self._states: dict[str, RLState] = {}
        self.runs: list["RenyiLampertiII"] = []
        self.last_state: Optional[RLState] = None
        self.last_failure: Optional[dict] = None

    def fresh(self) -> "RenyiLampertiII":
        # copies report back so callers can audit the run they were used in
        copy = RenyiLampertiII(self.family, self.D, self.H, self.floor)
        self.runs.append(copy)
        return copy

    @property
    def params(self) -> dict:
        return {"family": self.family.to_json(), "D": fmt(self.D), "H": self.H, "floor": fmt(self.floor)}

    def state_for(self, pos: Position) -> RLState:
        """State after the II moves in ``pos`` (I may have moved since)."""
        prefix = pos if pos.to_move == "I" else Position(
            pos.variant, pos.stake, pos.mu, pos.moves[:-1], pos.node, pos.mass, pos.ys, pos.alphabet)
        key = prefix.key()
        hit = self._states.get(key)
        if hit is not None:
            return hit
        if prefix.round == 0:
            st = RLState("", ONE, [0], bdd.TRUE)
        else:
            parent = Position(prefix.variant, prefix.stake, prefix.mu, prefix.moves[:-1],
                              prefix.node[:-1], None, (), prefix.alphabet)
            st = self.state_for(parent)
            st = self._advance(st, prefix.moves[-2].masses, prefix.moves[-1].side, prefix.round - 1)
        self._states[key] = st
        return st

    def _advance(self, st: RLState, masses, side_played: int, rnd: int) -> RLState:
        # recompute a round whose move is already recorded; the decision must match
        new, _ = self._round(st, masses, rnd)
        if new.node[-1] != str(side_played):
            raise SurrogateFailure("recorded move differs from the strategy's choice", {"node": new.node})
        return new

    def _round(self, st: RLState, masses, rnd: int) -> tuple[RLState, int]:
        fam, mu, H = self.family, self.family.mu, self.H
        masses = tuple(q(m) for m in masses)
        t, L = st.node, st.cuts[-1]
        m_t = sum(masses, ZERO) if rnd == 0 else st.mass
        node_mass = mu.mass(t)
        before = surrogate(fam, st.K, L, H, node_mass, m_t, self.floor)
        if not before.ok:
            raise SurrogateFailure("hypothesis fails at the current node",
                                   {"node": t, "round": rnd, "value": before.to_json(),
                                    "cuts": st.cuts})
        choice = choose_side(fam, st.K, t, L, H, masses, node_mass, m_t, self.floor)
        side = choice.side
        forced = False
        if masses[side] == 0:
            side, forced = 1 - side, True
            if not choice.values[side].ok:
                raise SurrogateFailure("forced side fails the stand-ins",
                                       {"node": t, "round": rnd, "choice": choice.to_json()})
        child = t + str(side)
        K1 = bdd.conj(st.K, bdd.cube(child))
        cut = commitment_cutoff(fam, K1, L, H, mu.mass(child), masses[side], self.floor)
        record = {
            "round": rnd,
            "node": child,
            "side": side,
            "forced": forced,
            "chosen": choice.side,
            "chosen_mass_zero": forced and masses[choice.side] == 0,
            "before": before.to_json(),
            "choice": choice.to_json(),
            "cut": cut.to_json(),
        }
        new = RLState(child, masses[side], st.cuts + [cut.cut], cut.K, st.rounds + [record])
        return new, side

    def move(self, pos: Position):
        st = self.state_for(pos)
        try:
            new, side = self._round(st, pos.pending.masses, pos.round)
        except SurrogateFailure as exc:
            self.last_failure = exc.dump
            return Resign("II", f"surrogate failure: {exc}")
        after = pos.apply(MoveII(side))
        self._states[after.key()] = new
        self.last_state = new
        return MoveII(side)

    def blocks(self, st: RLState) -> list[tuple[int, int]]:
        return [(a, b) for a, b in zip(st.cuts, st.cuts[1:])]

    def block_hits(self, st: RLState) -> list[bool]:
        """Whether N_t meets each committed block with positive measure."""
        mu = self.family.mu
        return [mu.measure_of(self.family.block(a, b), st.node) > 0 for a, b in self.blocks(st)]


def rl_strategy(family: EventFamily, D: Fraction, H: int = 64, floor: Fraction = ONE) -> RenyiLampertiII:
    return RenyiLampertiII(family, D, H, floor)


def liminf_surrogate(family: EventFamily, H: int) -> Optional[Fraction]:
    """min over n <= H of sum_{i,j<=n} mu(A_i & A_j) / (sum_{i<=n} mu(A_i))^2."""
    val, _ = window_sums(family, bdd.TRUE, 0, H).ratio_min(ONE)
    return val
