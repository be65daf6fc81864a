"""Certificates: scaled measures induced by I-strategies and trees built from II-strategies."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .bdd import Node
from .game import (MoveII, Position, Strategy, ThresholdII,
                   estimate_delta, move_from_json, threshold_region,
                   threshold_witness, validate_move)
from .measure import DyadicMeasure, from_json as measure_from_json
from .rational import Interval, fmt, q
from .scaled import ScaledMeasure, validate_scaled_measure
from .sets import IN, SetExpr, union_of

ZERO = Fraction(0)


class CertificateError(ValueError):
    def __init__(self, message: str, position: Optional[Position] = None):
        super().__init__(message)
        self.position = position


# -- player I -------------------------------------------------------------

@dataclass
class IWitness:
    """The scaled measure a strategy for I commits to, tabulated on its support."""

    mu: DyadicMeasure
    stake: Fraction
    depth: int  # rounds
    variant: str
    table: dict

    @property
    def root(self) -> Fraction:
        return self.table[""]

    @property
    def step(self) -> int:
        return 2 if self.variant == "G2" else 1

    def scaled(self) -> ScaledMeasure:
        return ScaledMeasure.from_table(self.mu, self.table)

    def level(self, n: int) -> list[str]:
        """Support nodes after ``n`` rounds."""
        return sorted(t for t, v in self.table.items() if len(t) == n * self.step and v > 0)

    def support_clopen(self) -> Node:
        return union_of(self.level(self.depth))

    def check(self, payoff: Optional[SetExpr] = None) -> list[str]:
        issues = []
        if not self.root > self.stake:
            issues.append(f"root mass {fmt(self.root)} not > stake {fmt(self.stake)}")
        for n in range(self.depth + 1):
            nodes = self.level(n)
            total = sum((self.table[t] for t in nodes), ZERO)
            if total != self.root:
                issues.append(f"level {n} mass {fmt(total)} != root {fmt(self.root)}")
            cover = sum((self.mu.mass(t) for t in nodes), ZERO)
            if not self.root <= cover:
                issues.append(f"level {n} support measure {fmt(cover)} < root")
        report = validate_scaled_measure(self.scaled(), self.mu, self.depth * self.step)
        if not report.ok:
            issues.append(f"invalid scaled measure: {report.violations}")
        if payoff is not None:
            for t in self.level(self.depth):
                if payoff.classify(t) == IN:
                    issues.append(f"support node {t!r} lies inside the payoff")
                    break
        return issues

    def to_json(self) -> dict:
        return {
            "format": "measuregame.certificate/1",
            "kind": "I-witness",
            "variant": self.variant,
            "measure": self.mu.to_json(),
            "stake": fmt(self.stake),
            "depth": self.depth,
            "values": {t: fmt(v) for t, v in sorted(self.table.items(), key=lambda kv: (len(kv[0]), kv[0]))},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "IWitness":
        return cls(measure_from_json(obj["measure"]), q(obj["stake"]), int(obj["depth"]),
                   obj.get("variant", "G"), {t: q(v) for t, v in obj["values"].items()})


def extract_scaled_measure(sigma: Strategy, s: Fraction, d: int, mu: DyadicMeasure,
                           variant: str = "G", alphabet: Optional[int] = None) -> IWitness:
    """Tabulate the scaled measure of ``sigma`` over every legal reply of II to depth ``d``."""
    sigma = sigma.fresh()
    start = Position.start(variant, s, mu, alphabet)
    table: dict[str, Fraction] = {}
    frontier = [start]
    for n in range(d):
        nxt = []
        for pos in frontier:
            mv = sigma.move(pos)
            bad = validate_move(pos, mv)
            if bad is not None:
                raise CertificateError(f"strategy made an illegal move at {pos.node!r}: {bad}", pos)
            if n == 0:
                table[""] = sum(mv.masses, ZERO)
            after = pos.apply(mv)
            for side, m in enumerate(mv.masses):
                child = pos.child(side)
                table[child] = m
                if variant == "G2":
                    half = child[:-1]
                    table[half] = table.get(half, ZERO) + m
                if m > 0:
                    nxt.append(after.apply(MoveII(side)))
        frontier = nxt
    if d == 0:
        mv = sigma.move(start)
        bad = validate_move(start, mv)
        if bad is not None:
            raise CertificateError(f"strategy made an illegal first move: {bad}", start)
        table[""] = sum(mv.masses, ZERO)
    # nodes left out of the table (unreached) carry 0
    cert = IWitness(mu, q(s), d, variant, {t: v for t, v in table.items() if v > 0 or t == ""})
    if not cert.root > cert.stake:
        raise CertificateError(f"root mass {cert.root} does not exceed the stake {s}")
    return cert


# -- player II ------------------------------------------------------------

@dataclass
class TreeNode:
    node: str
    value: Fraction  # m_u
    position: Optional[Position]  # p(u), None for the root
    delta: Optional[list] = None


@dataclass
class IIWitness:
    """A tree T every branch of which is a run consistent with the strategy."""

    mu: DyadicMeasure
    stake: Fraction
    eps: Fraction
    depth: int
    tree: dict  # node -> TreeNode, nodes of T
    exits: dict  # minimal nodes off T -> mu(N_u)
    exact: bool = True
    failures: list = field(default_factory=list)

    def level_nodes(self, n: int) -> list[str]:
        return sorted(u for u in self.tree if len(u) == n)

    def level_sum(self, n: int) -> Fraction:
        inside = sum((self.tree[u].value for u in self.level_nodes(n)), ZERO)
        return inside + self.complement_mass(n)

    def complement_mass(self, n: int) -> Fraction:
        """mu of the level-n nodes outside T."""
        return sum((m for e, m in self.exits.items() if len(e) <= n), ZERO)

    def level_bound(self, n: int) -> Fraction:
        return self.stake + self.eps * (1 - Fraction(1, 2 ** n))

    def frontier_clopen(self, n: Optional[int] = None) -> Node:
        return union_of(self.level_nodes(self.depth if n is None else n))

    def check(self, tau: Optional[Strategy] = None) -> list[str]:
        issues = []
        for n in range(self.depth + 1):
            total = self.level_sum(n)
            if total > self.level_bound(n):
                issues.append(f"level {n}: sum {fmt(total)} > {fmt(self.level_bound(n))}")
            if self.complement_mass(n) > self.stake + self.eps:
                issues.append(f"level {n}: complement mass exceeds stake + eps")
        if tau is not None:
            issues.extend(self.replay(tau))
        return issues

    def replay(self, tau: Strategy) -> list[str]:
        """Every stored position must be a legal run in which tau plays the node."""
        issues = []
        tau = tau.fresh()
        for u, tn in sorted(self.tree.items()):
            if tn.position is None:
                continue
            problem = replay_position(tau, tn.position, u, tn.value)
            if problem:
                issues.append(f"{u!r}: {problem}")
        return issues

    def to_json(self) -> dict:
        return {
            "format": "measuregame.certificate/1",
            "kind": "II-witness",
            "measure": self.mu.to_json(),
            "stake": fmt(self.stake),
            "eps": fmt(self.eps),
            "depth": self.depth,
            "exact": self.exact,
            "tree": {
                u: {
                    "value": fmt(tn.value),
                    "position": None if tn.position is None else tn.position.history_json(),
                }
                for u, tn in sorted(self.tree.items(), key=lambda kv: (len(kv[0]), kv[0]))
            },
            "exits": {e: fmt(m) for e, m in sorted(self.exits.items(), key=lambda kv: (len(kv[0]), kv[0]))},
            "failures": self.failures,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "IIWitness":
        mu = measure_from_json(obj["measure"])
        stake = q(obj["stake"])
        tree = {}
        for u, entry in obj["tree"].items():
            pos = None
            if entry["position"] is not None:
                pos = Position.start("G", stake, mu)
                for mv in entry["position"]:
                    pos = pos.apply(move_from_json(mv))
            tree[u] = TreeNode(u, q(entry["value"]), pos)
        exits = {e: q(m) for e, m in obj["exits"].items()}
        return cls(mu, stake, q(obj["eps"]), int(obj["depth"]), tree, exits,
                   bool(obj.get("exact", True)), obj.get("failures", []))


def replay_position(tau: Strategy, pos: Position, node: str, value: Optional[Fraction] = None) -> str:
    """Empty string when ``pos`` is legal, consistent with ``tau`` and ends at ``node``."""
    cur = Position.start(pos.variant, pos.stake, pos.mu, pos.alphabet)
    for mv in pos.moves:
        bad = validate_move(cur, mv)
        if bad is not None:
            return f"illegal move: {bad}"
        if isinstance(mv, MoveII):
            reply = tau.move(cur)
            if not isinstance(reply, MoveII) or reply.side != mv.side or reply.y != mv.y:
                return f"strategy answers {reply} instead of {mv}"
        cur = cur.apply(mv)
    if cur.node != node:
        return f"position ends at {cur.node!r}"
    if value is not None and cur.mass != value:
        return f"position mass {cur.mass} != recorded value {value}"
    return ""


def _choose_value(region: Interval, delta: Fraction, slack: Fraction) -> Fraction:
    """Value in (delta, delta + slack) within ``region``; delta itself if that is all there is."""
    window = region & Interval(delta, delta + slack, True, True)
    if not window.empty():
        return window.pick()
    return delta


def delta_with_witnesses(tau: Strategy, pos: Position, r: Fraction, slack: Fraction,
                         Q: int) -> tuple[list, list, bool, list]:
    """Per side: (delta, witness value, witness move).  Exact for threshold rules."""
    if isinstance(tau, ThresholdII) and tau.exact_delta:
        cs = tau.thresholds_at(pos, r)
        if r > sum(cs, ZERO):
            deltas, moves = [], []
            for side in range(pos.arity):
                sr = threshold_region(pos, cs, side, r)
                if sr.region.empty():
                    deltas.append(pos.caps()[side])
                    moves.append(None)
                    continue
                delta = sr.region.lo
                v = _choose_value(sr.region, delta, slack)
                deltas.append(delta)
                moves.append(threshold_witness(pos, sr, side, r, v))
            return deltas, moves, True, []
    est = estimate_delta(tau, pos, Q, total=r if pos.round == 0 else None)
    return est.deltas, est.witnesses, False, est.failures


def extract_tree(tau: Strategy, s: Fraction, eps: Fraction, d: int, mu: DyadicMeasure,
                 Q: int = 64) -> IIWitness:
    """Build the tree of runs consistent with ``tau`` level by level.

    The root context uses first moves of total s + eps/4; a child value is
    taken within eps/4^(n+1) of its delta (eps/8 at the root), so level n
    carries at most s + (1 - 2^-n) eps.
    """
    s, eps = q(s), q(eps)
    if not eps > 0:
        raise ValueError("eps must be positive")
    tau = tau.fresh()
    start = Position.start("G", s, mu)
    cert = IIWitness(mu, s, eps, d, {"": TreeNode("", s, None)}, {})
    if mu.mass("") == 0:
        return cert
    frontier = [""]
    for n in range(d):
        nxt = []
        for u in frontier:
            tn = cert.tree[u]
            if n == 0:
                ctx, r, slack = start, min(s + eps / 4, (1 + s) / 2), eps / 8
            else:
                ctx, r, slack = tn.position, tn.value, eps / 4 ** (n + 1)
            deltas, moves, exact, failures = delta_with_witnesses(tau, ctx, r, slack, Q)
            tn.delta = deltas
            if not exact:
                cert.exact = False
            cert.failures.extend({"node": u, **f} for f in failures)
            for side in (0, 1):
                child = u + str(side)
                cap = mu.mass(child)
                mv = moves[side]
                if mv is None or deltas[side] >= cap:
                    cert.exits[child] = cap
                    continue
                after = ctx.apply(mv)
                reply = tau.move(after)
                if not (isinstance(reply, MoveII) and reply.side == side):
                    cert.exact = False
                    cert.failures.append({"node": child, "error": "witness not answered by its side"})
                    cert.exits[child] = cap
                    continue
                cert.tree[child] = TreeNode(child, mv.masses[side], after.apply(reply))
                nxt.append(child)
        frontier = nxt
    return cert
