"""The unfolded game: projection, stabilization, unfolding for I, uniformization.

Trees are handled at a fixed working depth D as sets of depth-D leaves
(a node belongs to the tree when some leaf extends it), so every mass
comparison is between finite sums.  Digits of y range over {0..k-1}, and
the reveal enumeration lists the nonempty digit strings of length at most
``y_length`` in length-lexicographic order, so proper prefixes come first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .certify import IIWitness, extract_tree
from .game import MoveI, MoveII, Position, Resign, Strategy, validate_move
from .measure import DyadicMeasure
from .rational import fmt, q
from .sets import OUT, Clopen, SetExpr, union_of
from .strategies import strategy_I_from_closed

ZERO = Fraction(0)


# -- pair trees -----------------------------------------------------------

class PairTree:
    """A closed F in 2^w x k^w given by its compatible finite pairs.

    ``compatible(u, v)`` must be closed under shortening either argument.
    """

    def __init__(self, compatible: Callable[[str, tuple], bool], k: int, name: str,
                 params: Optional[dict] = None, projection: Optional[SetExpr] = None):
        self.compatible = compatible
        self.k = k
        self.name = name
        self.params = params or {}
        self.projection = projection  # the set A of first coordinates, when known

    @classmethod
    def full(cls, k: int = 2) -> "PairTree":
        return cls(lambda u, v: True, k, "full", projection=Clopen.full())

    @classmethod
    def empty(cls, k: int = 2) -> "PairTree":
        return cls(lambda u, v: False, k, "empty", projection=Clopen.empty())

    @classmethod
    def first_digit_equal(cls, k: int = 2) -> "PairTree":
        """R = {(x, y) : y_0 = x_0}."""
        def compatible(u: str, v: tuple) -> bool:
            return not (u and v and v[0] != int(u[0]))
        return cls(compatible, k, "first-digit-equal", projection=Clopen.full())

    @classmethod
    def cylinder_product(cls, X: SetExpr, k: int = 2) -> "PairTree":
        """F = X x k^w for a clopen X."""
        return cls(lambda u, v: X.classify(u) != OUT, k, "product", {"first": X.to_json()}, X)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[str, tuple]], k: int, depth: int) -> "PairTree":
        """Explicit compatible pairs up to ``depth``; deeper pairs are judged by their truncation."""
        allowed = {(u, tuple(v)) for u, v in pairs}

        def compatible(u: str, v: tuple) -> bool:
            return (u[:depth], tuple(v)[:depth]) in allowed
        return cls(compatible, k, "pairs", {"pairs": [[u, list(v)] for u, v in sorted(allowed)],
                                           "depth": depth})

    def to_json(self) -> dict:
        return {"kind": "pair-tree", "name": self.name, "k": self.k, "params": self.params}


def reveal_enumeration(k: int, length: int) -> list[tuple]:
    """Nonempty digit strings over {0..k-1} of length <= ``length``, length-lexicographic."""
    out = []
    for n in range(1, length + 1):
        out.extend(itertools.product(range(k), repeat=n))
    return out


# -- projection -----------------------------------------------------------

def _unfolded_shadow(tau: Strategy, pos: Position, alphabet: Optional[int]) -> Position:
    """The unfolded position behind a G position, with tau's digits filled in."""
    cur = Position.start("unfolded", pos.stake, pos.mu, alphabet)
    for mv in pos.moves:
        if isinstance(mv, MoveII):
            reply = tau.move(cur)
            y = reply.y if isinstance(reply, MoveII) and reply.side == mv.side else None
            cur = cur.apply(MoveII(mv.side, y))
        else:
            cur = cur.apply(mv)
    return cur


class ProjectedII(Strategy):
    """II in G(s, A) obtained by ignoring the digits of y."""

    player = "II"
    name = "projected"

    def __init__(self, tau: Strategy, alphabet: Optional[int] = None):
        self.tau = tau
        self.alphabet = alphabet

    def fresh(self) -> "ProjectedII":
        return ProjectedII(self.tau.fresh(), self.alphabet)

    def shadow(self, pos: Position) -> Position:
        return _unfolded_shadow(self.tau, pos, self.alphabet)

    def move(self, pos: Position):
        reply = self.tau.move(self.shadow(pos))
        if isinstance(reply, MoveII):
            return MoveII(reply.side)
        return reply

    @property
    def params(self) -> dict:
        return {"inner": self.tau.to_json()}


def project_strategy_II(tau: Strategy, alphabet: Optional[int] = None) -> ProjectedII:
    return ProjectedII(tau, alphabet)


class CopyFirstII(Strategy):
    """Unfolded II strategy: sides from ``base``, and y_0 = x_0 sent with the first move.

    With ``repeat`` every later move carries the digit 0, keeping the
    digit stream alive.
    """

    player = "II"
    variant = "unfolded"
    name = "copy-first"

    def __init__(self, base: Strategy, repeat: bool = False):
        self.base = base
        self.repeat = repeat

    def move(self, pos: Position):
        reply = self.base.move(pos)
        if not isinstance(reply, MoveII):
            return reply
        if pos.round == 0:
            return MoveII(reply.side, reply.side)
        return MoveII(reply.side, 0 if self.repeat else None)

    @property
    def params(self) -> dict:
        return {"base": self.base.to_json(), "repeat": self.repeat}


class ConstantDigitII(Strategy):
    """Unfolded II strategy: sides from ``base``, digit ``y`` on every move."""

    player = "II"
    variant = "unfolded"
    name = "constant-digit"

    def __init__(self, base: Strategy, y: int = 0):
        self.base = base
        self.y = y

    def move(self, pos: Position):
        reply = self.base.move(pos)
        if not isinstance(reply, MoveII):
            return reply
        return MoveII(reply.side, self.y)

    @property
    def params(self) -> dict:
        return {"base": self.base.to_json(), "y": self.y}


# -- scaled measures of I along a fixed digit schedule --------------------

class Line:
    """sigma's masses below ``start`` when II reveals ``digit`` on entering ``reveal`` and nothing else.

    ``at(v)`` gives (M(v), position after II entered v) for v extending the
    start node, or (0, None) off the support.
    """

    def __init__(self, sigma: Strategy, start: Position, reveal: Optional[str] = None,
                 digit: Optional[int] = None):
        if start.to_move != "I":
            raise ValueError("a line starts where I is to move")
        self.sigma = sigma
        self.start = start
        self.reveal = reveal
        self.digit = digit
        root_mass = start.mass
        self._cache: dict[str, tuple] = {start.node: (root_mass, start)}
        self._moves: dict[str, MoveI] = {}

    def root_mass(self) -> Fraction:
        mass, _ = self.at(self.start.node)
        if mass is None:
            mv = self._move_at(self.start.node, self.start)
            return ZERO if mv is None else sum(mv.masses, ZERO)
        return mass

    def _move_at(self, v: str, pos: Position) -> Optional[MoveI]:
        hit = self._moves.get(v)
        if hit is None:
            mv = self.sigma.move(pos)
            if not isinstance(mv, MoveI) or validate_move(pos, mv) is not None:
                return None
            self._moves[v] = mv
            hit = mv
        return hit

    def at(self, v: str) -> tuple:
        hit = self._cache.get(v)
        if hit is not None:
            return hit
        base = self.start.node
        if not v.startswith(base) or len(v) <= len(base):
            raise ValueError(f"{v!r} does not extend the line's start {base!r}")
        mass, pos = self.at(v[:-1])
        if pos is None or (mass is not None and mass == 0):
            out = (ZERO, None)
        else:
            mv = self._move_at(v[:-1], pos)
            side = int(v[-1])
            if mv is None or mv.masses[side] == 0:
                out = (ZERO, None)
            else:
                y = self.digit if v == self.reveal else None
                nxt = pos.apply(mv).apply(MoveII(side, y))
                out = (mv.masses[side], nxt)
        self._cache[v] = out
        return out

    def mass(self, v: str) -> Fraction:
        if v == self.start.node and self.start.mass is None:
            return self.root_mass()
        return self.at(v)[0]

    def support_leaves(self, u: str, D: int) -> list[str]:
        """Depth-D nodes below u carrying positive mass."""
        out = []
        stack = [u]
        while stack:
            v = stack.pop()
            if self.mass(v) <= 0:
                continue
            if len(v) >= D:
                out.append(v)
            else:
                stack.extend((v + "1", v + "0"))
        return sorted(out)


# -- stabilization --------------------------------------------------------

def _tree_nodes(leaves) -> set[str]:
    nodes = set()
    for w in leaves:
        for i in range(len(w) + 1):
            nodes.add(w[:i])
    return nodes


def frontier_mass(mu: DyadicMeasure, leaves) -> Fraction:
    return sum((mu.mass(w) for w in leaves), ZERO)


@dataclass
class StabilizeResult:
    leaves: list  # covered depth-D leaves: the tree T
    reveal: dict  # leaf -> reveal node u
    positions: dict  # reveal node -> position right after the revealing move
    masses: list  # covered frontier mass after each iteration
    frontier_S: Fraction
    outside_S: list  # per iteration: depth-D leaves of T_{l} outside S
    iterations: int

    def disjoint(self) -> bool:
        seen: set[str] = set()
        for part in self.outside_S:
            if seen & set(part):
                return False
            seen |= set(part)
        return True

    def to_json(self) -> dict:
        return {
            "leaves": self.leaves,
            "reveal": dict(sorted(self.reveal.items())),
            "masses": [fmt(m) for m in self.masses],
            "frontier_S": fmt(self.frontier_S),
            "iterations": self.iterations,
            "disjoint": self.disjoint(),
        }


class StabilizeError(RuntimeError):
    def __init__(self, message: str, dump: dict):
        super().__init__(message)
        self.dump = dump


def stabilize(sigma: Strategy, p: Position, S_leaves: Sequence[str], eps: Fraction, beta: Fraction,
              digit: int, D: int, max_iter: int = 10_000) -> StabilizeResult:
    """Reveal ``digit`` as early as sigma allows, re-revealing at the nodes it forbids.

    ``S_leaves`` are depth-D leaves below p's node with sigma's no-reveal
    masses above eps * mu along every path.  Iterates until the covered
    frontier exceeds (1 - beta) times the frontier of S.
    """
    eps, beta = q(eps), q(beta)
    mu = p.mu
    t = p.node
    S_leaves = sorted(set(S_leaves))
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    if any(not w.startswith(t) or len(w) != D for w in S_leaves):
        raise ValueError("S must consist of depth-D leaves below the position's node")
    base = Line(sigma, p)
    S_nodes = _tree_nodes(S_leaves)
    for v in S_nodes:
        if len(v) >= len(t) and not base.mass(v) > eps * mu.mass(v):
            raise ValueError(f"floor fails at {v!r}: {fmt(base.mass(v))} <= {fmt(eps)} * {fmt(mu.mass(v))}")
    F_S = frontier_mass(mu, S_leaves)
    result = StabilizeResult([], {}, {}, [], F_S, [], 0)
    if not S_leaves:
        return result
    if len(t) >= D:
        raise ValueError("no room below the position to reveal within the working depth")
    A = [t + b for b in "01" if t + b in S_nodes]
    covered: dict[str, str] = {}
    goal = (1 - beta) * F_S
    covered_mass = ZERO
    while A and not covered_mass > goal:
        if result.iterations >= max_iter:
            raise StabilizeError("iteration cap reached", {"masses": [fmt(m) for m in result.masses]})
        nxt = []
        outside = []
        for u in A:
            line = Line(sigma, p, u, digit)
            _, pos_u = line.at(u)
            sup = line.support_leaves(u, D)
            if not sup:
                raise StabilizeError(f"sigma has no legal continuation after revealing at {u!r}",
                                     {"node": u, "digit": digit})
            sup_nodes = _tree_nodes(sup)
            result.positions[u] = pos_u
            for w in sup:
                if w in S_nodes:
                    if w not in covered:
                        covered[w] = u
                        covered_mass += mu.mass(w)
                else:
                    outside.append(w)
            # nodes of S sigma now forbids, entered without revealing
            stack = [u]
            while stack:
                v = stack.pop()
                if v not in S_nodes:
                    continue
                if v not in sup_nodes:
                    nxt.append(v)
                elif len(v) < D:
                    stack.extend((v + "1", v + "0"))
        result.outside_S.append(sorted(outside))
        result.masses.append(covered_mass)
        result.iterations += 1
        A = sorted(nxt)
    result.leaves = sorted(covered)
    result.reveal = covered
    # keep only positions that some leaf uses
    used = set(covered.values())
    result.positions = {u: pos for u, pos in result.positions.items() if u in used}
    return result


# -- synthetic strategies for I -------------------------------------------

class ScaledPlayI(Strategy):
    """I plays c * mu, except that right after II reveals ``kill`` as the first digit
    the whole mass goes to side ``1 - kill_side``.

    With a kill digit the moves stay legal for the fair measure, where
    c < 1/2 keeps c * mu(v) below mu of either child.
    """

    player = "I"
    variant = "unfolded"
    name = "scaled-play"

    def __init__(self, c: Fraction, kill: Optional[int] = None, kill_side: int = 0):
        self.c = q(c)
        if not 0 < self.c < 1 or (kill is not None and not self.c < Fraction(1, 2)):
            raise ValueError("c must lie in (0, 1), and below 1/2 when a kill digit is set")
        self.kill = kill
        self.kill_side = kill_side

    def move(self, pos: Position):
        caps = pos.caps()
        if pos.round == 0:
            return MoveI(tuple(self.c * cap for cap in caps))
        m = pos.mass
        last = pos.moves[-1]
        if (self.kill is not None and isinstance(last, MoveII) and last.y == self.kill
                and len(pos.ys) == 1):
            out = [ZERO, ZERO]
            out[1 - self.kill_side] = m
            if not m < caps[1 - self.kill_side]:
                return Resign("I", "kill side too small for the current mass")
            return MoveI(tuple(out))
        total = sum(caps, ZERO)
        if total == 0:
            return Resign("I", "no room")
        return MoveI(tuple(m * cap / total for cap in caps))

    @property
    def params(self) -> dict:
        return {"c": fmt(self.c), "kill": self.kill, "kill_side": self.kill_side}


# -- unfolding for I ------------------------------------------------------

@dataclass
class UnfoldResult:
    leaves: list
    depth: int
    target: Fraction
    delta: Fraction
    eta: Fraction
    steps: list
    positions: dict  # (leaf, t) -> position p(leaf, t)
    strategy: Optional[Strategy]
    mu: DyadicMeasure

    def level_mass(self, n: int) -> Fraction:
        nodes = {w[:n] for w in self.leaves}
        return sum((self.mu.mass(v) for v in nodes), ZERO)

    def levels_ok(self, upto: Optional[int] = None) -> list[str]:
        top = self.depth if upto is None else upto
        return [f"level {n}: {fmt(self.level_mass(n))} < {fmt(self.target)}"
                for n in range(top + 1) if self.level_mass(n) < self.target]

    def closed_set(self) -> Clopen:
        return Clopen(union_of(self.leaves))

    def to_json(self) -> dict:
        return {
            "format": "measuregame.unfold/1",
            "depth": self.depth,
            "delta": fmt(self.delta),
            "eta": fmt(self.eta),
            "target": fmt(self.target),
            "leaves": self.leaves,
            "steps": self.steps,
        }


class UnfoldError(RuntimeError):
    def __init__(self, message: str, step: int):
        super().__init__(f"step {step}: {message}")
        self.step = step


def _region_prune(line: Line, u: str, leaves: Sequence[str], eps: Fraction, mu: DyadicMeasure) -> list[str]:
    """Leaves below u whose whole path from u keeps line mass >= eps * mu."""
    keep = []
    for w in leaves:
        ok = line.mass(w) > 0
        for i in range(len(u), len(w) + 1):
            v = w[:i]
            if not ok or line.mass(v) < eps * mu.mass(v):
                ok = False
                break
        if ok:
            keep.append(w)
    return keep


def unfold_strategy_I(sigma: Strategy, s: Fraction, mu: DyadicMeasure, k: int, d: int,
                      y_length: int = 2, depth: Optional[int] = None) -> UnfoldResult:
    """From sigma winning the unfolded game for I, a tree T and I's strategy in G(s, A).

    ``depth`` is the working depth D (default d + y_length, leaving room to
    reveal every enumerated digit string below depth d).
    """
    s = q(s)
    D = d + y_length if depth is None else depth
    start = Position.start("unfolded", s, mu, k)
    M0 = Line(sigma, start)
    root = M0.root_mass()
    delta = root - s
    if not delta > 0:
        raise UnfoldError(f"sigma's first move {fmt(root)} does not exceed the stake", -1)
    target = s + delta / 2
    eta = delta / 4
    leaves = _region_prune(M0, "", M0.support_leaves("", D), eta, mu)
    steps = [{"step": -1, "frontier": fmt(frontier_mass(mu, leaves)), "eps": fmt(eta)}]
    if not frontier_mass(mu, leaves) > target:
        raise UnfoldError("pruned support is not above s + delta/2", -1)
    # regions[t] maps each leaf to (reveal node, position p(leaf, t))
    regions: dict[tuple, dict] = {(): {w: ("", start) for w in leaves}}
    floors: dict[tuple, Fraction] = {(): eta}
    eps_n = eta
    for n, t in enumerate(reveal_enumeration(k, y_length)):
        parent, digit = t[:-1], t[-1]
        F = frontier_mass(mu, leaves)
        beta = (F - target) / (2 * F)
        groups: dict[str, list] = {}
        for w in leaves:
            u, _ = regions[parent][w]
            groups.setdefault(u, []).append(w)
        new_map: dict[str, tuple] = {}
        for u, ws in sorted(groups.items()):
            pos_u = regions[parent][ws[0]][1]
            res = stabilize(sigma, pos_u, ws, floors[parent], beta, digit, D)
            if not res.disjoint():
                raise UnfoldError("reveal supports outside S overlap", n)
            for w in res.leaves:
                r = res.reveal[w]
                new_map[w] = (r, res.positions[r])
        stabilized = sorted(new_map)
        # re-prune each new region at a floor small enough to keep the bound
        eps_try = eps_n / 4
        for _ in range(40):
            kept = []
            by_region: dict[str, list] = {}
            for w in stabilized:
                by_region.setdefault(new_map[w][0], []).append(w)
            for r, ws in by_region.items():
                line = Line(sigma, new_map[ws[0]][1])
                kept.extend(_region_prune(line, r, ws, eps_try, mu))
            if frontier_mass(mu, kept) > target:
                break
            eps_try /= 4
        else:
            raise UnfoldError("no floor keeps the frontier above s + delta/2", n)
        eps_n = eps_try
        kept_set = set(kept)
        leaves = sorted(kept_set)
        for key in regions:
            regions[key] = {w: v for w, v in regions[key].items() if w in kept_set}
        regions[t] = {w: new_map[w] for w in leaves}
        floors[t] = eps_n
        steps.append({"step": n, "t": list(t), "beta": fmt(beta), "eps": fmt(eps_n),
                      "frontier": fmt(frontier_mass(mu, leaves))})
    positions = {(w, key): pos for key, m in regions.items() for w, (_, pos) in m.items()}
    result = UnfoldResult(leaves, D, target, delta, eta, steps, positions, None, mu)
    if not leaves:
        raise UnfoldError("tree became empty", len(steps))
    result.strategy = strategy_I_from_closed(mu, result.closed_set(), s)
    return result


def replay_issues(sigma: Strategy, pos: Position) -> list[str]:
    """Problems replaying ``pos`` from the start: illegal moves, or I's moves not sigma's."""
    cur = Position.start(pos.variant, pos.stake, pos.mu, pos.alphabet)
    for i, mv in enumerate(pos.moves):
        bad = validate_move(cur, mv)
        if bad is not None:
            return [f"move {i}: {bad}"]
        if isinstance(mv, MoveI) and sigma.move(cur) != mv:
            return [f"move {i}: I's move differs from sigma"]
        cur = cur.apply(mv)
    return []


def check_unfold_positions(result: UnfoldResult, sigma: Strategy) -> list[str]:
    """Each stored p(x, t) replays with sigma, follows x, carries the digits t, and extends p(x, prefix)."""
    issues = []
    for (w, t), pos in sorted(result.positions.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        issues.extend(f"{w} {t}: {msg}" for msg in replay_issues(sigma, pos))
        if not w.startswith(pos.node):
            issues.append(f"{w} {t}: position node {pos.node} is not a prefix")
        if pos.y_prefix != tuple(t):
            issues.append(f"{w} {t}: digits {pos.y_prefix} != {t}")
        if t:
            prev = result.positions.get((w, t[:-1]))
            if prev is not None and pos.moves[:len(prev.moves)] != prev.moves:
                issues.append(f"{w} {t}: does not extend the position for {t[:-1]}")
    return issues


# -- uniformization -------------------------------------------------------

@dataclass
class Uniformization:
    witness: IIWitness
    table: dict  # node of T -> tuple of digits
    relation: PairTree
    eps: Fraction

    def monotone(self) -> list[str]:
        bad = []
        for u, y in self.table.items():
            if u and u[:-1] in self.table:
                parent = self.table[u[:-1]]
                if y[:len(parent)] != parent:
                    bad.append(u)
        return sorted(bad)

    def incompatible(self) -> list[str]:
        return sorted(u for u, y in self.table.items() if not self.relation.compatible(u, y))

    def complement_mass(self) -> Fraction:
        return self.witness.complement_mass(self.witness.depth)

    def to_json(self) -> dict:
        return {
            "format": "measuregame.uniformization/1",
            "eps": fmt(self.eps),
            "relation": self.relation.to_json(),
            "complement_mass": fmt(self.complement_mass()),
            "table": {u: "".join(str(d) for d in y)
                      for u, y in sorted(self.table.items(), key=lambda kv: (len(kv[0]), kv[0]))},
        }


def uniformize(tau: Strategy, R: PairTree, eps: Fraction, d: int, mu: DyadicMeasure,
               Q: int = 64) -> Uniformization:
    """A tree of mass > 1 - eps and the digits tau emits along each of its nodes."""
    eps = q(eps)
    proj = ProjectedII(tau, R.k)
    cert = extract_tree(proj, ZERO, eps, d, mu, Q)
    table: dict[str, tuple] = {}
    for u, tn in cert.tree.items():
        if tn.position is None:
            table[u] = ()
            continue
        table[u] = proj.shadow(tn.position).y_prefix
    return Uniformization(cert, table, R, eps)
