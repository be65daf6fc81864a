"""Positions, move legality, the referee, traces and delta estimation.

Three variants share one engine:

``G``         I splits the current mass between the two children of the
              current node, II picks a child with nonzero mass.
``G2``        the four-quadrant game on a product measure.  Nodes are
              interleaved strings (first coordinate at even positions),
              so quadrant (i, j) appends the two characters ``ij``.
``unfolded``  like ``G`` but II may attach a digit y in {0..k-1} to a move.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence, Union

from . import sets as setexpr
from .measure import DyadicMeasure, from_json as measure_from_json
from .rational import Interval, fmt, q

ZERO = Fraction(0)
VARIANTS = ("G", "G2", "unfolded")


# -- moves ----------------------------------------------------------------

@dataclass(frozen=True)
class MoveI:
    masses: tuple

    def to_json(self) -> dict:
        return {"player": "I", "masses": [fmt(m) if isinstance(m, (Fraction, int)) and not isinstance(m, bool) else repr(m) for m in self.masses]}


@dataclass(frozen=True)
class MoveII:
    side: int
    y: Optional[int] = None

    def to_json(self) -> dict:
        out: dict[str, Any] = {"player": "II", "side": self.side}
        if self.y is not None:
            out["y"] = self.y
        return out


@dataclass(frozen=True)
class Resign:
    player: str
    reason: str = ""

    def to_json(self) -> dict:
        return {"player": self.player, "resign": self.reason}


Move = Union[MoveI, MoveII, Resign]


def move_from_json(obj: dict) -> Move:
    if "resign" in obj:
        return Resign(obj["player"], obj["resign"])
    if obj["player"] == "I":
        return MoveI(tuple(q(m) for m in obj["masses"]))
    return MoveII(int(obj["side"]), obj.get("y"))


def side_code(variant: str, side: int) -> str:
    if variant == "G2":
        return f"{side >> 1}{side & 1}"
    return str(side)


# -- positions ------------------------------------------------------------

@dataclass(frozen=True)
class Position:
    variant: str
    stake: Fraction
    mu: DyadicMeasure = field(compare=False, repr=False)
    moves: tuple = ()
    node: str = ""
    mass: Optional[Fraction] = None
    ys: tuple = ()  # (digit, round) pairs, unfolded only
    alphabet: Optional[int] = None

    @classmethod
    def start(cls, variant: str, stake: Fraction, mu: DyadicMeasure,
              alphabet: Optional[int] = None) -> "Position":
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        stake = q(stake)
        if not 0 <= stake < 1:
            raise ValueError(f"stake {stake} outside [0, 1)")
        return cls(variant, stake, mu, alphabet=alphabet)

    @property
    def arity(self) -> int:
        return 4 if self.variant == "G2" else 2

    @property
    def step(self) -> int:
        return 2 if self.variant == "G2" else 1

    @property
    def round(self) -> int:
        """Number of completed rounds."""
        return len(self.moves) // 2

    @property
    def to_move(self) -> str:
        return "I" if len(self.moves) % 2 == 0 else "II"

    @property
    def pending(self) -> Optional[MoveI]:
        return self.moves[-1] if self.to_move == "II" else None

    def child(self, side: int) -> str:
        return self.node + side_code(self.variant, side)

    def caps(self) -> list[Fraction]:
        return [self.mu.mass(self.child(i)) for i in range(self.arity)]

    @property
    def y_prefix(self) -> tuple:
        return tuple(d for d, _ in self.ys)

    def pair_node(self) -> tuple[str, str]:
        return self.node[0::2], self.node[1::2]

    def apply(self, mv: Move) -> "Position":
        """Extend by ``mv`` without checking legality (see :func:`validate_move`)."""
        if isinstance(mv, MoveI):
            return Position(self.variant, self.stake, self.mu, self.moves + (mv,), self.node,
                            self.mass, self.ys, self.alphabet)
        if isinstance(mv, MoveII):
            pend = self.pending
            ys = self.ys + ((mv.y, self.round),) if mv.y is not None else self.ys
            return Position(self.variant, self.stake, self.mu, self.moves + (mv,),
                            self.child(mv.side), pend.masses[mv.side], ys, self.alphabet)
        raise TypeError("cannot apply a resignation")

    def key(self) -> str:
        parts = [self.variant, fmt(self.stake)]
        for mv in self.moves:
            if isinstance(mv, MoveI):
                parts.append(",".join(fmt(m) for m in mv.masses))
            else:
                parts.append(f"{mv.side}" + ("" if mv.y is None else f"y{mv.y}"))
        return "|".join(parts)

    def history_json(self) -> list:
        return [mv.to_json() for mv in self.moves]


def replay_moves(start: Position, moves: Sequence[Move]) -> Position:
    pos = start
    for mv in moves:
        bad = validate_move(pos, mv)
        if bad is not None:
            raise ValueError(f"illegal move at ply {len(pos.moves)}: {bad}")
        pos = pos.apply(mv)
    return pos


# -- legality -------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    rule: str
    detail: str

    def to_json(self) -> dict:
        return {"rule": self.rule, "detail": self.detail}

    def __str__(self) -> str:
        return f"{self.rule}: {self.detail}"


def legal_interval(cap: Fraction) -> Interval:
    """Allowed values for one child: [0, cap) when cap > 0, else {0}."""
    return Interval(ZERO, cap, False, cap > 0)


def check_masses(pos: Position, masses: Sequence) -> Optional[Violation]:
    if len(masses) != pos.arity:
        return Violation("arity", f"expected {pos.arity} masses, got {len(masses)}")
    for m in masses:
        if isinstance(m, bool) or not isinstance(m, (Fraction, int)):
            return Violation("rational", f"move value {m!r} is not an exact rational")
    caps = pos.caps()
    for i, (m, cap) in enumerate(zip(masses, caps)):
        if m < 0:
            return Violation("nonnegative", f"side {i} mass {fmt(m)} < 0")
        if m > cap:
            return Violation("domination", f"side {i} mass {fmt(m)} > measure {fmt(cap)}")
        if cap > 0 and m == cap:
            return Violation("strictness", f"side {i} mass {fmt(m)} equals measure {fmt(cap)}")
    total = sum(masses, ZERO)
    if pos.round == 0:
        if not total > pos.stake:
            return Violation("first-move-sum", f"sum {fmt(total)} not > stake {fmt(pos.stake)}")
    elif total != pos.mass:
        return Violation("additivity", f"sum {fmt(total)} != current mass {fmt(pos.mass)}")
    return None


def validate_move(pos: Position, mv: Move) -> Optional[Violation]:
    """``None`` when ``mv`` is legal at ``pos``, else the violated rule."""
    if isinstance(mv, Resign):
        return Violation("resigned", mv.reason or f"player {mv.player} resigned")
    if isinstance(mv, MoveI):
        if pos.to_move != "I":
            return Violation("wrong-player", "player II is to move")
        return check_masses(pos, mv.masses)
    if isinstance(mv, MoveII):
        if pos.to_move != "II":
            return Violation("wrong-player", "player I is to move")
        if not isinstance(mv.side, int) or not 0 <= mv.side < pos.arity:
            return Violation("side-range", f"side {mv.side!r} not in 0..{pos.arity - 1}")
        if pos.pending.masses[mv.side] == 0:
            return Violation("zero-side", f"side {mv.side} carries mass 0")
        if mv.y is not None:
            if pos.variant != "unfolded":
                return Violation("y-not-allowed", "auxiliary digits exist only in the unfolded game")
            if pos.alphabet is not None and not (isinstance(mv.y, int) and 0 <= mv.y < pos.alphabet):
                return Violation("y-alphabet", f"digit {mv.y!r} outside 0..{pos.alphabet - 1}")
        return None
    return Violation("unknown-move", repr(mv))


# -- strategies -----------------------------------------------------------

class Strategy:
    """A decision rule for one player.

    Stateless strategies return ``self`` from :meth:`fresh`; stateful ones
    return a copy so that concurrent runs never share state.
    """

    player = "I"
    variant = "G"
    name = "strategy"
    exact_delta = False

    def move(self, pos: Position) -> Move:  # pragma: no cover - abstract
        raise NotImplementedError

    def fresh(self) -> "Strategy":
        return self

    @property
    def params(self) -> dict:
        return {}

    def to_json(self) -> dict:
        return {"kind": self.name, "player": self.player, "params": self.params}

    def first_total(self, pos: Position) -> Optional[Fraction]:
        return None


class ThresholdII(Strategy):
    """II picks the first side whose assigned mass exceeds its threshold.

    Subclasses supply ``thresholds(pos)``.  If no side clears its threshold
    the first nonzero side is taken.  Exact delta values are available
    whenever the current mass exceeds the sum of the thresholds, because
    the fallback can then never fire.
    """

    player = "II"
    exact_delta = True

    def thresholds(self, pos: Position) -> list[Fraction]:  # pragma: no cover - abstract
        raise NotImplementedError

    def thresholds_at(self, pos: Position, r: Fraction) -> list[Fraction]:
        """Thresholds I faces at ``pos`` when its move will total ``r``."""
        return self.thresholds(pos)

    def move(self, pos: Position) -> Move:
        masses = pos.pending.masses
        cs = self.thresholds(pos)
        for j, (m, c) in enumerate(zip(masses, cs)):
            if m > c:
                return MoveII(j)
        for j, m in enumerate(masses):
            if m > 0:
                return MoveII(j)
        return Resign("II", "every side carries mass 0")


class PreferFirstII(ThresholdII):
    """Pick side 0 whenever it is legal."""

    name = "prefer-first"

    def __init__(self, variant: str = "G"):
        self.variant = variant

    def thresholds(self, pos: Position) -> list[Fraction]:
        return [ZERO] * pos.arity


# -- delta estimation -----------------------------------------------------

@dataclass
class DeltaEstimate:
    deltas: list
    witnesses: list  # MoveI or None per side
    exact: bool
    total: Fraction
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "total": fmt(self.total),
            "exact": self.exact,
            "deltas": [fmt(d) for d in self.deltas],
            "witnesses": [None if w is None else w.to_json() for w in self.witnesses],
            "failures": self.failures,
        }


def _total_for(pos: Position, total: Optional[Fraction]) -> Fraction:
    if pos.to_move != "I":
        raise ValueError("delta is taken at a position where I is to move")
    if pos.round == 0:
        if total is None:
            raise ValueError("a root context needs the total of I's first move")
        return q(total)
    return pos.mass


@dataclass(frozen=True)
class SideRegion:
    """Feasible values for one side under a threshold rule, plus the caps used."""

    region: Interval
    caps: tuple
    opens: tuple


def threshold_region(pos: Position, thresholds: Sequence[Fraction], side: int, r: Fraction) -> SideRegion:
    mus = pos.caps()
    caps, opens = [], []
    for j, mu_j in enumerate(mus):
        if j == side:
            caps.append(ZERO)
            opens.append(False)
            continue
        h = min(thresholds[j], mu_j) if j < side else mu_j
        caps.append(h)
        opens.append(h == mu_j and mu_j > 0)
    H = sum(caps, ZERO)
    feasible = Interval(r - H, r, any(opens), False)
    region = feasible & legal_interval(mus[side]) & Interval(thresholds[side], r + 1, True, False)
    return SideRegion(region, tuple(caps), tuple(opens))


def threshold_witness(pos: Position, sr: SideRegion, side: int, r: Fraction, v: Fraction) -> MoveI:
    """Legal move giving ``v`` to ``side`` and spreading the rest within the caps."""
    R = r - v
    H = sum(sr.caps, ZERO)
    masses = []
    for j in range(pos.arity):
        if j == side:
            masses.append(v)
        elif H == 0:
            masses.append(ZERO)
        else:
            masses.append(R * sr.caps[j] / H)
    return MoveI(tuple(masses))


def exact_threshold_delta(tau: ThresholdII, pos: Position, r: Fraction,
                          slack: Optional[Fraction] = None) -> Optional[DeltaEstimate]:
    """Closed-form delta for a threshold rule; ``None`` when it does not apply.

    Witness values are the simplest rational in [delta, delta + slack)
    within the feasible region (default slack: r / 16).
    """
    cs = tau.thresholds_at(pos, r)
    if not r > sum(cs, ZERO):
        return None
    mus = pos.caps()
    if slack is None:
        slack = r / 16
    deltas, witnesses = [], []
    for side in range(pos.arity):
        sr = threshold_region(pos, cs, side, r)
        if sr.region.empty():
            deltas.append(mus[side])
            witnesses.append(None)
            continue
        delta = sr.region.lo
        deltas.append(delta)
        window = sr.region & Interval(delta, delta + slack, False, True)
        v = window.pick()
        witnesses.append(threshold_witness(pos, sr, side, r, v))
    return DeltaEstimate(deltas, witnesses, True, r)


def _spread_move(pos: Position, side: int, v: Fraction, r: Fraction) -> Optional[MoveI]:
    mus = pos.caps()
    rest = [mus[j] for j in range(pos.arity) if j != side]
    H = sum(rest, ZERO)
    R = r - v
    masses = []
    for j in range(pos.arity):
        if j == side:
            masses.append(v)
        elif H == 0:
            masses.append(ZERO)
        else:
            masses.append(R * mus[j] / H)
    mv = MoveI(tuple(masses))
    return mv if check_masses(pos, mv.masses) is None else None


def _picks(tau: Strategy, pos: Position, mv: Optional[MoveI], side: int) -> bool:
    if mv is None:
        return False
    reply = tau.move(pos.apply(mv))
    return isinstance(reply, MoveII) and reply.side == side


def estimate_delta(tau: Strategy, pos: Position, Q: int, total: Optional[Fraction] = None,
                   bisect_steps: int = 16) -> DeltaEstimate:
    """Per-side infimum of the masses at which ``tau`` picks that side.

    Exact-capable strategies answer in closed form.  Otherwise the values
    r*k/Q are scanned, the remainder being spread over the other sides in
    proportion to their measure, and the first hit is refined by bisection
    (sound for threshold-monotone strategies).  The estimate is then the
    smallest value found to elicit the side, with its move as witness.
    """
    if Q < 2:
        raise ValueError("resolution Q must be at least 2")
    r = _total_for(pos, total)
    if tau.exact_delta and isinstance(tau, ThresholdII):
        hit = exact_threshold_delta(tau, pos, r, r / Q)
        if hit is not None:
            return hit
    mus = pos.caps()
    deltas, witnesses, failures = [], [], []
    for side in range(pos.arity):
        best: Optional[tuple[Fraction, MoveI]] = None
        prev_miss: Optional[Fraction] = None
        for k in range(Q + 1):
            v = r * k / Q
            mv = _spread_move(pos, side, v, r)
            if _picks(tau, pos, mv, side):
                best = (v, mv)
                break
            prev_miss = v
        if best is None:
            # the cap itself is never legal, but values just under it may be
            v = r if r < mus[side] else mus[side] - (mus[side] - (prev_miss or ZERO)) / Q
            mv = _spread_move(pos, side, v, r) if v >= 0 else None
            if _picks(tau, pos, mv, side):
                best = (v, mv)
        if best is None:
            deltas.append(mus[side])
            witnesses.append(None)
            failures.append({"side": side, "error": f"no witness found at resolution {Q}"})
            continue
        lo = prev_miss
        hi, hi_move = best
        if lo is not None:
            for _ in range(bisect_steps):
                mid = (lo + hi) / 2
                mv = _spread_move(pos, side, mid, r)
                if _picks(tau, pos, mv, side):
                    hi, hi_move = mid, mv
                else:
                    lo = mid
        deltas.append(hi)
        witnesses.append(hi_move)
    return DeltaEstimate(deltas, witnesses, False, r, failures)


# -- referee and traces ---------------------------------------------------

@dataclass
class Trace:
    variant: str
    stake: Fraction
    measure: dict
    payoff: Optional[dict]
    depth: int
    moves: list = field(default_factory=list)
    audit: list = field(default_factory=list)
    outcome: str = "undecided"
    decided_at: Optional[int] = None
    violation: Optional[dict] = None
    final_node: str = ""
    ys: list = field(default_factory=list)
    alphabet: Optional[int] = None
    liveness: Optional[int] = None
    certificates: list = field(default_factory=list)
    players: dict = field(default_factory=dict)

    @property
    def rounds(self) -> int:
        return sum(1 for mv in self.moves if isinstance(mv, MoveII))

    @property
    def winner(self) -> Optional[str]:
        if self.outcome == "I-decided":
            return "I"
        if self.outcome == "II-decided":
            return "II"
        return None

    def to_json(self) -> dict:
        out = {
            "format": "measuregame.trace/1",
            "variant": self.variant,
            "stake": fmt(self.stake),
            "measure": self.measure,
            "payoff": self.payoff,
            "depth": self.depth,
            "moves": [dict(mv.to_json(), audit=a) for mv, a in zip(self.moves, self.audit)],
            "outcome": self.outcome,
            "decided_at": self.decided_at,
            "violation": self.violation,
            "final_node": self.final_node,
            "players": self.players,
            "certificates": self.certificates,
        }
        if self.variant == "unfolded":
            out["alphabet"] = self.alphabet
            out["ys"] = [[d, k] for d, k in self.ys]
            out["liveness"] = self.liveness
        return out


def _classify(payoff: Optional[setexpr.SetExpr], pos: Position) -> str:
    if payoff is None:
        return setexpr.MIXED
    return payoff.classify(pos.node)


def referee(sigma_I: Strategy, sigma_II: Strategy, s: Fraction, payoff: Optional[setexpr.SetExpr],
            mu: DyadicMeasure, d: int, variant: str = "G", alphabet: Optional[int] = None,
            stop_when_decided: bool = True) -> Trace:
    """Play up to ``d`` rounds and adjudicate what can be decided finitely.

    The run is decided for II when II's node lies inside the payoff, for I
    when it is disjoint from it.  A rule violation or resignation ends the
    run with a loss for the offender.
    """
    if sigma_I.player != "I" or sigma_II.player != "II":
        raise ValueError("strategies are for the wrong players")
    sigma_I, sigma_II = sigma_I.fresh(), sigma_II.fresh()
    pos = Position.start(variant, s, mu, alphabet)
    trace = Trace(variant, pos.stake, mu.to_json(), None if payoff is None else payoff.to_json(), d,
                  alphabet=alphabet, players={"I": _describe(sigma_I), "II": _describe(sigma_II)})
    since_y = 0

    def settle(p: Position) -> bool:
        c = _classify(payoff, p)
        if c == setexpr.MIXED:
            return False
        trace.outcome = "II-decided" if c == setexpr.IN else "I-decided"
        if trace.decided_at is None:
            trace.decided_at = p.round
        return True

    if settle(pos) and stop_when_decided:
        trace.final_node = pos.node
        return trace
    for _ in range(d):
        for player, strat in (("I", sigma_I), ("II", sigma_II)):
            mv = strat.move(pos)
            bad = validate_move(pos, mv)
            if bad is not None:
                trace.violation = {"player": player, "round": pos.round, **bad.to_json()}
                trace.outcome = "II-decided" if player == "I" else "I-decided"
                trace.decided_at = pos.round
                trace.final_node = pos.node
                trace.ys = list(pos.ys)
                if variant == "unfolded":
                    trace.liveness = since_y
                return trace
            trace.moves.append(mv)
            trace.audit.append("ok")
            pos = pos.apply(mv)
        if variant == "unfolded":
            since_y = 0 if trace.moves[-1].y is not None else since_y + 1
        if settle(pos) and stop_when_decided:
            break
    trace.final_node = pos.node
    trace.ys = list(pos.ys)
    if variant == "unfolded":
        trace.liveness = since_y
    if trace.decided_at is None:
        trace.outcome = "undecided"
    return trace


def _describe(strategy: Strategy) -> dict:
    try:
        return strategy.to_json()
    except Exception:  # custom strategies need not serialize
        return {"kind": getattr(strategy, "name", type(strategy).__name__)}


def replay_trace(obj: dict) -> Trace:
    """Re-run the legality checks and adjudication of a serialized trace."""
    variant = obj["variant"]
    mu = measure_from_json(obj["measure"])
    payoff = None if obj.get("payoff") is None else setexpr.from_json(obj["payoff"])
    alphabet = obj.get("alphabet")
    pos = Position.start(variant, q(obj["stake"]), mu, alphabet)
    trace = Trace(variant, pos.stake, obj["measure"], obj.get("payoff"), int(obj["depth"]),
                  alphabet=alphabet, players=obj.get("players", {}),
                  certificates=obj.get("certificates", []))
    since_y = 0

    def settle(p: Position) -> None:
        c = _classify(payoff, p)
        if c != setexpr.MIXED and trace.decided_at is None:
            trace.outcome = "II-decided" if c == setexpr.IN else "I-decided"
            trace.decided_at = p.round

    settle(pos)
    recorded = obj["moves"]
    for entry in recorded:
        mv = move_from_json(entry)
        bad = validate_move(pos, mv)
        if bad is not None:
            raise ValueError(f"recorded move {entry} is illegal: {bad}")
        trace.moves.append(mv)
        trace.audit.append("ok")
        pos = pos.apply(mv)
        if isinstance(mv, MoveII):
            if variant == "unfolded":
                since_y = 0 if mv.y is not None else since_y + 1
            settle(pos)
    viol = obj.get("violation")
    if viol is not None:
        trace.violation = viol
        trace.outcome = "II-decided" if viol["player"] == "I" else "I-decided"
        trace.decided_at = viol["round"]
    trace.final_node = pos.node
    trace.ys = list(pos.ys)
    if variant == "unfolded":
        trace.liveness = since_y
    return trace
