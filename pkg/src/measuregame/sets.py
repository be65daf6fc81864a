"""Payoff sets: clopen sets, pruned closed trees, open unions, limsups and
boolean combinations of these.

A set answers one question about a cylinder N_t: is it inside the set,
disjoint from it, or neither (``IN`` / ``OUT`` / ``MIXED``).  Boolean
combinations use Kleene logic, which is sound but can report ``MIXED`` for a
cylinder that is in fact decided; finite-depth measure bounds are built on
top of that classification.  Sets that are finitely decided also expose an
exact BDD through :meth:`SetExpr.clopen`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from . import bdd
from .bdd import Node
from .measure import DyadicMeasure

IN = "in"
OUT = "out"
MIXED = "mixed"

ZERO = Fraction(0)


def is_antichain(nodes: Iterable[str]) -> bool:
    items = sorted(set(nodes))
    # sorted order puts a prefix immediately before some extension of it
    for a, b in zip(items, items[1:]):
        if b.startswith(a):
            return False
    return True


def antichain_of(f: Node, prefix: str = "") -> list[str]:
    """Minimal cylinders whose union is the clopen set ``f``."""
    out: list[str] = []

    def walk(t: str, g: Node) -> None:
        if g is bdd.FALSE:
            return
        if g is bdd.TRUE:
            out.append(t)
            return
        j = len(t)
        walk(t + "0", bdd.restrict(g, j, 0))
        walk(t + "1", bdd.restrict(g, j, 1))

    walk(prefix, bdd.restrict_bits(f, prefix))
    return out


def union_of(nodes: Iterable[str]) -> Node:
    return bdd.disj_all(bdd.cube(t) for t in nodes)


class SetExpr:
    """Base class for payoff sets."""

    kind = "abstract"
    truncated = False

    def classify(self, t: str) -> str:  # pragma: no cover - abstract
        raise NotImplementedError

    def clopen(self) -> Optional[Node]:
        """Exact BDD when the set is finitely decided, else ``None``."""
        return None

    def to_json(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError

    def decided_depth(self) -> Optional[int]:
        f = self.clopen()
        return None if f is None else bdd.top_depth(f)

    def __invert__(self) -> "SetExpr":
        return Complement(self)

    def __and__(self, other: "SetExpr") -> "SetExpr":
        return Intersection((self, other))

    def __or__(self, other: "SetExpr") -> "SetExpr":
        return Union((self, other))


class Clopen(SetExpr):
    """A clopen set, stored as a BDD.  ``space`` is 'cantor' or 'pair'."""

    kind = "clopen"

    def __init__(self, node: Node, space: str = "cantor"):
        self.node = node
        self.space = space

    @classmethod
    def of(cls, nodes: Sequence[str], space: str = "cantor") -> "Clopen":
        nodes = list(nodes)
        if not is_antichain(nodes):
            raise ValueError(f"cylinders {nodes} are not pairwise incomparable")
        return cls(union_of(nodes), space)

    @classmethod
    def rectangles(cls, rects: Sequence[tuple[str, str]]) -> "Clopen":
        return cls(bdd.disj_all(bdd.rectangle(u, v) for u, v in rects), "pair")

    @classmethod
    def full(cls, space: str = "cantor") -> "Clopen":
        return cls(bdd.TRUE, space)

    @classmethod
    def empty(cls, space: str = "cantor") -> "Clopen":
        return cls(bdd.FALSE, space)

    def classify(self, t: str) -> str:
        g = bdd.restrict_bits(self.node, t)
        if g is bdd.TRUE:
            return IN
        if g is bdd.FALSE:
            return OUT
        return MIXED

    def clopen(self) -> Node:
        return self.node

    def antichain(self) -> list[str]:
        return antichain_of(self.node)

    def to_json(self) -> dict:
        out = {"kind": "clopen", "nodes": self.antichain()}
        if self.space != "cantor":
            out["space"] = self.space
        return out

    def __repr__(self) -> str:
        return f"Clopen({self.antichain()})"


# -- closed trees ---------------------------------------------------------

def _no_substring(pattern: str) -> Callable[[str], bool]:
    return lambda t: pattern not in t


class ClosedTree(SetExpr):
    """The body [T] of a pruned tree T given by a membership predicate.

    ``full(t)`` may report that every extension of ``t`` is in T; ``node``
    is an exact BDD for [T] when the tree is finitely decided.  Built-in
    trees are reconstructable from ``name`` and ``params``.
    """

    kind = "closed-tree"

    def __init__(self, pred: Callable[[str], bool], full: Optional[Callable[[str], bool]] = None,
                 name: str = "custom", params: Optional[dict] = None, node: Optional[Node] = None):
        self.pred = pred
        self.full = full
        self.name = name
        self.params = dict(params or {})
        self.node = node

    @classmethod
    def no_substring(cls, pattern: str) -> "ClosedTree":
        if not pattern:
            raise ValueError("empty forbidden pattern")
        return cls(_no_substring(pattern), None, "no-substring", {"pattern": pattern})

    @classmethod
    def of_clopen(cls, f: Node, space: str = "cantor") -> "ClosedTree":
        """The tree of nodes t with N_t meeting the clopen set ``f``."""
        pred = lambda t: bdd.restrict_bits(f, t) is not bdd.FALSE
        full = lambda t: bdd.restrict_bits(f, t) is bdd.TRUE
        return cls(pred, full, "clopen", {"set": Clopen(f, space).to_json()}, f)

    @classmethod
    def from_frontier(cls, frontier: Iterable[str]) -> "ClosedTree":
        """Finite tree given by its depth-d frontier; [T] is the union of those cylinders."""
        nodes = sorted(set(frontier))
        depths = {len(t) for t in nodes}
        if len(depths) > 1:
            raise ValueError("frontier nodes must share one depth")
        f = union_of(nodes)
        tree = cls.of_clopen(f)
        tree.name = "frontier"
        tree.params = {"frontier": nodes, "depth": depths.pop() if depths else 0}
        return tree

    def classify(self, t: str) -> str:
        if not self.pred(t):
            return OUT
        if self.full is not None and self.full(t):
            return IN
        return MIXED

    def clopen(self) -> Optional[Node]:
        return self.node

    def to_json(self) -> dict:
        if self.name == "custom":
            raise ValueError("custom closed trees are not serializable")
        return {"kind": "closed-tree", "name": self.name, **self.params}


class OpenUnion(SetExpr):
    """Union of the cylinders listed so far.

    ``complete=False`` marks a growing union that has been cut off: the
    listed part is a lower approximation and no cylinder can be declared
    disjoint from the full union.
    """

    kind = "open-union"

    def __init__(self, nodes: Sequence[str], complete: bool = True):
        self.nodes = tuple(sorted(set(nodes)))
        self.complete = complete
        self.truncated = not complete
        self._node = union_of(self.nodes)

    def classify(self, t: str) -> str:
        g = bdd.restrict_bits(self._node, t)
        if g is bdd.TRUE:
            return IN
        if g is bdd.FALSE and self.complete:
            return OUT
        return MIXED

    def clopen(self) -> Optional[Node]:
        return self._node if self.complete else None

    def to_json(self) -> dict:
        return {"kind": "open-union", "nodes": list(self.nodes), "complete": self.complete}


class LimSup(SetExpr):
    """Points lying in infinitely many of the clopen events, truncated.

    At index horizon H the set is replaced by the intersection over m <= H of
    the unions over m <= i <= H, computed literally; ``truncated`` is set.
    """

    kind = "limsup"
    truncated = True

    def __init__(self, events: Sequence[Node], horizon: Optional[int] = None):
        if not events:
            raise ValueError("limsup of an empty family")
        self.events = list(events)
        self.horizon = len(self.events) - 1 if horizon is None else horizon
        if not 0 <= self.horizon < len(self.events):
            raise ValueError("horizon outside the supplied family")
        H = self.horizon
        tails = []
        for m in range(H + 1):
            tails.append(bdd.disj_all(self.events[m:H + 1]))
        self._node = bdd.conj_all(tails)

    def classify(self, t: str) -> str:
        g = bdd.restrict_bits(self._node, t)
        if g is bdd.TRUE:
            return IN
        if g is bdd.FALSE:
            return OUT
        return MIXED

    def clopen(self) -> Node:
        return self._node

    def to_json(self) -> dict:
        return {
            "kind": "limsup",
            "horizon": self.horizon,
            "events": [antichain_of(e) for e in self.events],
        }


def _kleene_and(values: Iterable[str]) -> str:
    out = IN
    for v in values:
        if v == OUT:
            return OUT
        if v == MIXED:
            out = MIXED
    return out


def _kleene_or(values: Iterable[str]) -> str:
    out = OUT
    for v in values:
        if v == IN:
            return IN
        if v == MIXED:
            out = MIXED
    return out


class Intersection(SetExpr):
    kind = "intersection"

    def __init__(self, parts: Sequence[SetExpr]):
        self.parts = tuple(parts)
        self.truncated = any(p.truncated for p in self.parts)

    def classify(self, t: str) -> str:
        return _kleene_and(p.classify(t) for p in self.parts)

    def clopen(self) -> Optional[Node]:
        nodes = [p.clopen() for p in self.parts]
        if any(n is None for n in nodes):
            return None
        return bdd.conj_all(nodes)

    def to_json(self) -> dict:
        return {"kind": "intersection", "parts": [p.to_json() for p in self.parts]}


class Union(SetExpr):
    kind = "union"

    def __init__(self, parts: Sequence[SetExpr]):
        self.parts = tuple(parts)
        self.truncated = any(p.truncated for p in self.parts)

    def classify(self, t: str) -> str:
        return _kleene_or(p.classify(t) for p in self.parts)

    def clopen(self) -> Optional[Node]:
        nodes = [p.clopen() for p in self.parts]
        if any(n is None for n in nodes):
            return None
        return bdd.disj_all(nodes)

    def to_json(self) -> dict:
        return {"kind": "union", "parts": [p.to_json() for p in self.parts]}


class Complement(SetExpr):
    kind = "complement"

    def __init__(self, part: SetExpr):
        self.part = part
        self.truncated = part.truncated

    def classify(self, t: str) -> str:
        c = self.part.classify(t)
        return OUT if c == IN else IN if c == OUT else MIXED

    def clopen(self) -> Optional[Node]:
        f = self.part.clopen()
        return None if f is None else bdd.neg(f)

    def to_json(self) -> dict:
        return {"kind": "complement", "part": self.part.to_json()}


# -- measure bounds -------------------------------------------------------

@dataclass(frozen=True)
class Bounds:
    lower: Fraction
    upper: Fraction
    truncated: bool = False


def set_measure_bounds(mu: DyadicMeasure, s: SetExpr, d: int) -> Bounds:
    """Enclosure [lower, upper] of the inner and outer measure of ``s``.

    Cylinders classified ``IN`` count toward both bounds, ``MIXED``
    cylinders at depth ``d`` toward the upper bound only.
    """
    if d < 0:
        raise ValueError("depth must be non-negative")
    f = s.clopen()
    if f is not None and bdd.top_depth(f) <= d:
        m = mu.measure_of(f)
        return Bounds(m, m, s.truncated)

    def walk(t: str) -> tuple[Fraction, Fraction]:
        m = mu.mass(t)
        if m == 0:
            return ZERO, ZERO
        c = s.classify(t)
        if c == IN:
            return m, m
        if c == OUT:
            return ZERO, ZERO
        if len(t) >= d:
            return ZERO, m
        lo0, hi0 = walk(t + "0")
        lo1, hi1 = walk(t + "1")
        return lo0 + lo1, hi0 + hi1

    lo, hi = walk("")
    return Bounds(lo, hi, s.truncated)


def exact_measure(mu: DyadicMeasure, s: SetExpr) -> Fraction:
    f = s.clopen()
    if f is None:
        raise ValueError(f"{s.kind} set is not finitely decided")
    return mu.measure_of(f)


# -- serialization --------------------------------------------------------

def from_json(obj: dict) -> SetExpr:
    kind = obj.get("kind")
    if kind == "clopen":
        space = obj.get("space", "cantor")
        return Clopen.of(obj["nodes"], space)
    if kind == "closed-tree":
        name = obj.get("name")
        if name == "no-substring":
            return ClosedTree.no_substring(obj["pattern"])
        if name == "clopen":
            inner = from_json(obj["set"])
            return ClosedTree.of_clopen(inner.clopen(), getattr(inner, "space", "cantor"))
        if name == "frontier":
            return ClosedTree.from_frontier(obj["frontier"])
        raise ValueError(f"unknown closed tree {name!r}")
    if kind == "open-union":
        return OpenUnion(obj["nodes"], bool(obj.get("complete", True)))
    if kind == "limsup":
        events = [union_of(e) for e in obj["events"]]
        return LimSup(events, int(obj["horizon"]))
    if kind == "intersection":
        return Intersection([from_json(p) for p in obj["parts"]])
    if kind == "union":
        return Union([from_json(p) for p in obj["parts"]])
    if kind == "complement":
        return Complement(from_json(obj["part"]))
    raise ValueError(f"unknown set kind {kind!r}")


def parse_shorthand(text: str) -> SetExpr:
    """``clopen:0,11``, ``not:clopen:11``, ``full``, ``empty``, ``no-substring:11``."""
    text = text.strip()
    if text.startswith("not:"):
        return Complement(parse_shorthand(text[4:]))
    if text == "full":
        return Clopen.full()
    if text == "empty":
        return Clopen.empty()
    if text.startswith("clopen:"):
        body = text.split(":", 1)[1]
        nodes = [n for n in body.split(",") if n != ""] if body else []
        if body == "" or body == "-":
            nodes = [""] if body == "-" else []
        return Clopen.of(nodes)
    if text.startswith("no-substring:"):
        return ClosedTree.no_substring(text.split(":", 1)[1])
    raise ValueError(f"unrecognised set shorthand {text!r}")
