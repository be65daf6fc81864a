"""Probability measures on Cantor space with exact rational node weights.

Every measure answers ``mass(t) = mu(N_t)`` for a bitstring ``t`` and
``measure_of(f)`` for a clopen set given as a BDD.  Measures that are a
product of independent coordinates from some depth on advertise it through
``product_depth`` and ``p1(j)``; the clopen integrator uses that to skip
enumerating cylinders once it is past the explicit part of the measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import bdd
from .bdd import Node
from .rational import fmt, q

ONE = Fraction(1)
ZERO = Fraction(0)
HALF = Fraction(1, 2)


class DyadicMeasure:
    """Base class.  Subclasses set ``kind`` and implement ``_mass``."""

    kind = "abstract"
    product_depth: Optional[int] = None

    def __init__(self) -> None:
        self._mass_cache: dict[str, Fraction] = {}
        self._tail_cache: dict[int, Fraction] = {}
        self._clopen_cache: dict[tuple[int, str], Fraction] = {}

    # -- node weights -----------------------------------------------------
    def mass(self, t: str) -> Fraction:
        hit = self._mass_cache.get(t)
        if hit is None:
            hit = self._mass(t)
            self._mass_cache[t] = hit
        return hit

    def _mass(self, t: str) -> Fraction:  # pragma: no cover - abstract
        raise NotImplementedError

    def p1(self, j: int) -> Fraction:
        """Conditional probability that coordinate ``j`` is 1 (product tail only)."""
        raise NotImplementedError

    def children(self, t: str) -> tuple[Fraction, Fraction]:
        return self.mass(t + "0"), self.mass(t + "1")

    # -- clopen sets ------------------------------------------------------
    def measure_of(self, f: Node, t: str = "") -> Fraction:
        """mu(f intersected with N_t), exactly."""
        f = bdd.restrict_bits(f, t)
        return self._integrate(f, t)

    def _integrate(self, f: Node, t: str) -> Fraction:
        if f is bdd.FALSE:
            return ZERO
        m = self.mass(t)
        if f is bdd.TRUE or m == 0:
            return m if f is bdd.TRUE else ZERO
        j = len(t)
        if self.product_depth is not None and j >= self.product_depth:
            return m * self._tail_probability(f)
        key = (f.uid, t)
        hit = self._clopen_cache.get(key)
        if hit is None:
            hit = (self._integrate(bdd.restrict(f, j, 0), t + "0")
                   + self._integrate(bdd.restrict(f, j, 1), t + "1"))
            self._clopen_cache[key] = hit
        return hit

    def _tail_probability(self, f: Node) -> Fraction:
        # only called when every variable of f lies in the product tail
        if f is bdd.TRUE:
            return ONE
        if f is bdd.FALSE:
            return ZERO
        hit = self._tail_cache.get(f.uid)
        if hit is None:
            p = self.p1(f.var)
            hit = p * self._tail_probability(f.hi) + (1 - p) * self._tail_probability(f.lo)
            self._tail_cache[f.uid] = hit
        return hit

    # -- plumbing ---------------------------------------------------------
    def to_json(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError

    def describe(self) -> str:
        return self.kind

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DyadicMeasure) and self.to_json() == other.to_json()

    def __hash__(self) -> int:
        return hash(repr(sorted(self.to_json().items())))

    def __repr__(self) -> str:
        return f"<{self.describe()}>"


class Bernoulli(DyadicMeasure):
    """Independent coordinates; each is 1 with probability ``p``."""

    kind = "bernoulli"
    product_depth = 0

    def __init__(self, p: Fraction):
        super().__init__()
        p = q(p)
        if not 0 <= p <= 1:
            raise ValueError(f"bernoulli parameter {p} outside [0, 1]")
        self.p = p

    def _mass(self, t: str) -> Fraction:
        ones = t.count("1")
        return self.p ** ones * (1 - self.p) ** (len(t) - ones)

    def p1(self, j: int) -> Fraction:
        return self.p

    def to_json(self) -> dict:
        return {"kind": "bernoulli", "p": fmt(self.p)}

    def describe(self) -> str:
        return f"bernoulli({self.p})"


class Fair(Bernoulli):
    kind = "fair"

    def __init__(self) -> None:
        super().__init__(HALF)

    def _mass(self, t: str) -> Fraction:
        return Fraction(1, 1 << len(t))

    def to_json(self) -> dict:
        return {"kind": "fair"}

    def describe(self) -> str:
        return "fair"


@dataclass(frozen=True)
class Point:
    """An eventually periodic point: ``prefix`` then ``cycle`` forever."""

    prefix: str
    cycle: str

    def __post_init__(self) -> None:
        if not self.cycle:
            raise ValueError("point cycle must be non-empty")
        if set(self.prefix + self.cycle) - {"0", "1"}:
            raise ValueError("points are bitstrings")

    def bit(self, i: int) -> int:
        if i < len(self.prefix):
            return int(self.prefix[i])
        return int(self.cycle[(i - len(self.prefix)) % len(self.cycle)])

    def head(self, n: int) -> str:
        return "".join(str(self.bit(i)) for i in range(n))

    def to_json(self) -> dict:
        return {"prefix": self.prefix, "cycle": self.cycle}


class Atoms(DyadicMeasure):
    """A finite convex combination of point masses."""

    kind = "atoms"
    product_depth = None

    def __init__(self, atoms: list[tuple[Fraction, Point]]):
        super().__init__()
        if not atoms:
            raise ValueError("need at least one atom")
        total = sum((q(w) for w, _ in atoms), ZERO)
        if total != 1 or any(q(w) < 0 for w, _ in atoms):
            raise ValueError("atom weights must be non-negative and sum to 1")
        self.atoms = [(q(w), pt) for w, pt in atoms]

    def _mass(self, t: str) -> Fraction:
        n = len(t)
        return sum((w for w, pt in self.atoms if pt.head(n) == t), ZERO)

    def measure_of(self, f: Node, t: str = "") -> Fraction:
        n = len(t)
        return sum(
            (w for w, pt in self.atoms if pt.head(n) == t and bdd.evaluate(f, pt.bit)),
            ZERO,
        )

    def to_json(self) -> dict:
        return {
            "kind": "atoms",
            "atoms": [{"weight": fmt(w), **pt.to_json()} for w, pt in self.atoms],
        }

    def describe(self) -> str:
        return f"atoms({len(self.atoms)})"


class Explicit(DyadicMeasure):
    """Weights given for every node at ``depth``; Bernoulli(``p``) below."""

    kind = "explicit"

    def __init__(self, depth: int, weights: dict[str, Fraction], p: Fraction = HALF):
        super().__init__()
        if depth < 0:
            raise ValueError("depth must be non-negative")
        table = {k: q(v) for k, v in weights.items()}
        for key in table:
            if len(key) != depth or set(key) - {"0", "1"}:
                raise ValueError(f"table key {key!r} is not a depth-{depth} node")
        if any(v < 0 for v in table.values()):
            raise ValueError("negative weight")
        if sum(table.values(), ZERO) != 1:
            raise ValueError("explicit weights must sum to 1")
        self.depth = depth
        self.table = table
        self.p = q(p)
        self.product_depth = depth

    def _mass(self, t: str) -> Fraction:
        n = len(t)
        if n >= self.depth:
            head = self.table.get(t[: self.depth], ZERO)
            tail = t[self.depth:]
            ones = tail.count("1")
            return head * self.p ** ones * (1 - self.p) ** (len(tail) - ones)
        return sum((v for k, v in self.table.items() if k.startswith(t)), ZERO)

    def p1(self, j: int) -> Fraction:
        return self.p

    def to_json(self) -> dict:
        return {
            "kind": "explicit",
            "depth": self.depth,
            "p": fmt(self.p),
            "weights": {k: fmt(v) for k, v in sorted(self.table.items())},
        }

    def describe(self) -> str:
        return f"explicit(depth={self.depth})"


def split_pair(z: str) -> tuple[str, str]:
    """Interleaved product string -> (first coordinates, second coordinates)."""
    return z[0::2], z[1::2]


def join_pair(u: str, v: str) -> str:
    """Inverse of :func:`split_pair`; ``len(u)`` must be ``len(v)`` or one more."""
    if not (len(u) == len(v) or len(u) == len(v) + 1):
        raise ValueError("pair strings must be balanced")
    out = []
    for i in range(len(u)):
        out.append(u[i])
        if i < len(v):
            out.append(v[i])
    return "".join(out)


class Product(DyadicMeasure):
    """mu_x times mu_y on interleaved coordinates z_{2i} = x_i, z_{2i+1} = y_i."""

    kind = "product"

    def __init__(self, first: DyadicMeasure, second: DyadicMeasure):
        super().__init__()
        self.first = first
        self.second = second
        if first.product_depth is not None and second.product_depth is not None:
            self.product_depth = 2 * max(first.product_depth, second.product_depth)
        else:
            self.product_depth = None

    def _mass(self, z: str) -> Fraction:
        u, v = split_pair(z)
        return self.first.mass(u) * self.second.mass(v)

    def rect(self, u: str, v: str) -> Fraction:
        return self.first.mass(u) * self.second.mass(v)

    def p1(self, j: int) -> Fraction:
        return self.first.p1(j // 2) if j % 2 == 0 else self.second.p1(j // 2)

    def to_json(self) -> dict:
        return {"kind": "product", "first": self.first.to_json(), "second": self.second.to_json()}

    def describe(self) -> str:
        return f"{self.first.describe()} x {self.second.describe()}"


def fair() -> Fair:
    return Fair()


def bernoulli(p: Fraction) -> Bernoulli:
    return Bernoulli(p)


def from_json(obj: dict) -> DyadicMeasure:
    kind = obj.get("kind")
    if kind == "fair":
        return Fair()
    if kind == "bernoulli":
        return Bernoulli(q(obj["p"]))
    if kind == "atoms":
        return Atoms([
            (q(a["weight"]), Point(a.get("prefix", ""), a["cycle"])) for a in obj["atoms"]
        ])
    if kind == "explicit":
        return Explicit(int(obj["depth"]), {k: q(v) for k, v in obj["weights"].items()},
                        q(obj.get("p", "1/2")))
    if kind == "product":
        return Product(from_json(obj["first"]), from_json(obj["second"]))
    raise ValueError(f"unknown measure kind {kind!r}")


def parse_shorthand(text: str) -> DyadicMeasure:
    """``fair``, ``bernoulli:1/3`` or ``fair*bernoulli:1/3`` (a product)."""
    text = text.strip()
    if "*" in text:
        a, b = text.split("*", 1)
        return Product(parse_shorthand(a), parse_shorthand(b))
    if text == "fair":
        return Fair()
    if text.startswith("bernoulli:"):
        return Bernoulli(q(text.split(":", 1)[1]))
    raise ValueError(f"unrecognised measure shorthand {text!r}")


def cylinder_mass(mu: DyadicMeasure, t: str) -> Fraction:
    return mu.mass(t)
