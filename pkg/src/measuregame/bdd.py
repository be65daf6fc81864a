"""Reduced ordered binary decision diagrams over the coordinates of 2^omega.

Clopen subsets of Cantor space are exactly the boolean functions that read
finitely many coordinates, so a hash-consed ROBDD gives each clopen set a
unique, cheap-to-compare representation.  Variable ``i`` is coordinate
``x_i``; on the product space the coordinates are interleaved (see
:func:`pair_var`).

Nodes are interned in a process-wide table, so structural equality is
identity and ``uid`` is a stable cache key.
"""

from __future__ import annotations

import threading
from typing import Callable, Iterable, Mapping

_LEAF_VAR = 1 << 30


class Node:
    __slots__ = ("var", "lo", "hi", "uid")

    def __init__(self, var: int, lo: "Node | None", hi: "Node | None", uid: int):
        self.var = var
        self.lo = lo
        self.hi = hi
        self.uid = uid

    def __hash__(self) -> int:
        return self.uid

    def __eq__(self, other: object) -> bool:
        return self is other

    @property
    def is_leaf(self) -> bool:
        return self.var == _LEAF_VAR

    def __repr__(self) -> str:
        if self is TRUE:
            return "TRUE"
        if self is FALSE:
            return "FALSE"
        return f"Node(x{self.var}, #{self.uid})"


FALSE = Node(_LEAF_VAR, None, None, 0)
TRUE = Node(_LEAF_VAR, None, None, 1)

_lock = threading.Lock()
_unique: dict[tuple[int, int, int], Node] = {}
_next_uid = [2]
_apply_cache: dict[tuple[str, int, int], Node] = {}
_restrict_cache: dict[tuple[int, int, int], Node] = {}
_not_cache: dict[int, Node] = {}


def mk(var: int, lo: Node, hi: Node) -> Node:
    if lo is hi:
        return lo
    key = (var, lo.uid, hi.uid)
    node = _unique.get(key)
    if node is not None:
        return node
    with _lock:
        node = _unique.get(key)
        if node is None:
            node = Node(var, lo, hi, _next_uid[0])
            _next_uid[0] += 1
            _unique[key] = node
    return node


def const(value: bool) -> Node:
    return TRUE if value else FALSE


def literal(var: int, bit: int) -> Node:
    return mk(var, FALSE, TRUE) if bit else mk(var, TRUE, FALSE)


def pair_var(coord: int, index: int) -> int:
    """BDD variable for bit ``index`` of coordinate ``coord`` (0 = x, 1 = y)."""
    return 2 * index + coord


def _identity(i: int) -> int:
    return i


def cube(bits: str, var_of: Callable[[int], int] = _identity) -> Node:
    """Indicator of the cylinder fixing bit ``i`` of ``bits`` at ``var_of(i)``."""
    lits = sorted(((var_of(i), int(b)) for i, b in enumerate(bits)), reverse=True)
    node = TRUE
    for v, b in lits:
        node = mk(v, FALSE, node) if b else mk(v, node, FALSE)
    return node


def rectangle(u: str, v: str) -> Node:
    """Indicator of N_u x N_v on the interleaved product space."""
    assignment = {pair_var(0, i): int(b) for i, b in enumerate(u)}
    assignment.update({pair_var(1, i): int(b) for i, b in enumerate(v)})
    node = TRUE
    for var in sorted(assignment, reverse=True):
        node = mk(var, FALSE, node) if assignment[var] else mk(var, node, FALSE)
    return node


_OPS: dict[str, Callable[[bool, bool], bool]] = {
    "and": lambda a, b: a and b,
    "or": lambda a, b: a or b,
    "xor": lambda a, b: a != b,
}


def apply(op: str, f: Node, g: Node) -> Node:
    """Combine two diagrams with a binary boolean operator."""
    if f.is_leaf and g.is_leaf:
        return const(_OPS[op](f is TRUE, g is TRUE))
    if op == "and":
        if f is FALSE or g is FALSE:
            return FALSE
        if f is TRUE:
            return g
        if g is TRUE or f is g:
            return f
    elif op == "or":
        if f is TRUE or g is TRUE:
            return TRUE
        if f is FALSE:
            return g
        if g is FALSE or f is g:
            return f
    a, b = (f, g) if f.uid <= g.uid or op not in ("and", "or", "xor") else (g, f)
    key = (op, a.uid, b.uid)
    hit = _apply_cache.get(key)
    if hit is not None:
        return hit
    var = min(f.var, g.var)
    f0, f1 = (f.lo, f.hi) if f.var == var else (f, f)
    g0, g1 = (g.lo, g.hi) if g.var == var else (g, g)
    out = mk(var, apply(op, f0, g0), apply(op, f1, g1))
    _apply_cache[key] = out
    return out


def conj(f: Node, g: Node) -> Node:
    return apply("and", f, g)


def disj(f: Node, g: Node) -> Node:
    return apply("or", f, g)


def neg(f: Node) -> Node:
    if f is TRUE:
        return FALSE
    if f is FALSE:
        return TRUE
    hit = _not_cache.get(f.uid)
    if hit is None:
        hit = mk(f.var, neg(f.lo), neg(f.hi))
        _not_cache[f.uid] = hit
    return hit


def conj_all(nodes: Iterable[Node]) -> Node:
    out = TRUE
    for n in nodes:
        out = conj(out, n)
        if out is FALSE:
            break
    return out


def disj_all(nodes: Iterable[Node]) -> Node:
    out = FALSE
    for n in nodes:
        out = disj(out, n)
        if out is TRUE:
            break
    return out


def restrict(f: Node, var: int, bit: int) -> Node:
    """Cofactor of ``f`` with ``var`` fixed to ``bit``."""
    if f.is_leaf or f.var > var:
        return f
    if f.var == var:
        return f.hi if bit else f.lo
    key = (f.uid, var, bit)
    hit = _restrict_cache.get(key)
    if hit is None:
        hit = mk(f.var, restrict(f.lo, var, bit), restrict(f.hi, var, bit))
        _restrict_cache[key] = hit
    return hit


def restrict_many(f: Node, assignment: Mapping[int, int]) -> Node:
    for var in sorted(assignment):
        if f.is_leaf:
            break
        f = restrict(f, var, assignment[var])
    return f


def restrict_bits(f: Node, bits: str, var_of: Callable[[int], int] = _identity) -> Node:
    """Restrict ``f`` to the cylinder given by ``bits``."""
    for i, b in enumerate(bits):
        if f.is_leaf:
            break
        f = restrict(f, var_of(i), int(b))
    return f


def evaluate(f: Node, bit_at: Callable[[int], int]) -> bool:
    while not f.is_leaf:
        f = f.hi if bit_at(f.var) else f.lo
    return f is TRUE


def support(f: Node) -> set[int]:
    seen: set[int] = set()
    out: set[int] = set()
    stack = [f]
    while stack:
        n = stack.pop()
        if n.is_leaf or n.uid in seen:
            continue
        seen.add(n.uid)
        out.add(n.var)
        stack.append(n.lo)
        stack.append(n.hi)
    return out


def top_depth(f: Node) -> int:
    """One more than the largest variable read (0 for constants)."""
    vars_ = support(f)
    return max(vars_) + 1 if vars_ else 0


def size(f: Node) -> int:
    seen: set[int] = set()
    stack = [f]
    while stack:
        n = stack.pop()
        if n.uid in seen:
            continue
        seen.add(n.uid)
        if not n.is_leaf:
            stack.append(n.lo)
            stack.append(n.hi)
    return len(seen)


def cubes(f: Node) -> list[dict[int, int]]:
    """Disjoint partial assignments (paths to TRUE) covering ``f``."""
    out: list[dict[int, int]] = []

    def walk(n: Node, path: dict[int, int]) -> None:
        if n is FALSE:
            return
        if n is TRUE:
            out.append(dict(path))
            return
        path[n.var] = 0
        walk(n.lo, path)
        path[n.var] = 1
        walk(n.hi, path)
        del path[n.var]

    walk(f, {})
    return out
