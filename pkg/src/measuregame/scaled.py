"""Scaled measures: sub-mass assignments on the binary tree.

A scaled measure M for mu satisfies M(root) > 0, 0 <= M(t) <= mu(N_t) and
M(t) = M(t0) + M(t1).  Instances here are backed either by a finite table
(extended below its depth proportionally to mu) or by an arbitrary
callable, which is how strategies for player I induce them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .measure import DyadicMeasure
from .rational import fmt, q

ZERO = Fraction(0)


def nodes_to_depth(d: int) -> Iterator[str]:
    """All bitstrings of length <= d in breadth-first, then lexicographic, order."""
    level = [""]
    for _ in range(d + 1):
        yield from level
        level = [t + b for t in level for b in "01"]


class ScaledMeasure:
    def __init__(self, mu: DyadicMeasure, fn: Callable[[str], Fraction], name: str = "custom"):
        self.mu = mu
        self._fn = fn
        self._cache: dict[str, Fraction] = {}
        self.name = name

    @classmethod
    def from_table(cls, mu: DyadicMeasure, table: dict[str, Fraction]) -> "ScaledMeasure":
        """Values given on a finite prefix-closed tree; below it, M follows mu proportionally.

        Nodes missing from the table whose parent is listed count as 0
        (their sibling then carries the parent's whole mass).
        """
        tab = {k: q(v) for k, v in table.items()}

        def fn(t: str) -> Fraction:
            if t in tab:
                return tab[t]
            # deepest listed ancestor
            for cut in range(len(t) - 1, -1, -1):
                head = t[:cut]
                if head in tab:
                    if head + t[cut] not in tab and (head + "0" in tab or head + "1" in tab):
                        return ZERO
                    base = mu.mass(head)
                    if base == 0:
                        return ZERO
                    return tab[head] * mu.mass(t) / base
            return ZERO

        out = cls(mu, fn, "table")
        out.table_source = tab
        return out

    @classmethod
    def scaled(cls, mu: DyadicMeasure, c: Fraction) -> "ScaledMeasure":
        """M = c * mu."""
        c = q(c)
        return cls(mu, lambda t: c * mu.mass(t), f"scaled({fmt(c)})")

    def __call__(self, t: str) -> Fraction:
        hit = self._cache.get(t)
        if hit is None:
            hit = q(self._fn(t))
            self._cache[t] = hit
        return hit

    @property
    def root(self) -> Fraction:
        return self("")

    def support(self, d: int) -> list[str]:
        """Nodes of depth <= d with positive value (a prefix-closed tree when M is valid)."""
        out: list[str] = []
        stack = [""]
        while stack:
            t = stack.pop()
            if self(t) <= 0:
                continue
            out.append(t)
            if len(t) < d:
                stack.extend((t + "1", t + "0"))
        return sorted(out, key=lambda s: (len(s), s))

    def frontier(self, n: int) -> list[str]:
        return [t for t in self.support(n) if len(t) == n]

    def level_sum(self, n: int) -> Fraction:
        return sum((self(t) for t in self.frontier(n)), ZERO)

    def table(self, d: int) -> dict[str, Fraction]:
        return {t: self(t) for t in self.support(d)}

    def to_json(self, d: int) -> dict:
        return {"depth": d, "values": {t: fmt(v) for t, v in self.table(d).items()}}


@dataclass
class ValidityReport:
    depth: int
    violations: dict[str, dict] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"depth": self.depth, "ok": self.ok, "violations": self.violations}


def validate_scaled_measure(M: ScaledMeasure, mu: DyadicMeasure, d: int) -> ValidityReport:
    """Check positivity at the root, domination, and additivity to depth ``d``.

    Additivity is checked at nodes of depth < d so that every value read
    lies within depth d.  Only the first violation per rule is kept.
    """
    report = ValidityReport(d)
    root = M("")
    if not root > 0:
        report.violations["root-positive"] = {"node": "", "value": fmt(root)}
    for t in nodes_to_depth(d):
        v = M(t)
        cap = mu.mass(t)
        if "domination" not in report.violations and not (0 <= v <= cap):
            report.violations["domination"] = {"node": t, "value": fmt(v), "bound": fmt(cap)}
        if "additivity" not in report.violations and len(t) < d:
            a, b = M(t + "0"), M(t + "1")
            if a + b != v:
                report.violations["additivity"] = {
                    "node": t, "value": fmt(v), "children": [fmt(a), fmt(b)],
                }
        if len(report.violations) == 3:
            break
    return report


def prune_antichain(M: ScaledMeasure, mu: DyadicMeasure, eps: Fraction, d: int) -> list[str]:
    """Minimal nodes of depth <= d where M drops below eps times mu."""
    out: list[str] = []
    stack = [""]
    while stack:
        t = stack.pop()
        if M(t) < eps * mu.mass(t):
            out.append(t)
        elif len(t) < d:
            stack.extend((t + "1", t + "0"))
    return sorted(out, key=lambda s: (len(s), s))


def prune_scaled_measure(M: ScaledMeasure, mu: DyadicMeasure, eps: Fraction, d: int) -> ScaledMeasure:
    """Remove the mass sitting under nodes where M < eps * mu (searched to depth d).

    The result loses less than eps at the root, and every node of its
    support up to depth d has M(t) >= eps * mu(N_t).
    """
    eps = q(eps)
    if not 0 < eps < M.root:
        raise ValueError(f"pruning level {eps} must lie strictly between 0 and M(root) = {M.root}")
    cut = prune_antichain(M, mu, eps, d)
    cut_set = set(cut)

    def fn(t: str) -> Fraction:
        for i in range(min(len(t), d) + 1):
            if t[:i] in cut_set:
                return ZERO
        if len(t) >= d:
            return M(t)
        return M(t) - sum((M(s) for s in cut if s.startswith(t)), ZERO)

    out = ScaledMeasure(mu, fn, f"pruned({M.name})")
    out.pruned = cut
    return out
