"""Seeded verification suites shared by the command line and the acceptance tests.

Each suite returns a :class:`SuiteReport`: one entry per property with the
number of cases checked and the exact values of the first few failures.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import bdd
from .adversaries import RandomI, adversary_suite, random_split
from .borel_cantelli import (EventFamily, bc_divergence_strategy, liminf_surrogate, min_index_bound,
                             rl_strategy)
from .certify import extract_tree
from .fubini import fub1_transform, fub2_transform, fubini_check
from .game import PreferFirstII, Position, Strategy, referee
from .measure import Bernoulli, DyadicMeasure, Explicit, Fair, Product
from .minimax import grid_minimax
from .rational import fmt
from .scaled import ScaledMeasure, prune_scaled_measure
from .sets import Clopen, ClosedTree, union_of
from .strategies import OpenCoverII, ShrinkingCoverII, decide_by_measure, strategy_I_from_closed
from .unfolding import (CopyFirstII, PairTree, ScaledPlayI, check_unfold_positions, frontier_mass,
                        replay_issues, stabilize, unfold_strategy_I, uniformize, Line)

ZERO = Fraction(0)
MAX_FAILURES = 5


@dataclass
class Property:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)
    failed: int = 0

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def record(self, ok: bool, detail: Optional[dict] = None) -> bool:
        self.checked += 1
        if not ok:
            self.failed += 1
            if len(self.failures) < MAX_FAILURES:
                self.failures.append(detail or {})
        return ok

    def to_json(self) -> dict:
        return {"name": self.name, "checked": self.checked, "failed": self.failed,
                "passed": self.passed, "failures": self.failures}


@dataclass
class SuiteReport:
    suite: str
    params: dict
    properties: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)

    def prop(self, name: str) -> Property:
        for p in self.properties:
            if p.name == name:
                return p
        p = Property(name)
        self.properties.append(p)
        return p

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties) and bool(self.properties)

    def summary(self) -> str:
        parts = [f"{p.name} {p.checked - p.failed}/{p.checked}" for p in self.properties]
        return f"{self.suite}: {'PASS' if self.passed else 'FAIL'} ({'; '.join(parts)})"

    def to_json(self) -> dict:
        return {"format": "measuregame.suite/1", "suite": self.suite, "params": self.params,
                "passed": self.passed, "properties": [p.to_json() for p in self.properties],
                "tables": self.tables}


# -- random instances -----------------------------------------------------

GRID_P = [Fraction(1, 3), Fraction(1, 4), Fraction(2, 5), Fraction(3, 5), Fraction(3, 4), Fraction(2, 3)]


def random_measure(rng: random.Random, explicit_depth: int = 3) -> DyadicMeasure:
    kind = rng.choice(["fair", "bernoulli", "explicit"])
    if kind == "fair":
        return Fair()
    if kind == "bernoulli":
        return Bernoulli(rng.choice(GRID_P))
    words = [format(i, f"0{explicit_depth}b") for i in range(2 ** explicit_depth)]
    raw = [rng.randint(1, 6) for _ in words]
    total = sum(raw)
    return Explicit(explicit_depth, {w: Fraction(r, total) for w, r in zip(words, raw)})


def random_clopen(rng: random.Random, max_depth: int) -> Clopen:
    depth = rng.randint(1, max_depth)
    nodes = ["".join(rng.choice("01") for _ in range(rng.randint((depth + 1) // 2, depth)))
             for _ in range(rng.randint(1, 5))]
    return Clopen(union_of(nodes))


def random_stake(rng: random.Random, avoid: Fraction, den: int = 64) -> Fraction:
    while True:
        s = Fraction(rng.randint(0, den - 1), den)
        if s != avoid:
            return s


# -- suites ---------------------------------------------------------------

def suite_equiv(cases: int = 200, depth: int = 6, n_random: int = 100, seed: int = 0) -> SuiteReport:
    """The measure criterion's winner beats every adversary, decided within the payoff depth."""
    rng = random.Random(seed)
    rep = SuiteReport("equiv", {"cases": cases, "depth": depth, "adversaries": n_random + 2, "seed": seed})
    wins = rep.prop("winner defeats adversary suite")
    for case in range(cases):
        mu = random_measure(rng)
        A = random_clopen(rng, depth)
        comp = mu.measure_of(bdd.neg(A.clopen()))
        s = random_stake(rng, comp)
        dec = decide_by_measure(mu, A, s)
        d = max(1, A.decided_depth() or 0)
        opp = "II" if dec.winner == "I" else "I"
        for adv in adversary_suite(opp, mu, A.clopen(), n_random, seed=case):
            tr = referee(dec.strategy, adv, s, A, mu, d) if dec.winner == "I" \
                else referee(adv, dec.strategy, s, A, mu, d)
            ok = tr.winner == dec.winner and tr.decided_at is not None and tr.decided_at <= d
            wins.record(ok, {"case": case, "measure": mu.to_json(), "payoff": A.to_json(),
                             "stake": fmt(s), "expected": dec.winner, "outcome": tr.outcome,
                             "adversary": adv.to_json()})
    return rep


def suite_oracle(cases: int = 100, Q: int = 16, depth: int = 3, seed: int = 0,
                 max_tries: int = 10_000) -> SuiteReport:
    """Grid backward induction agrees with the measure criterion outside the 2/Q band."""
    rng = random.Random(seed)
    rep = SuiteReport("oracle", {"cases": cases, "Q": Q, "depth": depth, "seed": seed})
    agree = rep.prop("grid minimax agrees")
    matrix = {"I/I": 0, "I/II": 0, "II/I": 0, "II/II": 0}
    banded = 0
    for _ in range(max_tries):
        if agree.checked >= cases:
            break
        mu = random_measure(rng, explicit_depth=min(3, depth))
        A = random_clopen(rng, depth)
        comp = mu.measure_of(bdd.neg(A.clopen()))
        s = random_stake(rng, comp)
        grid = grid_minimax(mu, A, s, Q, depth)
        if grid.inconclusive:
            banded += 1
            continue
        dec = decide_by_measure(mu, A, s)
        matrix[f"{dec.winner}/{grid.winner}"] += 1
        agree.record(grid.winner == dec.winner,
                     {"measure": mu.to_json(), "payoff": A.to_json(), "stake": fmt(s),
                      "complement": fmt(comp), "grid": grid.winner, "measure_winner": dec.winner})
    enough = rep.prop("enough instances outside the band")
    enough.record(agree.checked >= cases, {"found": agree.checked})
    rep.tables["agreement"] = matrix
    rep.tables["skipped_in_band"] = banded
    return rep


def _constructed_II(rng: random.Random, idx: int) -> tuple[Strategy, Fraction, DyadicMeasure]:
    mu = random_measure(rng)
    kind = idx % 3
    if kind == 0:
        return PreferFirstII(), Fraction(rng.randint(0, 15), 16), mu
    if kind == 1:
        while True:
            A = random_clopen(rng, 4)
            comp = mu.measure_of(bdd.neg(A.clopen()))
            if comp < 1:
                break
        s = comp if rng.random() < 0.5 else comp + (1 - comp) * Fraction(rng.randint(0, 7), 8)
        return OpenCoverII(mu, bdd.neg(A.clopen()), s), s, mu
    w = "".join(rng.choice("01") for _ in range(64))
    return ShrinkingCoverII(mu, lambda k, w=w: bdd.cube(w[:k]), f"point:{w}"), ZERO, mu


def suite_certificate(cases: int = 50, depth: int = 6, seed: int = 0) -> SuiteReport:
    """extract_tree's per-level bound holds exactly and every branch replays."""
    rng = random.Random(seed)
    rep = SuiteReport("certificate", {"cases": cases, "depth": depth, "seed": seed})
    bound = rep.prop("level bound")
    replay = rep.prop("branches replay")
    for i in range(cases):
        tau, s, mu = _constructed_II(rng, i)
        eps = (1 - s) * Fraction(rng.randint(1, 7), 8)
        cert = extract_tree(tau, s, eps, depth, mu)
        for n in range(depth + 1):
            limit = s + Fraction(2 ** n - 1, 2 ** n) * eps
            total = cert.level_sum(n)
            bound.record(total <= limit, {"case": i, "strategy": tau.to_json(), "level": n,
                                          "sum": fmt(total), "limit": fmt(limit)})
        issues = cert.replay(tau) + cert.check(tau)
        replay.record(not issues, {"case": i, "strategy": tau.to_json(), "issues": issues[:3]})
    return rep


def suite_numsplit(cases: int = 10_000, seed: int = 0) -> SuiteReport:
    """min a_i c_i / b_i^2 never exceeds sum a / (sum b)^2."""
    rng = random.Random(seed)
    rep = SuiteReport("numsplit", {"cases": cases, "seed": seed})
    ineq = rep.prop("inequality")
    for _ in range(cases):
        n = rng.randint(1, 6)
        a = [Fraction(rng.randint(0, 50), rng.randint(1, 20)) for _ in range(n)]
        b = [Fraction(rng.randint(1, 50), rng.randint(1, 20)) for _ in range(n)]
        raw = [rng.randint(0, 9) for _ in range(n)]
        if not any(raw):
            raw[rng.randrange(n)] = 1
        c = [Fraction(r, sum(raw)) for r in raw]
        _, lhs = min_index_bound(a, b, c)
        rhs = sum(a, ZERO) / sum(b, ZERO) ** 2
        ineq.record(lhs <= rhs, {"a": [fmt(x) for x in a], "b": [fmt(x) for x in b],
                                 "c": [fmt(x) for x in c], "lhs": fmt(lhs), "rhs": fmt(rhs)})
    return rep


def suite_bc(depth: int = 12, stake: Fraction = Fraction(49, 100), eps: Fraction = Fraction(1, 4)) -> SuiteReport:
    """Divergence direction for coordinate events {x_i = 0} with s_i constant."""
    mu = Fair()
    rep = SuiteReport("bc", {"depth": depth, "stake": fmt(stake), "eps": fmt(eps)})
    fam = EventFamily.coordinate(mu, bit=0)
    res = bc_divergence_strategy(fam, lambda i: stake, eps, depth)
    prod = rep.prop("block products below eps_k")
    for k, (L, M) in enumerate(res.schedule.blocks):
        value = (1 - stake) ** (M - L + 1)
        target = eps / 2 ** (k + 2)
        prod.record(value < target and value == res.schedule.products[k],
                    {"block": [L, M], "product": fmt(value), "eps_k": fmt(target)})
    root = rep.prop("certificate root above 1 - eps")
    root.record(res.certificate.root > 1 - eps, {"root": fmt(res.certificate.root)})
    valid = rep.prop("certificate valid")
    issues = res.certificate.check()
    valid.record(not issues, {"issues": issues[:3]})
    hits = rep.prop("support hits every completed block")
    misses = res.hits_every_block(fam)
    hits.record(not misses, {"misses": misses[:5]})
    rep.tables["blocks"] = res.schedule.to_json()
    rep.tables["completed"] = [list(b) for b in res.completed]
    rep.tables["root"] = fmt(res.certificate.root)
    return rep


def rl_ratio_oracle(H: int) -> Fraction:
    """The surrogate for coordinate events under the fair measure, from its closed form.

    With N = n + 1 events the ratio is (N/2 + (N^2 - N)/4) / (N^2/4), which
    decreases in N, so the minimum over n <= H sits at N = H + 1.
    """
    N = H + 1
    return (Fraction(N, 2) + Fraction(N * N - N, 4)) / Fraction(N * N, 4)


def suite_rl(plays: int = 1000, rounds: int = 20, H: int = 64, seed: int = 0,
             blocks: int = 3) -> SuiteReport:
    """The Renyi-Lamperti strategy keeps both stand-ins through every round."""
    mu = Fair()
    fam = EventFamily.coordinate(mu)
    rep = SuiteReport("rl", {"plays": plays, "rounds": rounds, "horizon": H, "seed": seed})
    ratio = liminf_surrogate(fam, H)
    lim = rep.prop("liminf surrogate in [1, 9/8] and equal to the closed form")
    lim.record(ratio is not None and 1 <= ratio <= Fraction(9, 8) and ratio == rl_ratio_oracle(H),
               {"ratio": None if ratio is None else fmt(ratio), "oracle": fmt(rl_ratio_oracle(H))})
    keep = rep.prop("stand-ins hold every round")
    hits = rep.prop(f"first {blocks} blocks hit")
    tau = rl_strategy(fam, Fraction(1), H)
    for i in range(plays):
        adv = RandomI(seed * 1000003 + i, grid_totals=True)
        tr = referee(adv, tau, ZERO, None, mu, rounds)
        run = tau.runs[-1]
        st = run.last_state
        recs = [] if st is None else st.rounds
        ok = (tr.violation is None and len(recs) == rounds
              and all(r["before"]["ok"] and r["choice"]["values"][r["side"]]["ok"] for r in recs))
        keep.record(ok, {"play": i, "violation": tr.violation, "rounds": len(recs),
                         "failure": run.last_failure})
        bh = [] if st is None else run.block_hits(st)
        hits.record(len(bh) >= blocks and all(bh[:blocks]),
                    {"play": i, "cuts": None if st is None else st.cuts, "hits": bh})
        if i == 0 and st is not None:
            rep.tables["rounds"] = [{"round": r["round"], "node": r["node"], "before": r["before"],
                                     "cut": r["cut"]} for r in recs]
    return rep


def _fub_instances(rng: random.Random):
    first = rng.choice([Fair(), Bernoulli(Fraction(1, 3)), Bernoulli(Fraction(3, 5))])
    second = rng.choice([Fair(), Bernoulli(Fraction(1, 4)), Bernoulli(Fraction(2, 3))])
    return Product(first, second)


def suite_fubini(cases: int = 20, depth: int = 6, checks: int = 100, seed: int = 0) -> SuiteReport:
    """Per-round quadrant bounds of both transformers, and the exact Fubini check."""
    rng = random.Random(seed)
    rep = SuiteReport("fubini", {"cases": cases, "depth": depth, "checks": checks, "seed": seed})
    b1 = rep.prop("fub1 quadrant bound")
    f1 = rep.prop("fub1 frontier below eps")
    b2 = rep.prop("fub2 quadrant bound")
    f2 = rep.prop("fub2 frontier at most 1 - beta")
    exact = rep.prop("exact deltas")
    for i in range(cases):
        P = _fub_instances(rng)
        # a null set {x} x Y, avoided through shrinking product cylinders
        w = "".join(rng.choice("01") for _ in range(depth + 2))
        # repeat w so the covers keep shrinking past its length
        tau1 = ShrinkingCoverII(P, lambda k, w=w: bdd.cube((w * (k // len(w) + 1))[:k], lambda j: 2 * j),
                                f"x=({w})^inf", "G2")
        eps = rng.choice([Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)])
        t1 = fub1_transform(tau1, P, eps)
        tr = referee(RandomI(seed * 7919 + i), t1, ZERO, None, P.first, depth)
        run = t1.runs[-1]
        b1.record(tr.violation is None and len(run.history) == depth,
                  {"case": i, "violation": tr.violation, "rounds": len(run.history)})
        for ctx in run.history:
            issues = run.check_context(ctx)
            b1.record(not issues and ctx.q_sum() < eps * ctx.m,
                      {"case": i, "level": ctx.level, "issues": issues[:3]})
            dm = run.dead_mass(ctx)
            f1.record(dm < eps, {"case": i, "level": ctx.level, "dead": fmt(dm)})
            exact.record(ctx.exact, {"case": i, "transformer": "fub1", "level": ctx.level})
        # an open cover of measure at most 1 - eps, won for II by covering it
        eps2 = rng.choice([Fraction(1, 2), Fraction(2, 3)])
        gamma = eps2 / 2
        cover = bdd.rectangle(rng.choice("01"), rng.choice(["0", "1", "00", "11"]))
        tau2 = OpenCoverII(P, cover, 1 - eps2, "G2")
        if P.measure_of(cover) > 1 - eps2:
            cover = bdd.rectangle("00", "00")
            tau2 = OpenCoverII(P, cover, 1 - eps2, "G2")
        t2 = fub2_transform(tau2, P, eps2, gamma)
        s2 = 1 - gamma
        tr = referee(RandomI(seed * 7919 + i + 1), t2, s2, None, P.first, depth)
        run = t2.runs[-1]
        b2.record(tr.violation is None and len(run.history) == depth,
                  {"case": i, "violation": tr.violation, "rounds": len(run.history)})
        for ctx in run.history:
            issues = run.check_context(ctx)
            b2.record(not issues and ctx.q_sum() < (1 - run.beta) * ctx.m,
                      {"case": i, "level": ctx.level, "issues": issues[:3]})
            dm = run.dead_mass(ctx)
            f2.record(dm <= 1 - run.beta, {"case": i, "level": ctx.level, "dead": fmt(dm)})
            exact.record(ctx.exact, {"case": i, "transformer": "fub2", "level": ctx.level})
    fc = rep.prop("fubini_check")
    for j in range(checks):
        P = _fub_instances(rng)
        d = rng.randint(1, 3)
        rects = [("".join(rng.choice("01") for _ in range(rng.randint(0, d))),
                  "".join(rng.choice("01") for _ in range(rng.randint(0, d))))
                 for _ in range(rng.randint(0, 3))]
        A = Clopen(bdd.disj_all(bdd.rectangle(u, v) for u, v in rects))
        r = fubini_check(P, A, d)
        fc.record(r.ok, {"case": j, "rectangles": rects, "report": r.to_json()})
    return rep


def random_scaled(rng: random.Random, mu: DyadicMeasure, d: int) -> ScaledMeasure:
    root = mu.mass("") * Fraction(rng.randint(1, 15), 16)
    table = {"": root}
    stack = [""]
    while stack:
        t = stack.pop()
        if len(t) >= d or table[t] == 0:
            continue
        parts = random_split(rng, table[t], [mu.mass(t + "0"), mu.mass(t + "1")], 8)
        for b, m in zip("01", parts):
            table[t + b] = m
            stack.append(t + b)
    return ScaledMeasure.from_table(mu, table)


def suite_unfold(cases: int = 100, depth: int = 8, seed: int = 0) -> SuiteReport:
    """Pruning, stabilization and the unfolding pipeline for I."""
    rng = random.Random(seed)
    rep = SuiteReport("unfold", {"cases": cases, "depth": depth, "seed": seed})
    prune = rep.prop("prune keeps M(root) - eps")
    for i in range(cases):
        mu = random_measure(rng)
        d = rng.randint(1, 6)
        M = random_scaled(rng, mu, d)
        eps = M.root * Fraction(rng.randint(1, 7), 8)
        P = prune_scaled_measure(M, mu, eps, d)
        prune.record(P.root > M.root - eps, {"case": i, "root": fmt(M.root), "eps": fmt(eps),
                                             "pruned_root": fmt(P.root)})
    stab = rep.prop("stabilize frontier above (1 - beta) frontier(S)")
    disj = rep.prop("stabilize disjointness")
    replay = rep.prop("stabilize positions replay")
    mu = Fair()
    D = 8
    for c in (Fraction(1, 8), Fraction(1, 4), Fraction(3, 8)):
        for kill in (0, 1):
            for kill_side in (0, 1):
                for beta in (Fraction(1, 10), Fraction(1, 3)):
                    sigma = ScaledPlayI(c, kill, kill_side)
                    p = Position.start("unfolded", c / 2, mu, 2)
                    S = Line(sigma, p).support_leaves("", D)
                    floor = c / 2
                    for digit in (0, 1):
                        res = stabilize(sigma, p, S, floor, beta, digit, D)
                        tag = {"c": fmt(c), "kill": kill, "kill_side": kill_side, "beta": fmt(beta),
                               "digit": digit}
                        covered = frontier_mass(mu, res.leaves)
                        stab.record(covered > (1 - beta) * res.frontier_S,
                                    dict(tag, covered=fmt(covered), frontier=fmt(res.frontier_S)))
                        disj.record(res.disjoint(), tag)
                        bad = [m for pos in res.positions.values() for m in replay_issues(sigma, pos)]
                        bad += [u for u, pos in res.positions.items() if pos.y_prefix != (digit,)]
                        replay.record(not bad, dict(tag, issues=bad[:3]))
    # end to end: F = N_11 x anything at s = 1/2
    s = Fraction(1, 2)
    A = Clopen.of(["11"])
    sigma = strategy_I_from_closed(mu, ClosedTree.of_clopen(bdd.neg(A.clopen())), s, variant="unfolded")
    res = unfold_strategy_I(sigma, s, mu, 2, depth)
    levels = rep.prop("frontier at least s + delta/2 at every level")
    for n in range(depth + 1):
        m = res.level_mass(n)
        levels.record(m >= s + res.delta / 2, {"level": n, "mass": fmt(m),
                                                "target": fmt(s + res.delta / 2)})
    pos_ok = rep.prop("canonical positions replay and nest")
    issues = check_unfold_positions(res, sigma)
    pos_ok.record(not issues, {"issues": issues[:3]})
    adv = rep.prop("unfolded strategy defeats adversary suite")
    for opp in adversary_suite("II", mu, A.clopen(), 100, seed=seed):
        tr = referee(res.strategy, opp, s, A, mu, depth)
        adv.record(tr.winner == "I", {"adversary": opp.to_json(), "outcome": tr.outcome})
    rep.tables["steps"] = res.steps
    return rep


def suite_uniformize(eps: Fraction = Fraction(1, 4), depth: int = 8) -> SuiteReport:
    """Selector for R = {y_0 = x_0} from a II strategy copying x_0."""
    mu = Fair()
    rep = SuiteReport("uniformize", {"eps": fmt(eps), "depth": depth})
    R = PairTree.first_digit_equal()
    base = OpenCoverII(mu, bdd.FALSE, variant="unfolded")
    tau = CopyFirstII(base)
    u = uniformize(tau, R, eps, depth, mu)
    rep.prop("monotone").record(not u.monotone(), {"nodes": u.monotone()[:5]})
    rep.prop("R-compatible").record(not u.incompatible(), {"nodes": u.incompatible()[:5]})
    cm = u.complement_mass()
    rep.prop("complement mass at most eps").record(cm <= eps, {"complement": fmt(cm)})
    deep = [n for n in u.table if len(n) == depth]
    rep.prop("table reaches the depth").record(bool(deep), {"deepest": max(map(len, u.table))})
    rep.tables["table"] = u.to_json()["table"]
    return rep


SUITES: dict[str, Callable[..., SuiteReport]] = {
    "equiv": suite_equiv,
    "oracle": suite_oracle,
    "certificate": suite_certificate,
    "numsplit": suite_numsplit,
    "bc": suite_bc,
    "rl": suite_rl,
    "fubini": suite_fubini,
    "unfold": suite_unfold,
    "uniformize": suite_uniformize,
}
