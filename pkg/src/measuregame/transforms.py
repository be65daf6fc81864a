"""Strategy transformations: player swap, countable intersection, real-valued opponents."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Optional, Sequence

from . import bdd
from .certify import CertificateError, extract_scaled_measure, extract_tree
from .game import MoveI, Position, Resign, Strategy, check_masses
from .measure import DyadicMeasure
from .rational import Interval, fmt, open_interval, q, split_within
from .sets import Clopen
from .strategies import OpenCoverII, strategy_I_from_closed

ZERO = Fraction(0)


@dataclass
class Swapped:
    """A strategy for the other player together with the certificate it was built from."""

    strategy: Strategy
    source_certificate: object
    target_stake: Fraction


def swap_strategy(direction: str, source: Strategy, s: Fraction, eps: Optional[Fraction], d: int,
                  mu: DyadicMeasure) -> Swapped:
    """Turn a winning strategy for one player into one for the other player.

    ``I->II``: ``source`` wins G(s, A) for I; the result wins G(1 - s, A^c)
    for II by avoiding everything outside the support of its scaled measure.

    ``II->I``: ``source`` wins G(s - eps, A) for II; the result wins
    G(1 - s, A^c) for I by playing under the tree of runs consistent with it.
    """
    s = q(s)
    if direction == "I->II":
        cert = extract_scaled_measure(source, s, d, mu)
        issues = cert.check()
        if issues:
            raise CertificateError(f"source certificate fails its audit: {issues}")
        cover = bdd.neg(cert.support_clopen())
        target = 1 - s
        return Swapped(OpenCoverII(mu, cover, target), cert, target)
    if direction == "II->I":
        if eps is None:
            raise ValueError("the II->I swap needs eps")
        eps = q(eps)
        source_stake = s - eps
        if not (0 <= source_stake and eps > 0):
            raise ValueError("need 0 < eps <= s")
        cert = extract_tree(source, source_stake, eps / 2, d, mu)
        issues = cert.check(source)
        if issues:
            raise CertificateError(f"source certificate fails its audit: {issues}")
        F = Clopen(cert.frontier_clopen())
        target = 1 - s
        return Swapped(strategy_I_from_closed(mu, F, target), cert, target)
    raise ValueError(f"unknown swap direction {direction!r}")


@dataclass
class Intersected:
    strategy: OpenCoverII
    certificates: list
    cover_measure: Fraction
    budget: Fraction


def intersect_strategies(pairs: Sequence[tuple[Fraction, Strategy]], eps: Fraction, d: int,
                         mu: DyadicMeasure) -> Intersected:
    """II wins G(eps, intersection of A_n) from II winning each G(eps_n, A_n).

    Each source yields a tree T_n whose outside has measure at most
    eps_n + slack_n; II then avoids the union of those outsides.
    """
    eps = q(eps)
    stakes = [q(e) for e, _ in pairs]
    total = sum(stakes, ZERO)
    if not total < eps < 1:
        raise ValueError(f"need sum of stakes {total} < eps {eps} < 1")
    N = max(1, len(pairs))
    slack = (eps - total) / (2 * N)
    certs = []
    outside = bdd.FALSE
    for stake, tau in pairs:
        cert = extract_tree(tau, stake, slack, d, mu)
        issues = cert.check(tau)
        if issues:
            raise CertificateError(f"tree audit failed: {issues}")
        certs.append(cert)
        outside = bdd.disj(outside, bdd.neg(cert.frontier_clopen()))
    measure = mu.measure_of(outside)
    if not measure < eps:
        raise CertificateError(f"combined outside measure {measure} is not below {eps}")
    return Intersected(OpenCoverII(mu, outside, eps), certs, measure, eps)


def as_fraction(x) -> Fraction:
    """Exact value of a Fraction, int or Decimal."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    if isinstance(x, Decimal):
        if not x.is_finite():
            raise ValueError("non-finite move value")
        return Fraction(x)
    raise TypeError(f"unsupported move value {x!r}")


def check_real_move(pos: Position, masses: Sequence) -> Optional[str]:
    """Legality for the game whose masses may be arbitrary reals (given exactly)."""
    bad = check_masses(pos, [as_fraction(m) for m in masses])
    return None if bad is None else str(bad)


def _window(m: Fraction, eps: Fraction) -> Interval:
    return Interval(ZERO, ZERO) if m == 0 else open_interval((1 - eps) * m, m)


class RationalizedII(Strategy):
    """Plays a rational-game strategy against opponents whose moves may be reals.

    Each incoming value m' is shadowed by a rational m with
    (1 - eps) m' < m < m' (0 stays 0); the shadow run is legal in the
    rational game and the wrapped strategy is consulted on it.
    """

    player = "II"
    name = "rationalized"

    def __init__(self, tau: Strategy, s: Fraction, eps: Fraction):
        self.tau = tau
        self.stake = q(s)
        self.eps = q(eps)
        self.variant = tau.variant

    def fresh(self) -> "RationalizedII":
        return RationalizedII(self.tau.fresh(), self.stake, self.eps)

    def paired_position(self, pos: Position) -> Position:
        """The rational shadow of ``pos`` (which may hold real-valued I-moves)."""
        shadow = Position.start(pos.variant, pos.stake, pos.mu, pos.alphabet)
        for mv in pos.moves:
            if isinstance(mv, MoveI):
                real = [as_fraction(m) for m in mv.masses]
                windows = [_window(m, self.eps) for m in real]
                if shadow.round == 0:
                    if not sum(real, ZERO) > self.stake / (1 - self.eps):
                        raise ValueError("first move too small to be served")
                    masses = tuple(w.pick() for w in windows)
                else:
                    masses = split_within(shadow.mass, windows[0], windows[1])
                shadow = shadow.apply(MoveI(tuple(masses)))
            else:
                shadow = shadow.apply(mv)
        return shadow

    def move(self, pos: Position):
        try:
            shadow = self.paired_position(pos)
        except ValueError as exc:
            return Resign("II", f"unservable: {exc}")
        return self.tau.move(shadow)

    @property
    def params(self) -> dict:
        return {"inner": self.tau.to_json(), "stake": fmt(self.stake), "eps": fmt(self.eps)}


def rationalize_strategy(tau: Strategy, s: Fraction, eps: Fraction) -> RationalizedII:
    eps = q(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return RationalizedII(tau, s, eps)


def approximants(masses: Sequence, eps: Fraction) -> tuple:
    """Root shadows chosen independently per side."""
    return tuple(_window(as_fraction(m), q(eps)).pick() for m in masses)
