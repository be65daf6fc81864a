"""Command-line entry point: play, replay, decide, certify and verify.

Exit codes: 0 success, 1 a checked property failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import inspect
import json
import os
import sys
from fractions import Fraction
from typing import Optional

from .adversaries import GreedyI, GreedyII, RandomI, RandomII
from .certify import IIWitness, IWitness
from .game import PreferFirstII, Strategy, referee, replay_trace
from .measure import DyadicMeasure
from .measure import from_json as measure_from_json
from .measure import parse_shorthand as measure_shorthand
from .rational import fmt, q
from .sets import SetExpr
from .sets import from_json as set_from_json
from .sets import parse_shorthand as set_shorthand
from .strategies import decide_by_measure
from .suites import SUITES

OK, FAILED, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def emit(obj: dict, out: Optional[str]) -> None:
    text = dump(obj)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _file_or_text(value: str, parse_json, parse_text, what: str):
    try:
        if os.path.exists(value):
            return parse_json(load_json(value))
        return parse_text(value)
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{what} {value!r}: {exc}") from exc


def read_measure(value: str) -> DyadicMeasure:
    return _file_or_text(value, measure_from_json, measure_shorthand, "measure")


def read_payoff(value: str) -> SetExpr:
    return _file_or_text(value, set_from_json, set_shorthand, "payoff")


def read_stake(value: str) -> Fraction:
    try:
        s = q(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"stake {value!r} is not a rational") from exc
    if not 0 <= s < 1:
        raise InputError(f"stake {fmt(s)} must lie in [0, 1)")
    return s


def positive(value: int, what: str) -> int:
    if value is None or value < 1:
        raise InputError(f"{what} must be positive")
    return value


# -- strategies by name ---------------------------------------------------

def make_strategy(spec: str, player: str, mu: DyadicMeasure, payoff: SetExpr, s: Fraction) -> Strategy:
    """``constructed``, ``greedy``, ``greedy-alt``, ``random:SEED`` or ``prefer-first`` (II only)."""
    name, _, arg = spec.partition(":")
    f = payoff.clopen()
    if name == "constructed":
        if f is None:
            raise InputError("a constructed strategy needs a clopen payoff")
        dec = decide_by_measure(mu, payoff, s)
        if dec.winner != player:
            raise InputError(f"player {player} has no winning strategy here (the winner is {dec.winner})")
        return dec.strategy
    if name in ("greedy", "greedy-alt"):
        if f is None:
            raise InputError("greedy strategies need a clopen payoff")
        if player == "I":
            return GreedyI(mu, f, "proportional" if name == "greedy" else "concentrate")
        return GreedyII(mu, f, "conditional" if name == "greedy" else "absolute")
    if name == "random":
        try:
            seed = int(arg or 0)
        except ValueError as exc:
            raise InputError(f"bad seed in {spec!r}") from exc
        return RandomI(seed) if player == "I" else RandomII(seed)
    if name == "prefer-first" and player == "II":
        return PreferFirstII()
    raise InputError(f"unknown strategy {spec!r} for player {player}")


# -- commands -------------------------------------------------------------

def cmd_play(args) -> int:
    mu = read_measure(args.measure)
    payoff = read_payoff(args.payoff)
    s = read_stake(args.stake)
    d = positive(args.depth, "depth")
    sigma = make_strategy(args.player_i, "I", mu, payoff, s)
    tau = make_strategy(args.player_ii, "II", mu, payoff, s)
    trace = referee(sigma, tau, s, payoff, mu, d)
    emit(trace.to_json(), args.out)
    if trace.violation is not None:
        print(f"rule violation by player {trace.violation['player']}: {trace.violation['rule']}",
              file=sys.stderr)
        return FAILED
    return OK


def cmd_replay(args) -> int:
    obj = load_json(args.trace)
    if obj.get("format") != "measuregame.trace/1":
        raise InputError(f"{args.trace}: not a trace file")
    try:
        trace = replay_trace(obj)
    except (KeyError, TypeError) as exc:
        raise InputError(f"{args.trace}: missing or malformed field {exc}") from exc
    except ValueError as exc:
        print(f"{args.trace}: {exc}", file=sys.stderr)
        return FAILED
    again = trace.to_json()
    if args.out:
        emit(again, args.out)
    if dump(again) != dump(obj):
        print(f"{args.trace}: replay differs from the recorded trace", file=sys.stderr)
        return FAILED
    print(f"{args.trace}: replay identical ({trace.outcome})")
    return OK


def cmd_decide(args) -> int:
    mu = read_measure(args.measure)
    payoff = read_payoff(args.payoff)
    s = read_stake(args.stake)
    if payoff.clopen() is None:
        raise InputError(f"unsupported payoff: {payoff.to_json().get('kind')} sets are not clopen")
    dec = decide_by_measure(mu, payoff, s)
    cert = dec.certificate(args.depth)
    issues = cert.check(payoff) if dec.winner == "I" else cert.check(dec.strategy)
    out = {
        "format": "measuregame.decision/1",
        "measure": mu.to_json(),
        "payoff": payoff.to_json(),
        "stake": fmt(s),
        "winner": dec.winner,
        "complement_measure": fmt(dec.measure_of_complement),
        "strategy": dec.strategy.to_json(),
        "certificate": cert.to_json(),
        "certificate_issues": issues,
    }
    emit(out, args.out)
    return FAILED if issues else OK


def cmd_certify(args) -> int:
    obj = load_json(args.certificate)
    if obj.get("format") == "measuregame.decision/1":
        obj = obj["certificate"]
    if obj.get("format") != "measuregame.certificate/1":
        raise InputError(f"{args.certificate}: not a certificate file")
    payoff = read_payoff(args.payoff) if args.payoff else None
    try:
        if obj.get("kind") == "I-witness":
            issues = IWitness.from_json(obj).check(payoff)
        elif obj.get("kind") == "II-witness":
            issues = IIWitness.from_json(obj).check()
        else:
            raise InputError(f"{args.certificate}: unknown certificate kind {obj.get('kind')!r}")
    except (KeyError, TypeError) as exc:
        raise InputError(f"{args.certificate}: missing or malformed field {exc}") from exc
    for line in issues:
        print(line, file=sys.stderr)
    print(f"{args.certificate}: {'valid' if not issues else 'INVALID'}")
    return FAILED if issues else OK


VERIFY_FLAGS = {
    "cases": ("cases", "plays"),
    "depth": ("depth",),
    "horizon": ("H",),
    "rounds": ("rounds",),
    "grid_q": ("Q",),
    "seed": ("seed",),
}


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise InputError(f"unknown suite {args.suite!r}; choose from {', '.join(sorted(SUITES))}")
    fn = SUITES[args.suite]
    accepted = inspect.signature(fn).parameters
    kwargs = {}
    for flag, names in VERIFY_FLAGS.items():
        value = getattr(args, flag)
        if value is None:
            continue
        if flag != "seed":
            positive(value, f"--{flag.replace('_', '-')}")
        target = next((n for n in names if n in accepted), None)
        if target is None:
            raise InputError(f"suite {args.suite} takes no --{flag.replace('_', '-')}")
        kwargs[target] = value
    if args.stake is not None:
        if "stake" not in accepted:
            raise InputError(f"suite {args.suite} takes no --stake")
        kwargs["stake"] = read_stake(args.stake)
    report = fn(**kwargs)
    emit(report.to_json(), args.out)
    print(report.summary(), file=sys.stderr)
    return OK if report.passed else FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="measuregame", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def game_flags(p, stake_required=True):
        p.add_argument("--measure", required=True, help="measure JSON file or shorthand (fair, bernoulli:1/3)")
        p.add_argument("--payoff", required=True, help="set JSON file or shorthand (clopen:0,11, not:clopen:1)")
        p.add_argument("--stake", required=stake_required, help="rational stake in [0, 1)")
        p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("play", help="run the referee between two named strategies")
    game_flags(p)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--player-i", default="constructed")
    p.add_argument("--player-ii", default="greedy")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("replay", help="re-check a trace file")
    p.add_argument("trace")
    p.add_argument("--out")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("decide", help="winner, strategy and certificate for a clopen payoff")
    game_flags(p)
    p.add_argument("--depth", type=int, default=None)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("certify", help="check a certificate file")
    p.add_argument("certificate")
    p.add_argument("--payoff")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--cases", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--horizon", type=int)
    p.add_argument("--rounds", type=int)
    p.add_argument("--grid-q", "--Q", dest="grid_q", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--stake")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
