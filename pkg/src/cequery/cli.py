"""Command-line front end.

    cequery gen       --kind {game,as,path} --n N --seed S [--t T] [--suffix L]
    cequery solve     --solver {regret_matching,exact,greedy_sink} ...
    cequery verify    --game G.json --dist X.json --eps E
    cequery adversary --algo A --n 16..24 --budget 2^12 --trials 20
    cequery htp       --player {random,chaser,chaser_probe} --n N --length L --reveal-quota K --budget T
    cequery sweep     --solver regret_matching --n 4..10 --eps 0.1 --trials 20

JSON is the canonical output; --format csv gives one row per trial or
sweep point.  Errors are written to stderr as a JSON record; exit status 2
means a usage error, 3 a capacity error, 1 a failed verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import re
import sys
from dataclasses import asdict
from fractions import Fraction
from typing import Optional

from .equilibrium import SparseDistribution, verify_ce
from .experiments import AS_ALGORITHMS, htp_trial, polite_trial, regret_matching_sweep, union_bound
from .games import CapacityError, GameInstance, game_from_as, game_from_nnv, random_game
from .hypercube import UsageError, to_bits
from .labeling import EdgeLabeling, make_path_instance, random_as_labeling
from .solvers import SolverRun, exact_ce_run, greedy_sink_search, regret_matching

EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY = 1, 2, 3


class ArgumentError(UsageError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ArgumentError(f"not a rational number: {text!r}")


def parse_count(text: str) -> int:
    """Integer, optionally written as a power such as 2^12."""
    m = re.fullmatch(r"\s*(\d+)\s*\^\s*(\d+)\s*", text)
    if m:
        return int(m.group(1)) ** int(m.group(2))
    try:
        return int(text)
    except ValueError:
        raise ArgumentError(f"not a count: {text!r}")


def parse_dims(text: str) -> list[int]:
    """'8', '4..10' (inclusive) or '16,20,24'."""
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo > hi:
            raise ArgumentError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise ArgumentError(f"not a dimension list: {text!r}")


def parse_threshold(text: Optional[str], n: int, default: Fraction) -> Fraction:
    """A rational, or 'n/d' meaning n divided by d."""
    if text is None:
        return default
    m = re.fullmatch(r"\s*n\s*/\s*(\d+)\s*", text)
    if m:
        return Fraction(n, int(m.group(1)))
    return parse_rational(text)


def cost_report(run: SolverRun) -> dict:
    """Queries made plus support size of the output."""
    t = run.transcript
    return {"queries": t.query_count, "support_size": t.support_size_charged, "cost": t.cost}


def _rat(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _emit(payload, rows, args) -> None:
    if args.format == "csv":
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ArgumentError(f"cannot read {path}: {err}")


def _one_dim(args) -> int:
    dims = parse_dims(args.n)
    if len(dims) != 1:
        raise ArgumentError("this command takes a single --n")
    return dims[0]


def cmd_gen(args) -> int:
    n = _one_dim(args)
    rng = random.Random(args.seed)
    if args.kind == "game":
        payload = random_game(n, args.t, rng).to_json()
    elif args.kind == "as":
        payload = random_as_labeling(n, rng).to_json(seed=args.seed)
    else:
        inst = make_path_instance(n, rng, args.suffix, hamiltonian_prefix=not args.walk_only)
        payload = inst.labeling.to_json(seed=args.seed, path=inst.path)
    _emit(payload, [], args)
    return 0


def _game_from_args(args) -> GameInstance:
    if args.game:
        data = _load_json(args.game)
        if "kind" in data and data["kind"] in ("as", "nnv", "path"):
            lab = EdgeLabeling.from_json(data)
            return game_from_as(lab) if data["kind"] == "as" else game_from_nnv(lab)
        return GameInstance.from_json(data)
    if args.n is None:
        raise ArgumentError("give --game or --n")
    return random_game(_one_dim(args), args.t, random.Random(args.seed))


def _run_json(name: str, run: SolverRun, n: int) -> dict:
    out = run.output
    if isinstance(out, SparseDistribution):
        output = out.to_json()
    elif isinstance(out, int):
        output = to_bits(out, n)
    else:
        output = out
    info = {k: (_rat(v) if isinstance(v, Fraction) else v) for k, v in run.info.items()}
    return {"solver": name, "seed": run.seed, "output": output, "cost": cost_report(run),
            "succeeded": run.succeeded, "info": info}


def cmd_solve(args) -> int:
    if args.solver == "greedy_sink":
        if not args.game:
            raise ArgumentError("greedy_sink needs --game with an 'as' labeling")
        lab = EdgeLabeling.from_json(_load_json(args.game))
        budget = parse_count(args.budget) if args.budget else 1 << lab.n
        run = greedy_sink_search(lab.incident, lab.n, budget)
        _emit(_run_json("greedy_sink", run, lab.n), [], args)
        return 0 if run.succeeded else EXIT_FAIL
    game = _game_from_args(args)
    if args.solver == "regret_matching":
        max_steps = parse_count(args.budget) if args.budget else None
        run = regret_matching(game, parse_rational(args.eps), random.Random(args.seed), max_steps,
                              seed=args.seed)
    else:
        run = exact_ce_run(game)
    _emit(_run_json(args.solver, run, game.n), [], args)
    return 0 if run.succeeded else EXIT_FAIL


def cmd_verify(args) -> int:
    game = _game_from_args(args)
    x = SparseDistribution.from_json(_load_json(args.dist))
    report = verify_ce(x, game, parse_rational(args.eps))
    payload = report.to_json()
    rows = [{"player": r["player"], "b": r["b"], "regret": r["regret"]} for r in payload["regrets"]]
    _emit(payload, rows, args)
    return 0 if report.passed else EXIT_FAIL


def cmd_adversary(args) -> int:
    if args.algo not in AS_ALGORITHMS:
        raise ArgumentError(f"unknown algorithm {args.algo!r}; choose from {sorted(AS_ALGORITHMS)}")
    budget = parse_count(args.budget)
    rows = []
    for n in parse_dims(args.n):
        tc = parse_threshold(args.theta_closure, n, Fraction(n, 8))
        tp = parse_threshold(args.theta_polite, n, Fraction(n, 4))
        for k in range(args.trials):
            trial = polite_trial(args.algo, n, budget, args.seed, k, tc, tp)
            row = trial.row()
            row["theta_closure"], row["theta_polite"] = _rat(tc), _rat(tp)
            rows.append(row)
    summary = {}
    for row in rows:
        s = summary.setdefault(str(row["n"]), {"trials": 0, "wins": 0, "violations": 0, "replay_ok": True})
        s["trials"] += 1
        s["wins"] += row["wins"]
        s["violations"] += row["violations"]
        s["replay_ok"] &= row["replay_ok"]
    _emit({"algo": args.algo, "budget": budget, "seed": args.seed, "by_n": summary, "runs": rows}, rows, args)
    return 0


def cmd_htp(args) -> int:
    n = _one_dim(args)
    budget = parse_count(args.budget)
    trials = [htp_trial(args.player, n, args.length, args.reveal_quota, budget, args.seed, k, args.judge)
              for k in range(args.trials)]
    rows = [asdict(t) for t in trials]
    wins = sum(t.won for t in trials)
    p = wins / len(trials) if trials else 0.0
    payload = {
        "player": args.player, "n": n, "L": args.length, "reveal_quota": args.reveal_quota,
        "budget": budget, "trials": len(trials), "wins": wins, "win_frequency": p,
        "std_error": (p * (1 - p) / len(trials)) ** 0.5 if trials else 0.0,
        "union_bound": union_bound(n, args.length, budget),
        "runs": rows,
    }
    _emit(payload, rows, args)
    return 0


def cmd_sweep(args) -> int:
    if args.solver != "regret_matching":
        raise ArgumentError("sweep supports --solver regret_matching only")
    max_steps = parse_count(args.budget) if args.budget else None
    sweep = regret_matching_sweep(parse_dims(args.n), parse_rational(args.eps), args.trials, args.seed,
                                  args.t, max_steps)
    rows = [asdict(r) for r in sweep]
    _emit({"solver": args.solver, "eps": _rat(parse_rational(args.eps)), "seed": args.seed, "rows": rows},
          rows, args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cequery", description="Query-complexity experiments for correlated equilibria.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, n_required=False):
        sp.add_argument("--n", required=n_required, help="dimension, range a..b, or list a,b,c")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="write here instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    g = sub.add_parser("gen", help="generate a game or labeling instance")
    common(g, True)
    g.add_argument("--kind", choices=("game", "as", "path"), default="game")
    g.add_argument("--t", type=int, default=8, help="bits of utility precision")
    g.add_argument("--suffix", type=int, help="random-walk suffix length for path instances")
    g.add_argument("--walk-only", action="store_true", help="path instance without the Hamiltonian prefix")

    s = sub.add_parser("solve", help="run a solver and report its cost")
    common(s)
    s.add_argument("--solver", choices=("regret_matching", "exact", "greedy_sink"), required=True)
    s.add_argument("--game", help="game or labeling JSON")
    s.add_argument("--eps", default="1/10")
    s.add_argument("--budget", help="max steps (regret matching) or queries (greedy)")
    s.add_argument("--t", type=int, default=8)

    v = sub.add_parser("verify", help="check an epsilon-correlated equilibrium")
    common(v)
    v.add_argument("--game", required=True)
    v.add_argument("--dist", required=True)
    v.add_argument("--eps", default="0")
    v.add_argument("--t", type=int, default=8)

    a = sub.add_parser("adversary", help="polite-wrapped algorithms against the sink adversary")
    common(a, True)
    a.add_argument("--algo", default="greedy_sink")
    a.add_argument("--budget", default="2^12")
    a.add_argument("--trials", type=int, default=20)
    a.add_argument("--theta-closure", help="default n/8")
    a.add_argument("--theta-polite", help="default n/4")

    h = sub.add_parser("htp", help="hit-the-path games")
    common(h, True)
    h.add_argument("--player", choices=("random", "chaser", "chaser_probe"), default="random")
    h.add_argument("--length", type=int, required=True, help="path length L")
    h.add_argument("--reveal-quota", type=int, default=None, help="vertices revealed per step (default n^2)")
    h.add_argument("--budget", default="32")
    h.add_argument("--trials", type=int, default=1000)
    h.add_argument("--judge", choices=("after", "before"), default="after")

    w = sub.add_parser("sweep", help="solver scaling across dimensions")
    common(w, True)
    w.add_argument("--solver", default="regret_matching")
    w.add_argument("--eps", default="1/10")
    w.add_argument("--trials", type=int, default=20)
    w.add_argument("--budget", help="max steps per run")
    w.add_argument("--t", type=int, default=8)
    return p


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "verify": cmd_verify, "adversary": cmd_adversary,
            "htp": cmd_htp, "sweep": cmd_sweep}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "reveal_quota", 0) is None:
            args.reveal_quota = _one_dim(args) ** 2
        return COMMANDS[args.command](args)
    except CapacityError as err:
        sys.stderr.write(json.dumps({"error": "capacity", "message": str(err)}) + "\n")
        return EXIT_CAPACITY
    except UsageError as err:
        sys.stderr.write(json.dumps({"error": "usage", "message": str(err)}) + "\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
