"""Trial runners shared by the command line and the acceptance tests.

Trial i of an experiment with master seed s draws its randomness from
``random.Random(trial_seed(s, i))``, where trial_seed hashes "s:i" with
SHA-256.  Results therefore do not depend on how trials are scheduled.
"""

from __future__ import annotations

import hashlib
import random
import statistics
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Optional

from .adversaries import ASAdversaryState, HTPState, as_answer, as_finalize, polite_wrap, replay_matches
from .games import random_game
from .hypercube import random_walk
from .labeling import in_degree
from .solvers import (greedy_from, htp_random_prober, neighbor_sweep, random_prober, random_walker,
                      regret_matching, tail_chaser)


def trial_seed(master: int, index: int) -> int:
    digest = hashlib.sha256(f"{master}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def trial_rng(master: int, index: int) -> random.Random:
    return random.Random(trial_seed(master, index))


AS_ALGORITHMS: dict[str, Callable[[random.Random, int], Callable]] = {
    "greedy_sink": lambda rng, n: greedy_from(rng.getrandbits(n)),
    "random_prober": lambda rng, n: random_prober(rng),
    "random_walker": lambda rng, n: random_walker(rng),
    "neighbor_sweep": lambda rng, n: neighbor_sweep(rng),
}


@dataclass
class PoliteTrial:
    algo: str
    n: int
    trial: int
    seed: int
    budget: int
    issued: int
    inner_queries: int
    violations: int
    max_in_degree: int
    wins: int
    replay_ok: bool
    closure_bound_ok: bool
    halted: str  # "budget", "peel" (no polite order exists) or "done"

    def row(self) -> dict:
        return asdict(self)


def polite_trial(algo: str, n: int, budget: int, master: int, index: int,
                 theta_closure=None, theta_polite=None) -> PoliteTrial:
    """One wrapped algorithm against the outward-orienting adversary.

    Wins are recounted on the finalized labeling, not taken from the run.
    """
    tc = Fraction(n, 8) if theta_closure is None else Fraction(theta_closure)
    tp = Fraction(n, 4) if theta_polite is None else Fraction(theta_polite)
    seed = trial_seed(master, index)
    rng = random.Random(seed)
    inner = AS_ALGORITHMS[algo](rng, n)
    state = ASAdversaryState(n)
    log = polite_wrap(inner, tc, tp)(lambda v: as_answer(state, v), n, budget)
    final = as_finalize(state)
    degrees = [in_degree(final, v).count for v in state.queried]
    return PoliteTrial(
        algo=algo, n=n, trial=index, seed=seed, budget=budget,
        issued=len(log.issued),
        inner_queries=len(log.inner_queries),
        violations=log.violations,
        max_in_degree=max(degrees, default=0),
        wins=sum(1 for d in degrees if d > tp),
        replay_ok=replay_matches(state, final),
        closure_bound_ok=log.closure_bound_holds,
        halted=log.halted,
    )


@dataclass
class HTPTrial:
    player: str
    trial: int
    seed: int
    won: bool
    win_step: Optional[int]
    finish_step: Optional[int]
    queries: int


def htp_trial(player: str, n: int, length: int, quota: int, budget: int, master: int, index: int,
              judge: str = "after") -> HTPTrial:
    seed = trial_seed(master, index)
    rng = random.Random(seed)
    path = random_walk(rng.getrandbits(n), length, n, rng)
    state = HTPState(path, quota, judge)
    if player == "random":
        run = htp_random_prober(state, budget, rng)
        finish = state.win_step
    elif player == "chaser":
        run = tail_chaser(state, budget)
        finish = run.info["finish_step"]
    elif player == "chaser_probe":
        run = tail_chaser(state, budget, probe_frontier=True)
        finish = run.info["finish_step"]
    else:
        raise KeyError(player)
    return HTPTrial(player, index, seed, state.won, state.win_step, finish, run.transcript.query_count)


def union_bound(n: int, length: int, budget: int) -> float:
    """T * L * 2^-(n-1): the per-query hit chance on a parity class, summed."""
    return budget * length * 2.0 ** (-(n - 1))


@dataclass
class SweepRow:
    n: int
    trials: int
    median_queries: float
    median_cost: float
    median_steps: float
    success_rate: float


def regret_matching_sweep(ns, eps, trials: int, master: int, t: int = 8,
                          max_steps: Optional[int] = None) -> list[SweepRow]:
    rows = []
    for n in ns:
        runs = []
        for k in range(trials):
            rng = trial_rng(master, n * 100_000 + k)
            game = random_game(n, t, rng)
            runs.append(regret_matching(game, eps, rng, max_steps))
        rows.append(SweepRow(
            n=n, trials=trials,
            median_queries=statistics.median(r.transcript.query_count for r in runs),
            median_cost=statistics.median(r.cost for r in runs),
            median_steps=statistics.median(r.info["steps"] for r in runs),
            success_rate=sum(r.succeeded for r in runs) / trials,
        ))
    return rows
