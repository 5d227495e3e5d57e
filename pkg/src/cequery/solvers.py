"""Algorithms under test.

Regret matching is the randomised polynomial-query upper bound; the exact
small-instance oracle solves the CE linear feasibility problem; the rest are
baseline searchers for the approximate-sink and hit-the-path games.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .adversaries import Ask, HTPState, in_count, htp_step
from .equilibrium import SparseDistribution, verify_ce
from .games import GameInstance, Oracle, QueryTranscript
from .hypercube import UsageError
from .labeling import label_from_path, nnv_check
from .lp import simplex_feasible_point

EXACT_MAX_DIM = 10


@dataclass
class SolverRun:
    output: Any
    transcript: QueryTranscript
    succeeded: bool
    seed: Optional[int] = None
    info: dict = field(default_factory=dict)

    @property
    def cost(self) -> int:
        return self.transcript.cost


def default_max_steps(n: int, eps) -> int:
    """ceil(64 ln(4n) / eps^2); a desk-scale cap, not a tight bound."""
    eps = float(Fraction(eps))
    return math.ceil(64 * math.log(4 * n) / eps**2)


def regret_matching(game: GameInstance, eps, rng: random.Random, max_steps: Optional[int] = None,
                    stop_early: bool = True, seed: Optional[int] = None) -> SolverRun:
    """Regret matching through the query oracle.

    Each round plays a profile v drawn from the players' independent mixed
    actions, then queries v and its n single-player deviations (n + 1
    queries).  Player i plays b with probability proportional to the
    positive part of its cumulative regret for not having played b; when
    neither regret is positive it mixes uniformly.  The output is the
    empirical distribution of play.  With `stop_early`, play stops once
    every measured regret of that distribution is at most eps/2.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise UsageError("regret matching needs eps > 0")
    n = game.n
    if max_steps is None:
        max_steps = default_max_steps(n, eps)
    oracle = Oracle(game)
    half = eps / 2
    # cum[i][b]: sum over rounds of u_i(v^{i->b}) - u_i(v)
    cum = [[Fraction(0), Fraction(0)] for _ in range(n)]
    p_one = [0.5] * n
    counts: dict[int, int] = {}
    steps = 0
    for steps in range(1, max_steps + 1):
        v = 0
        for i in range(n):
            if rng.random() < p_one[i]:
                v |= 1 << i
        here = oracle(v)
        for i in range(n):
            there = oracle(v ^ (1 << i))
            cum[i][1 - ((v >> i) & 1)] += there[i] - here[i]
        counts[v] = counts.get(v, 0) + 1
        for i in range(n):
            r0 = float(cum[i][0]) if cum[i][0] > 0 else 0.0
            r1 = float(cum[i][1]) if cum[i][1] > 0 else 0.0
            p_one[i] = r1 / (r0 + r1) if r0 + r1 > 0 else 0.5
        if stop_early and max(max(row) for row in cum) <= half * steps:
            break
    x = SparseDistribution.empirical(n, counts)
    oracle.transcript.charge_support(len(x))
    measured = max(max(row) for row in cum) / steps
    report = verify_ce(x, game, eps)
    return SolverRun(x, oracle.transcript, report.passed, seed,
                     {"steps": steps, "measured_max_regret": measured,
                      "max_regret": report.max_regret, "max_steps": max_steps})


def ce_constraints(game: GameInstance) -> list[list[Fraction]]:
    """Row (i, b): coefficients u_i(v^{i->b}) - u_i(v) over all profiles v."""
    n = game.n
    size = 1 << n
    utils = [game.utilities(v) for v in range(size)]
    rows = []
    for i in range(n):
        for b in (0, 1):
            row = []
            for v in range(size):
                if (v >> i) & 1 == b:
                    row.append(Fraction(0))
                else:
                    row.append(utils[v ^ (1 << i)][i] - utils[v][i])
            rows.append(row)
    return rows


def exact_ce_small(game: GameInstance) -> SparseDistribution:
    """An exact correlated equilibrium by rational linear feasibility (n <= 10)."""
    if game.n > EXACT_MAX_DIM:
        raise UsageError(f"exact CE search is limited to n <= {EXACT_MAX_DIM}")
    x = simplex_feasible_point(ce_constraints(game), 1 << game.n)
    dist = SparseDistribution(game.n, dict(enumerate(x)))
    if not verify_ce(dist, game, 0).passed:
        raise AssertionError("simplex returned a non-equilibrium")
    return dist


def exact_ce_run(game: GameInstance) -> SolverRun:
    """exact_ce_small wrapped as a run; reading the full table costs 2^n queries."""
    oracle = Oracle(game)
    for v in range(1 << game.n):
        oracle(v)
    x = exact_ce_small(game)
    oracle.transcript.charge_support(len(x))
    return SolverRun(x, oracle.transcript, verify_ce(x, game, 0).passed, None, {})


# Approximate-sink searchers.  Each has the signature algo(ask, n, budget)
# and returns the first queried vertex whose in-degree exceeds n/4, if any.

def _wins(answer: tuple, n: int) -> bool:
    return in_count(answer) * 4 > n


def greedy_sink(ask: Ask, n: int, budget: int, start: int = 0) -> Optional[int]:
    """Query next the unqueried vertex with the most observed edges pointing
    into it (ties: smallest vertex)."""
    queried: set[int] = set()
    into: dict[int, int] = {}
    heap: list[tuple[int, int]] = []
    v = start
    for _ in range(budget):
        answer = ask(v)
        queried.add(v)
        if _wins(answer, n):
            return v
        for i, r in enumerate(answer):
            w = v ^ (1 << i)
            if w not in queried and r == -1:
                into[w] = into.get(w, 0) + 1
                heapq.heappush(heap, (-into[w], w))
        nxt = None
        while heap:
            c, w = heapq.heappop(heap)
            if w not in queried and -c == into[w]:
                nxt = w
                break
        if nxt is None:
            nxt = next((v ^ (1 << i) for i in range(n) if v ^ (1 << i) not in queried), None)
            if nxt is None:
                nxt = next((u for u in range(1 << n) if u not in queried), None)
            if nxt is None:
                return None
        v = nxt
    return None


def random_prober(rng: random.Random):
    def algo(ask: Ask, n: int, budget: int) -> Optional[int]:
        for _ in range(budget):
            v = rng.getrandbits(n)
            if _wins(ask(v), n):
                return v
        return None
    return algo


def random_walker(rng: random.Random):
    """Walk along random edges, querying each vertex reached."""
    def algo(ask: Ask, n: int, budget: int) -> Optional[int]:
        v = rng.getrandbits(n)
        for _ in range(budget):
            if _wins(ask(v), n):
                return v
            v ^= 1 << rng.randrange(n)
        return None
    return algo


def neighbor_sweep(rng: random.Random):
    """Pick a random centre, query it and then every one of its neighbours."""
    def algo(ask: Ask, n: int, budget: int) -> Optional[int]:
        used = 0
        while used < budget:
            c = rng.getrandbits(n)
            for v in [c] + [c ^ (1 << i) for i in range(n)]:
                if used >= budget:
                    return None
                used += 1
                if _wins(ask(v), n):
                    return v
        return None
    return algo


def greedy_from(start: int):
    def algo(ask: Ask, n: int, budget: int) -> Optional[int]:
        return greedy_sink(ask, n, budget, start)
    return algo


def greedy_sink_search(ask: Ask, n: int, budget: int, start: int = 0) -> SolverRun:
    """Run greedy_sink, recording every query; success is recomputed from
    the recorded answers."""
    transcript = QueryTranscript()

    def recorded(v):
        ans = ask(v)
        transcript.queries.append((v, ans))
        return ans

    found = greedy_sink(recorded, n, budget, start)
    succeeded = any(_wins(ans, n) for _, ans in transcript.queries)
    return SolverRun(found, transcript, succeeded, None, {})


# Hit-the-path players.

def tail_chaser(state: HTPState, budget: int, probe_frontier: bool = False) -> SolverRun:
    """Follow the path as it is revealed and output v_L once it is known.

    The path only becomes known through the reveal schedule, so the end is
    reached after ceil(L/k) steps.  With `probe_frontier` the chaser also
    queries the newest revealed vertex each step; on a walk that revisits
    vertices that query can hit the unrevealed tail, which ends the game
    early as an outright win.
    """
    transcript = QueryTranscript()
    reached = None
    for _ in range(budget):
        if state.revealed_upto == state.L:
            reached = state.step
            break
        q = state.path.vertices[state.revealed_upto] if probe_frontier else None
        outcome = htp_step(state, q)
        if q is not None:
            transcript.queries.append((q, outcome.win))
        if outcome.win:
            break
    else:
        if state.revealed_upto == state.L:
            reached = state.step
    if state.won:
        output, succeeded = transcript.queries[-1][0], True
    elif reached is not None:
        output = state.path.end
        succeeded = nnv_check(label_from_path(state.path), output)
    else:
        output, succeeded = None, False
    return SolverRun(output, transcript, succeeded, None,
                     {"won": state.won, "steps": state.step,
                      "finish_step": state.step if succeeded else None,
                      "reveal_quota": state.reveal_quota, "L": state.L})


def htp_random_prober(state: HTPState, budget: int, rng: random.Random) -> SolverRun:
    """Query uniformly random vertices, ignoring everything revealed."""
    transcript = QueryTranscript()
    n = state.path.n
    for _ in range(budget):
        q = rng.getrandbits(n)
        outcome = htp_step(state, q)
        transcript.queries.append((q, outcome.win))
        if outcome.win:
            break
    return SolverRun(transcript.queries[-1][0] if state.won else None, transcript, state.won, None,
                     {"win_step": state.win_step})
