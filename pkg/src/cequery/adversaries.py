"""Lower-bound machinery: the outward-orienting adversary for the approximate
sink problem, the polite simulation wrapper, and the Hit-The-Path referee.

Query algorithms here are callables ``algo(ask, n, budget)`` where
``ask(v)`` returns the labels (R(v, v^(0)), ..., R(v, v^(n-1))).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .hypercube import ClosureOverflow, ClosureTracker, Path, PeelError, UsageError, check_dim, check_vertex, peel_order
from .labeling import EdgeLabeling, edge_key

Ask = Callable[[int], tuple]
QueryAlgorithm = Callable[[Ask, int, int], object]


class BudgetExhausted(Exception):
    """Raised through an algorithm to stop it once its query budget is spent."""


@dataclass
class ASAdversaryState:
    n: int
    committed: dict = field(default_factory=dict)  # edge key -> R(lower, upper)
    queried: list = field(default_factory=list)
    answers: list = field(default_factory=list)

    def __post_init__(self):
        check_dim(self.n)

    def labeling(self) -> EdgeLabeling:
        """The commitments so far; uncommitted edges raise on access."""
        return EdgeLabeling(self.n, dict(self.committed), None, "as")


def as_answer(state: ASAdversaryState, v: int) -> tuple:
    """Answer a query at v, committing every fresh incident edge out of v.

    An edge out of v points into the neighbour, i.e. R(v, v^(i)) = -1.
    Earlier commitments are kept, so v's in-degree equals the number of
    its neighbours queried before it.
    """
    check_vertex(v, state.n)
    out = []
    for i in range(state.n):
        key = edge_key(v, i)
        if key not in state.committed:
            # stored value is R(lower, upper)
            state.committed[key] = -1 if key[0] == v else 1
        r = state.committed[key]
        out.append(r if key[0] == v else -r)
    answer = tuple(out)
    state.queried.append(v)
    state.answers.append(answer)
    return answer


def as_finalize(state: ASAdversaryState) -> EdgeLabeling:
    """Complete the commitments to a full +/-1 labeling.

    Uncommitted edges point from the smaller endpoint to the larger one
    (stored R(lower, upper) = -1).  Kept implicit, so it works at n ~ 30.
    """
    return EdgeLabeling(state.n, dict(state.committed), -1, "as")


def replay_matches(state: ASAdversaryState, labeling: EdgeLabeling) -> bool:
    return all(labeling.incident(v) == ans for v, ans in zip(state.queried, state.answers))


def in_count(answer: tuple) -> int:
    """In-degree read off a query answer (labels equal to +1)."""
    return sum(1 for r in answer if r == 1)


@dataclass
class PoliteLog:
    """What the polite wrapper issued during one run."""

    issued: list = field(default_factory=list)
    prior_neighbors: list = field(default_factory=list)  # per issued query
    inner_queries: list = field(default_factory=list)
    theta_closure: Fraction = Fraction(0)
    theta_polite: Fraction = Fraction(0)
    halted: str = "done"  # "budget" or "peel" when the run was cut short
    failure: Optional[str] = None  # set when no polite order exists for a closure batch

    @property
    def violations(self) -> int:
        return sum(1 for c in self.prior_neighbors if c > self.theta_polite)

    @property
    def closure_bound_holds(self) -> bool:
        return len(self.issued) <= 2 * len(set(self.inner_queries))


def polite_wrap(inner: QueryAlgorithm, theta_closure, theta_polite) -> Callable[[Ask, int, int], PoliteLog]:
    """Run `inner` through the closure-completing polite simulation.

    Each inner query q_t triggers closure(Q*_{t-1} + q_t); the newly
    absorbed vertices are issued in a peel order where each vertex's
    allowance is theta_polite minus its neighbours already queried.  Every
    such vertex had at most theta_closure of those, so the allowance is
    never below theta_polite - theta_closure, and every issued query has
    at most theta_polite previously queried neighbours.  Stops cleanly when
    a batch would push the issued count past `budget`, and stops with
    `failure` set when a batch has no polite order, which can happen once
    the inner algorithm outgrows the closure-size regime.
    """
    tc, tp = Fraction(theta_closure), Fraction(theta_polite)
    if tc < 0 or tp < 2 * tc:
        raise UsageError("need theta_polite >= 2 * theta_closure >= 0")

    def wrapped(ask: Ask, n: int, budget: int) -> PoliteLog:
        tracker = ClosureTracker(n, tc)
        answers: dict[int, tuple] = {}
        log = PoliteLog(theta_closure=tc, theta_polite=tp)

        def inner_ask(q: int) -> tuple:
            if q not in tracker.members:
                # the run ends on any failure below, so the tracker is not rolled back
                try:
                    new = tracker.add([q], limit=budget - len(log.issued))
                except ClosureOverflow:
                    log.halted = "budget"
                    raise BudgetExhausted
                # each new vertex may still gain tp minus its already-queried neighbours
                budgets = {w: tp - sum(1 for i in range(n) if w ^ (1 << i) in answers) for w in new}
                try:
                    order = peel_order(new, tp - tc, n, budgets)
                except PeelError as err:
                    log.halted = "peel"
                    log.failure = f"peel infeasible at inner query {len(log.inner_queries) + 1}: {err}"
                    raise
                for w in order:
                    log.prior_neighbors.append(sum(1 for i in range(n) if w ^ (1 << i) in answers))
                    answers[w] = ask(w)
                    log.issued.append(w)
            log.inner_queries.append(q)
            return answers[q]

        try:
            inner(inner_ask, n, budget)
        except (BudgetExhausted, PeelError):
            pass
        return log

    return wrapped


@dataclass
class HTPState:
    """Hit-The-Path referee for one hidden path.

    `judge` selects which frontier a query is judged against: "after"
    (default) counts this step's batch as revealed before the win check;
    "before" judges against the frontier the algorithm saw when querying.
    """

    path: Path
    reveal_quota: int
    judge: str = "after"
    revealed_upto: int = 0
    step: int = 0
    won: bool = False
    win_step: Optional[int] = None
    _last: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.reveal_quota < 1:
            raise UsageError("reveal quota must be at least 1")
        if self.judge not in ("after", "before"):
            raise UsageError("judge must be 'after' or 'before'")
        for j, v in enumerate(self.path.vertices):
            self._last[v] = j

    @property
    def L(self) -> int:
        return self.path.length

    @property
    def origin(self) -> int:
        return self.path.vertices[0]

    def revealed(self) -> tuple[int, ...]:
        return self.path.vertices[: self.revealed_upto + 1]

    def on_tail(self, q: int, frontier: int) -> bool:
        """q is one of v_{frontier+1}, ..., v_L."""
        return self._last.get(q, -1) > frontier


@dataclass(frozen=True)
class StepOutcome:
    win: bool
    newly_revealed: tuple


def htp_step(state: HTPState, q: Optional[int]) -> StepOutcome:
    """Play one step: judge q (None passes without querying), then reveal."""
    if state.won:
        raise UsageError("game already won")
    if q is not None:
        check_vertex(q, state.path.n)
    state.step += 1
    before = state.revealed_upto
    state.revealed_upto = min(state.step * state.reveal_quota, state.L)
    frontier = state.revealed_upto if state.judge == "after" else before
    win = q is not None and state.on_tail(q, frontier)
    if win:
        state.won = True
        state.win_step = state.step
    return StepOutcome(win, state.path.vertices[before + 1: state.revealed_upto + 1])


def answer_from_revealed(state: HTPState, v: int) -> tuple:
    """Labels at v computed from the revealed prefix only.

    Exact unless v occurs at position revealed_upto or later: the step out
    of the frontier vertex is not yet revealed.
    """
    n = state.path.n
    upto = state.revealed_upto
    labels = [0] * n
    verts = state.path.vertices
    for j in range(1, upto + 1):
        a, b = verts[j - 1], verts[j]
        if a == v:
            labels[(a ^ b).bit_length() - 1] -= j
        elif b == v:
            labels[(a ^ b).bit_length() - 1] += j
    return tuple(labels)
