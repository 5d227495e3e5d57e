"""Distributions over profiles, regrets, and correlated-equilibrium checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .games import GameInstance
from .hypercube import UsageError, check_vertex, from_bits, to_bits


class WitnessError(RuntimeError):
    """No support vertex meets the requested bound."""


class CompactionError(RuntimeError):
    """All mass lies outside the kept set."""


class SparseDistribution:
    """Exact probability mass on finitely many profiles.

    Zero entries are dropped on construction; the masses must sum to 1.
    """

    def __init__(self, n: int, entries: Mapping[int, Fraction]):
        clean = {}
        for v, p in entries.items():
            check_vertex(v, n)
            p = Fraction(p)
            if p < 0:
                raise UsageError(f"negative mass {p} at {to_bits(v, n)}")
            if p:
                clean[v] = p
        if sum(clean.values()) != 1:
            raise UsageError(f"masses sum to {sum(clean.values())}, not 1")
        self.n = n
        self.entries = dict(sorted(clean.items()))

    @classmethod
    def point(cls, n: int, v: int) -> "SparseDistribution":
        return cls(n, {v: Fraction(1)})

    @classmethod
    def uniform(cls, n: int, support: Iterable[int]) -> "SparseDistribution":
        support = set(support)
        return cls(n, {v: Fraction(1, len(support)) for v in support})

    @classmethod
    def empirical(cls, n: int, counts: Mapping[int, int]) -> "SparseDistribution":
        total = sum(counts.values())
        return cls(n, {v: Fraction(c, total) for v, c in counts.items()})

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.entries)

    def __getitem__(self, v: int) -> Fraction:
        return self.entries.get(v, Fraction(0))

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other):
        return isinstance(other, SparseDistribution) and self.n == other.n and self.entries == other.entries

    def __repr__(self):
        body = ", ".join(f"{to_bits(v, self.n)}: {p}" for v, p in self.entries.items())
        return f"SparseDistribution({{{body}}})"

    def to_json(self) -> dict:
        return {"entries": [{"profile": to_bits(v, self.n), "p": f"{p.numerator}/{p.denominator}"}
                            for v, p in self.entries.items()]}

    @classmethod
    def from_json(cls, data: dict) -> "SparseDistribution":
        items = data["entries"]
        if not items:
            raise UsageError("distribution has no entries")
        n = len(items[0]["profile"])
        return cls(n, {from_bits(e["profile"]): Fraction(e["p"]) for e in items})


def regret(x: SparseDistribution, game: GameInstance, i: int, b: int) -> Fraction:
    """Regret_{i->b}(x) = sum_v x(v) [u_i(v^{i->b}) - u_i(v)], over the support."""
    if not 0 <= i < game.n or b not in (0, 1):
        raise UsageError(f"bad (player, strategy) = ({i}, {b})")
    total = Fraction(0)
    for v, p in x.entries.items():
        if (v >> i) & 1 != b:
            w = v ^ (1 << i)
            total += p * (game.u(i, w) - game.u(i, v))
    return total


@dataclass(frozen=True)
class RegretReport:
    regrets: tuple  # regrets[i][b]
    epsilon: Fraction

    @property
    def max_regret(self) -> Fraction:
        return max(r for row in self.regrets for r in row)

    @property
    def passed(self) -> bool:
        return self.max_regret <= self.epsilon

    def to_json(self) -> dict:
        def s(q):
            return f"{q.numerator}/{q.denominator}"
        return {
            "regrets": [{"player": i + 1, "b": b, "regret": s(r)}
                        for i, row in enumerate(self.regrets) for b, r in enumerate(row)],
            "max_regret": s(self.max_regret),
            "max_regret_float": float(self.max_regret),
            "epsilon": s(self.epsilon),
            "pass": self.passed,
        }


def regret_table(x: SparseDistribution, game: GameInstance) -> tuple:
    """All 2n regrets in one pass over the support."""
    n = game.n
    table = [[Fraction(0), Fraction(0)] for _ in range(n)]
    for v, p in x.entries.items():
        here = game.utilities(v)
        for i in range(n):
            gain = game.u(i, v ^ (1 << i)) - here[i]
            # deviating to b only changes profiles where v_i != b
            table[i][1 - ((v >> i) & 1)] += p * gain
    return tuple(tuple(row) for row in table)


def verify_ce(x: SparseDistribution, game: GameInstance, eps=0) -> RegretReport:
    eps = Fraction(eps)
    if eps < 0:
        raise UsageError("epsilon must be non-negative")
    if x.n != game.n:
        raise UsageError("distribution and game dimensions differ")
    return RegretReport(regret_table(x, game), eps)


def flip_gain(game: GameInstance, v: int) -> Fraction:
    """sum_i [u_i(v^(i)) - u_i(v)]; equals sum_i R(v^(i), v) (scaled by 1/m
    for NNV games) on games built from labelings."""
    here = game.utilities(v)
    return sum((game.u(i, v ^ (1 << i)) - here[i] for i in range(game.n)), Fraction(0))


def total_regret_sum(x: SparseDistribution, game: GameInstance) -> Fraction:
    return sum((p * flip_gain(game, v) for v, p in x.entries.items()), Fraction(0))


def extract_witness(x: SparseDistribution, game: GameInstance, bound) -> int:
    """A support vertex whose flip gain is at most `bound`.

    Returns the one with the smallest gain (ties: smallest profile).  On
    AS games the gain is sum_i R(v^(i), v); on NNV games it is
    -out_weight(v)/m.
    """
    bound = Fraction(bound)
    best = min(x.support, key=lambda v: (flip_gain(game, v), v))
    if flip_gain(game, best) > bound:
        raise WitnessError(f"every support vertex has flip gain above {bound}")
    return best


def coordinate_closure(Q: Iterable[int], coord: int = 0) -> frozenset[int]:
    """Q' = {v : v in Q or v^(coord) in Q}."""
    Q = set(Q)
    return frozenset(Q | {v ^ (1 << coord) for v in Q})


def default_alpha(eps, max_denominator: int = 1 << 16) -> Fraction:
    """Rational near sqrt(eps) with denominator at most 2^16."""
    eps = Fraction(eps)
    if eps < 0:
        raise UsageError("epsilon must be non-negative")
    root = Fraction(math.isqrt(eps.numerator * (1 << 64) // eps.denominator), 1 << 32)
    return root.limit_denominator(max_denominator)


@dataclass(frozen=True)
class CompactionRecord:
    alpha: Fraction
    beta: Fraction
    q_prime: frozenset
    input_eps: Fraction

    @property
    def output_eps_bound(self) -> Fraction:
        return self.input_eps / self.alpha + 4 * (self.alpha + self.input_eps)


def compact_support(x_prime: SparseDistribution, Q: Iterable[int], alpha, input_eps,
                    coord: int = 0) -> tuple[SparseDistribution, CompactionRecord]:
    """Restrict a weak-CE output to Q' and renormalise.

    `x_prime` is an input_eps-CE of the alpha-scaled game found with query
    set Q; the result keeps only mass on Q' and is an
    (input_eps/alpha + 4(alpha + input_eps))-CE of the unscaled game.
    """
    alpha, input_eps = Fraction(alpha), Fraction(input_eps)
    if alpha <= 0:
        raise UsageError("alpha must be positive")
    q_prime = coordinate_closure(Q, coord)
    kept = {v: p for v, p in x_prime.entries.items() if v in q_prime}
    mass = sum(kept.values(), Fraction(0))
    if mass == 0:
        raise CompactionError("all weight lies outside Q'")
    beta = 1 / mass
    out = SparseDistribution(x_prime.n, {v: beta * p for v, p in kept.items()})
    return out, CompactionRecord(alpha, beta, q_prime, input_eps)


@dataclass(frozen=True)
class OutsideWeightCheck:
    """Result of the two-completion test on one (x, Q) pair."""

    outside_weight: Fraction
    alpha: Fraction
    epsilon: Fraction
    side: int            # which half (v_coord = side) carries the larger outside mass
    regret_zeroed: Fraction
    regret_split: Fraction

    @property
    def bound(self) -> Fraction:
        return 2 * (self.alpha + self.epsilon)

    @property
    def bound_violated(self) -> bool:
        return self.outside_weight > self.bound

    @property
    def completion_violates(self) -> bool:
        """Some completion makes x fail to be an epsilon-CE."""
        return max(self.regret_zeroed, self.regret_split) > self.epsilon


def outside_weight_check(x: SparseDistribution, game: GameInstance, Q: Iterable[int], eps,
                         coord: int = 0) -> OutsideWeightCheck:
    """Build the two utility completions that keep every queried answer.

    Both set u_coord to 0 outside Q'.  The second instead puts 1 on the
    outside profiles whose coordinate bit differs from `side`, where `side`
    is the half holding more of the outside mass; the deviation then
    measured is coord -> 1 - side.  If the outside mass exceeds
    2(alpha + eps), the second completion has regret above eps.
    """
    eps = Fraction(eps)
    q_prime = coordinate_closure(Q, coord)
    alpha = max((game.u(coord, v) for v in q_prime), default=Fraction(0))
    outside = {v: p for v, p in x.entries.items() if v not in q_prime}
    half = [Fraction(0), Fraction(0)]
    for v, p in outside.items():
        half[(v >> coord) & 1] += p
    side = 0 if half[0] >= half[1] else 1
    target = 1 - side

    def zeroed(v):
        return game.u(coord, v) if v in q_prime else Fraction(0)

    def split(v):
        if v in q_prime:
            return game.u(coord, v)
        return Fraction(1) if (v >> coord) & 1 == target else Fraction(0)

    g0 = game.with_player_utility(coord, zeroed)
    g1 = game.with_player_utility(coord, split)
    return OutsideWeightCheck(
        outside_weight=sum(outside.values(), Fraction(0)),
        alpha=alpha,
        epsilon=eps,
        side=side,
        regret_zeroed=regret(x, g0, coord, target),
        regret_split=regret(x, g1, coord, target),
    )
