"""Bi-strategy games, a counting query oracle, and games built from labelings."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .hypercube import CapacityError, UsageError, check_dim, check_vertex
from .labeling import EdgeLabeling, max_abs_label

MAX_DENSE_DIM = 20

Utilities = tuple  # tuple[Fraction, ...], one entry per player


class GameInstance:
    """n utility functions u_i: {0,1}^n -> [0, 1] with exact rational values.

    Either a dense table (`table[v]` is the utility tuple at profile v) or an
    implicit rule evaluated on demand.
    """

    def __init__(self, n: int, table: Optional[Sequence[Utilities]] = None,
                 rule: Optional[Callable[[int], Utilities]] = None,
                 kind: str = "table", labeling: Optional[EdgeLabeling] = None):
        check_dim(n)
        if (table is None) == (rule is None):
            raise UsageError("give exactly one of table or rule")
        if table is not None:
            if n > MAX_DENSE_DIM:
                raise CapacityError(f"dense games need n <= {MAX_DENSE_DIM}")
            if len(table) != 1 << n:
                raise UsageError(f"table has {len(table)} rows, expected {1 << n}")
            table = [tuple(Fraction(x) for x in row) for row in table]
            for row in table:
                if len(row) != n or any(not 0 <= x <= 1 for x in row):
                    raise UsageError("utilities must be n-tuples in [0, 1]")
        self.n = n
        self._table = table
        self._rule = rule
        self.kind = kind
        self.labeling = labeling

    @property
    def dense(self) -> bool:
        return self._table is not None

    def utilities(self, v: int) -> Utilities:
        if self._table is not None:
            return self._table[v]
        return self._rule(v)

    def u(self, i: int, v: int) -> Fraction:
        return self.utilities(v)[i]

    def scaled(self, alpha) -> "GameInstance":
        """Game with utilities alpha * u_i."""
        alpha = Fraction(alpha)
        if not 0 <= alpha <= 1:
            raise UsageError("scale factor must lie in [0, 1]")
        if self._table is not None:
            return GameInstance(self.n, [tuple(alpha * x for x in row) for row in self._table],
                                kind="table")
        rule = self._rule
        return GameInstance(self.n, rule=lambda v: tuple(alpha * x for x in rule(v)), kind=self.kind)

    def with_player_utility(self, i: int, fn: Callable[[int], Fraction]) -> "GameInstance":
        """Copy where player i's utility is replaced by fn (other players kept)."""
        base = self.utilities

        def rule(v):
            row = list(base(v))
            row[i] = Fraction(fn(v))
            return tuple(row)

        return GameInstance(self.n, rule=rule, kind="derived")

    def to_json(self) -> dict:
        if self.kind == "from_as" and self.labeling is not None:
            return {"n": self.n, "kind": "from_as", "labeling": self.labeling.to_json()}
        if self.kind == "from_nnv" and self.labeling is not None:
            return {"n": self.n, "kind": "from_nnv", "labeling": self.labeling.to_json()}
        if self.n > MAX_DENSE_DIM:
            raise CapacityError(f"cannot write a dense table for n={self.n}")
        rows = [[_rat(x) for x in self.utilities(v)] for v in range(1 << self.n)]
        return {"n": self.n, "kind": "table", "utilities": rows}

    @classmethod
    def from_json(cls, data: dict) -> "GameInstance":
        kind = data.get("kind", "table")
        if kind == "table":
            rows = [tuple(Fraction(x) for x in row) for row in data["utilities"]]
            return cls(int(data["n"]), rows)
        lab = EdgeLabeling.from_json(data["labeling"])
        if kind == "from_as":
            return game_from_as(lab)
        if kind == "from_nnv":
            return game_from_nnv(lab)
        raise UsageError(f"unknown game kind {kind!r}")


def _rat(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass
class QueryTranscript:
    """Every query made in a run, with its answer.

    Repeated queries are charged again.
    """

    queries: list = field(default_factory=list)
    support_size_charged: int = 0

    @property
    def query_count(self) -> int:
        return len(self.queries)

    @property
    def cost(self) -> int:
        return self.query_count + self.support_size_charged

    def queried_set(self) -> set[int]:
        return {v for v, _ in self.queries}

    def charge_support(self, size: int) -> None:
        self.support_size_charged = size


def query(game: GameInstance, transcript: QueryTranscript, v: int) -> Utilities:
    """Black-box access: the full utility tuple at pure profile v, recorded."""
    check_vertex(v, game.n)
    answer = game.utilities(v)
    transcript.queries.append((v, answer))
    return answer


class Oracle:
    """A game behind a query counter; the only access solvers get."""

    def __init__(self, game: GameInstance, transcript: Optional[QueryTranscript] = None):
        self._game = game
        self.n = game.n
        self.transcript = transcript if transcript is not None else QueryTranscript()

    def __call__(self, v: int) -> Utilities:
        return query(self._game, self.transcript, v)


def game_from_as(R: EdgeLabeling) -> GameInstance:
    """Win-lose game with u_i(v) - u_i(v^(i)) = R(v, v^(i)).

    Each profile reads the n labels incident to it, so one game query is one
    labeling query.
    """
    one, zero = Fraction(1), Fraction(0)

    def rule(v):
        out = []
        for r in R.incident(v):
            if r not in (-1, 1):
                raise UsageError(f"AS labels must be +/-1, saw {r}")
            out.append(one if r == 1 else zero)
        return tuple(out)

    return GameInstance(R.n, rule=rule, kind="from_as", labeling=R)


def game_from_nnv(R: EdgeLabeling) -> GameInstance:
    """Game with u_i(v) - u_i(v^(i)) = R(v, v^(i)) / m, m the largest |label|."""
    m = max_abs_label(R)
    zero = Fraction(0)

    def rule(v):
        if m == 0:
            return (zero,) * R.n
        return tuple(Fraction(r, m) if r > 0 else zero for r in R.incident(v))

    return GameInstance(R.n, rule=rule, kind="from_nnv", labeling=R)


def random_game(n: int, t: int, rng: random.Random) -> GameInstance:
    """Dense game, each u_i(v) uniform on {0, 1/(2^t - 1), ..., 1}."""
    check_dim(n)
    if n > MAX_DENSE_DIM:
        raise CapacityError(f"dense games need n <= {MAX_DENSE_DIM}")
    if t < 0:
        raise UsageError("bits of precision must be non-negative")
    if t == 0:
        zero = (Fraction(0),) * n
        return GameInstance(n, [zero] * (1 << n))
    top = (1 << t) - 1
    grid = [Fraction(k, top) for k in range(top + 1)]
    table = [tuple(grid[rng.randrange(top + 1)] for _ in range(n)) for _ in range(1 << n)]
    return GameInstance(n, table)


def constant_game(n: int, c=0) -> GameInstance:
    c = Fraction(c)
    return GameInstance(n, [(c,) * n] * (1 << n))


def matching_pennies() -> GameInstance:
    """Player 1 wins iff the two bits match; player 2 gets the complement."""
    rows = []
    for v in range(4):
        u1 = Fraction(1) if (v & 1) == (v >> 1) & 1 else Fraction(0)
        rows.append((u1, 1 - u1))
    return GameInstance(2, rows)


def coordination_game() -> GameInstance:
    rows = []
    for v in range(4):
        u = Fraction(1) if (v & 1) == (v >> 1) & 1 else Fraction(0)
        rows.append((u, u))
    return GameInstance(2, rows)


def dominant_game(n: int) -> GameInstance:
    """u_i(v) = v_i: playing 1 is strictly dominant for everyone."""
    return GameInstance(n, [tuple(Fraction((v >> i) & 1) for i in range(n)) for v in range(1 << n)])

