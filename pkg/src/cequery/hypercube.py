"""Vertices, paths and combinatorics on the boolean hypercube {0,1}^n.

Vertices are plain ints: player i (0-based) occupies bit position i, so
player 1 is bit 0.  Text form lists players left to right, e.g. for n=4
the profile where only player 1 plays 1 is "1000".
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

MAX_DIM = 30
MAX_EXACT_WALK_DIM = 14


class UsageError(ValueError):
    """Bad argument: index out of range, dimension too large, etc."""


class CapacityError(UsageError):
    """Requested size is too large for a dense representation."""


class PeelError(RuntimeError):
    """No ordering satisfies the requested preceding-neighbor bound."""


class ClosureOverflow(RuntimeError):
    """A closure step grew past the caller's limit."""


def check_dim(n: int, cap: int = MAX_DIM) -> None:
    if not 1 <= n <= cap:
        raise UsageError(f"dimension must be in 1..{cap}, got {n}")


def check_vertex(v: int, n: int) -> None:
    if v < 0 or v >> n:
        raise UsageError(f"vertex {v} does not fit in {n} bits")


def flip(v: int, i: int, n: int) -> int:
    """Return v with bit i inverted (the profile where player i deviates)."""
    if not 0 <= i < n:
        raise UsageError(f"player index {i} out of range for n={n}")
    check_vertex(v, n)
    return v ^ (1 << i)


def set_bit(v: int, i: int, b: int, n: int) -> int:
    if not 0 <= i < n:
        raise UsageError(f"player index {i} out of range for n={n}")
    if b not in (0, 1):
        raise UsageError(f"strategy bit must be 0 or 1, got {b}")
    check_vertex(v, n)
    return v | (1 << i) if b else v & ~(1 << i)


def bit(v: int, i: int) -> int:
    return (v >> i) & 1


def neighbors(v: int, n: int) -> list[int]:
    return [v ^ (1 << i) for i in range(n)]


def hamming(u: int, v: int) -> int:
    return bin(u ^ v).count("1")


def to_bits(v: int, n: int) -> str:
    check_vertex(v, n)
    return "".join("1" if (v >> i) & 1 else "0" for i in range(n))


def from_bits(s: str) -> int:
    if not s or set(s) - {"0", "1"}:
        raise UsageError(f"not a bit string: {s!r}")
    return sum(1 << i for i, c in enumerate(s) if c == "1")


@dataclass(frozen=True)
class Path:
    """A walk (v_0, ..., v_L) whose consecutive vertices differ in one bit."""

    n: int
    vertices: tuple[int, ...]

    def __post_init__(self):
        check_dim(self.n)
        if not self.vertices:
            raise UsageError("a path needs at least one vertex")
        for v in self.vertices:
            check_vertex(v, self.n)
        for a, b in zip(self.vertices, self.vertices[1:]):
            d = a ^ b
            if d == 0 or d & (d - 1):
                raise UsageError(f"step {to_bits(a, self.n)} -> {to_bits(b, self.n)} is not an edge")

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def steps(self):
        """Yield (j, v_{j-1}, v_j) for j = 1..L."""
        for j in range(1, len(self.vertices)):
            yield j, self.vertices[j - 1], self.vertices[j]

    def concat(self, other: "Path") -> "Path":
        if other.n != self.n or other.vertices[0] != self.end:
            raise UsageError("paths do not join")
        return Path(self.n, self.vertices + other.vertices[1:])

    def to_json(self) -> list[str]:
        return [to_bits(v, self.n) for v in self.vertices]

    @classmethod
    def from_json(cls, items: Sequence[str]) -> "Path":
        if not items:
            raise UsageError("empty path")
        return cls(len(items[0]), tuple(from_bits(s) for s in items))


def gray_path(n: int) -> Path:
    """Reflected binary Gray code from the all-zeros vertex."""
    check_dim(n)
    return Path(n, tuple(k ^ (k >> 1) for k in range(1 << n)))


def random_walk(start: int, steps: int, n: int, rng: random.Random) -> Path:
    """Walk that flips a uniformly random coordinate at every step."""
    check_dim(n)
    check_vertex(start, n)
    if steps < 0:
        raise UsageError("steps must be non-negative")
    out = [start]
    v = start
    for _ in range(steps):
        v ^= 1 << rng.randrange(n)
        out.append(v)
    return Path(n, tuple(out))


def internal_edge_count(U: Iterable[int], n: int) -> int:
    """Directed edges inside U: |{(u, i) : u in U and u^(i) in U}|."""
    members = set(U)
    return sum(1 for u in members for i in range(n) if u ^ (1 << i) in members)


def subcube(free: Sequence[int], base: int = 0) -> frozenset[int]:
    """All vertices agreeing with `base` outside the coordinates in `free`."""
    out = {base}
    for i in free:
        out |= {v ^ (1 << i) for v in out}
    return frozenset(out)


def closure(V: Iterable[int], threshold, n: int) -> frozenset[int]:
    """Smallest superset of V in which every outside vertex has at most
    `threshold` neighbors inside.

    Grows by adding any vertex with strictly more than `threshold` inside
    neighbors; the fixed point does not depend on the order of additions.
    """
    return frozenset(ClosureTracker(n, threshold, V).members)


class ClosureTracker:
    """Incrementally maintained closure, for simulations that add one
    vertex at a time and need the newly absorbed vertices."""

    def __init__(self, n: int, threshold, initial: Iterable[int] = ()):
        self.n = n
        self.threshold = Fraction(threshold)
        self.members: set[int] = set()
        self._count: dict[int, int] = {}
        self.add(initial)

    def add(self, vertices: Iterable[int], limit: Optional[int] = None) -> list[int]:
        """Add vertices and absorb everything the closure forces.

        Returns the newly absorbed vertices (inputs included) in the order
        they entered.  With `limit`, raises ClosureOverflow as soon as more
        than `limit` vertices would be absorbed; the tracker is then left
        part-way and should be discarded.
        """
        added: list[int] = []
        stack = [v for v in vertices]
        while stack:
            v = stack.pop()
            if v in self.members:
                continue
            if limit is not None and len(added) >= limit:
                raise ClosureOverflow(f"closure step absorbs more than {limit} vertices")
            self.members.add(v)
            self._count.pop(v, None)
            added.append(v)
            for i in range(self.n):
                w = v ^ (1 << i)
                if w in self.members:
                    continue
                c = self._count.get(w, 0) + 1
                self._count[w] = c
                if c > self.threshold:
                    stack.append(w)
        return added

    def inside_neighbors(self, v: int) -> int:
        return sum(1 for i in range(self.n) if v ^ (1 << i) in self.members)


def peel_order(N: Iterable[int], threshold, n: int,
               budgets: Optional[Mapping[int, Fraction]] = None) -> list[int]:
    """Order N so each vertex has at most `threshold` neighbors of N before it.

    Repeatedly removes a vertex of minimum internal degree and places it
    last (ties: the largest vertex id goes last).  Raises PeelError when
    some remaining subset has every internal degree above the threshold.

    `budgets` optionally gives a per-vertex allowance instead; a vertex may
    then go last whenever its degree among the remaining vertices is within
    its own allowance, and the greedy choice decides feasibility exactly.
    """
    remaining = set(N)
    degree = {v: sum(1 for i in range(n) if v ^ (1 << i) in remaining) for v in remaining}
    allow = (lambda v: budgets[v]) if budgets is not None else (lambda v: threshold)
    tail: list[int] = []
    while remaining:
        v = min(remaining, key=lambda u: (degree[u] - allow(u), -u))
        if degree[v] > allow(v):
            raise PeelError(
                f"{len(remaining)} vertices left, internal degree {degree[v]} exceeds allowance {allow(v)}"
            )
        remaining.remove(v)
        del degree[v]
        for i in range(n):
            w = v ^ (1 << i)
            if w in remaining:
                degree[w] -= 1
        tail.append(v)
    tail.reverse()
    return tail


def walk_distribution(start: int, steps: int, n: int) -> list[Fraction]:
    """Exact law of the flip-a-uniform-coordinate walk after `steps` steps.

    Keeps integer path counts (object arrays, so no overflow) and divides by
    n**steps at the end.
    """
    check_dim(n, MAX_EXACT_WALK_DIM)
    check_vertex(start, n)
    if steps < 0:
        raise UsageError("steps must be non-negative")
    size = 1 << n
    idx = np.arange(size)
    counts = np.zeros(size, dtype=object)
    counts[:] = 0
    counts[start] = 1
    for _ in range(steps):
        nxt = counts[idx ^ 1]
        for i in range(1, n):
            nxt = nxt + counts[idx ^ (1 << i)]
        counts = nxt
    denom = n**steps
    return [Fraction(int(c), denom) for c in counts]


def parity_tv_to_uniform(dist: Sequence[Fraction], start: int, steps: int) -> Fraction:
    """Total variation between `dist` and uniform on the parity class the
    walk can occupy after `steps` steps from `start`."""
    size = len(dist)
    target = (bin(start).count("1") + steps) % 2
    u = Fraction(2, size)
    total = Fraction(0)
    for v, p in enumerate(dist):
        q = u if bin(v).count("1") % 2 == target else Fraction(0)
        total += abs(p - q)
    return total / 2
