"""Antisymmetric integer labelings of hypercube edges.

One value is stored per undirected edge, keyed by (lower endpoint, i) where
the lower endpoint has bit i clear; the stored value is R(lower, upper) and
R(upper, lower) is its negation.

Direction convention for +/-1 labelings: R(v, v^(i)) = +1 means the edge
points into v.  So in_degree(v) counts the i with R(v, v^(i)) = +1, and
sum_i R(v^(i), v) = n - 2*in_degree(v).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .hypercube import CapacityError, Path, UsageError, check_dim, check_vertex, from_bits, gray_path, random_walk, to_bits


class LabelingIncomplete(LookupError):
    """An edge with no committed label was read."""


def edge_key(v: int, i: int) -> tuple[int, int]:
    return (v & ~(1 << i), i)


@dataclass(frozen=True)
class EdgeLabeling:
    """Sparse antisymmetric labeling R.

    `default` is the value of unlisted edges; None means "not committed" and
    reading such an edge raises LabelingIncomplete.
    """

    n: int
    labels: dict = field(default_factory=dict)
    default: Optional[int] = 0
    kind: str = "nnv"

    def __post_init__(self):
        check_dim(self.n)

    def R(self, v: int, i: int) -> int:
        """R(v, v^(i))."""
        key = edge_key(v, i)
        r = self.labels.get(key)
        if r is None:
            if self.default is None:
                raise LabelingIncomplete(f"edge ({to_bits(v, self.n)}, {i}) has no label")
            r = self.default
        return r if not (v >> i) & 1 else -r

    def is_defined(self, v: int, i: int) -> bool:
        return self.default is not None or edge_key(v, i) in self.labels

    def incident(self, v: int) -> tuple[int, ...]:
        """(R(v, v^(0)), ..., R(v, v^(n-1))) -- the answer to a query at v."""
        return tuple(self.R(v, i) for i in range(self.n))

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Stored edges as (lower endpoint, i, R(lower, upper))."""
        for (v, i), r in sorted(self.labels.items()):
            yield v, i, r

    def to_json(self, seed: Optional[int] = None, path: Optional[Path] = None) -> dict:
        out = {
            "n": self.n,
            "kind": self.kind,
            "edges": [{"v": to_bits(v, self.n), "i": i, "r": str(r)} for v, i, r in self.edges()],
        }
        if seed is not None:
            out["seed"] = seed
        if path is not None:
            out["path"] = path.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "EdgeLabeling":
        n = int(data["n"])
        kind = data.get("kind", "nnv")
        if kind == "path" and data.get("path"):
            return label_from_path(Path.from_json(data["path"]))
        labels = {}
        for e in data.get("edges", []):
            v, i, r = from_bits(e["v"]), int(e["i"]), int(e["r"])
            check_vertex(v, n)
            if not 0 <= i < n:
                raise UsageError(f"edge coordinate {i} out of range")
            # the file may name either endpoint
            labels[edge_key(v, i)] = r if not (v >> i) & 1 else -r
        default = None if kind == "as" else 0
        return cls(n, labels, default, kind)


def label_from_path(path: Path) -> EdgeLabeling:
    """Labeling induced by a walk: step j along (v_{j-1} -> v_j) adds -j to
    R(v_{j-1}, v_j), summed over repeated traversals."""
    labels: dict[tuple[int, int], int] = {}
    for j, a, b in path.steps():
        i = (a ^ b).bit_length() - 1
        key = edge_key(a, i)
        # stored value is R(lower, upper)
        contrib = -j if a == key[0] else j
        labels[key] = labels.get(key, 0) + contrib
    labels = {k: r for k, r in labels.items() if r != 0}
    return EdgeLabeling(path.n, labels, 0, "path")


def out_weight(R: EdgeLabeling, v: int) -> int:
    return sum(R.incident(v))


def path_out_weight(path: Path, v: int) -> int:
    """Closed form of out_weight for a path labeling:
    -#{j in 0..L-1 : v_j = v} + L*[v = v_L]."""
    L = path.length
    visits = sum(1 for u in path.vertices[:L] if u == v)
    return -visits + (L if path.end == v else 0)


@dataclass(frozen=True)
class InDegree:
    count: int
    signed_sum: int  # sum_i R(v^(i), v) = n - 2*count


def in_degree(R: EdgeLabeling, v: int) -> InDegree:
    """In-degree of v under a complete +/-1 labeling."""
    labels = R.incident(v)
    for r in labels:
        if r not in (-1, 1):
            raise UsageError(f"in_degree needs +/-1 labels, saw {r}")
    count = sum(1 for r in labels if r == 1)
    return InDegree(count, -sum(labels))


def nnv_check(R: EdgeLabeling, v: int) -> bool:
    return out_weight(R, v) >= 0


def max_abs_label(R: EdgeLabeling) -> int:
    return max((abs(r) for r in R.labels.values()), default=0)


def random_as_labeling(n: int, rng: random.Random) -> EdgeLabeling:
    """Complete +/-1 labeling with independent uniform signs (dense, n <= 20)."""
    check_dim(n)
    if n > 20:
        raise CapacityError("dense labelings need n <= 20")
    labels = {}
    for v in range(1 << n):
        for i in range(n):
            if not (v >> i) & 1:
                labels[(v, i)] = rng.choice((-1, 1))
    return EdgeLabeling(n, labels, None, "as")


def suffix_length(n: int) -> int:
    """Random-walk suffix length n * ceil(2^(n/3))."""
    return n * math.ceil(2 ** (n / 3))


@dataclass(frozen=True)
class PathInstance:
    path: Path
    labeling: EdgeLabeling

    @property
    def n(self) -> int:
        return self.path.n

    @property
    def L(self) -> int:
        return self.path.length

    @property
    def end_vertex(self) -> int:
        return self.path.end


def make_path_instance(n: int, rng: random.Random, suffix: Optional[int] = None,
                       hamiltonian_prefix: bool = True) -> PathInstance:
    """Gray-code Hamiltonian prefix followed by a random-walk suffix."""
    steps = suffix_length(n) if suffix is None else suffix
    if hamiltonian_prefix:
        prefix = gray_path(n)
        path = prefix.concat(random_walk(prefix.end, steps, n, rng))
    else:
        path = random_walk(0, steps, n, rng)
    return PathInstance(path, label_from_path(path))
