"""Exact brute-force subgraph counters used as ground truth.

Everything here enumerates explicitly and is meant for desk-scale inputs;
a shared step counter aborts with ResourceLimitError once 1e8 partial
paths have been visited.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator

from .errors import ResourceLimitError, ValidationError
from .graphs import Graph

PARTIAL_PATH_LIMIT = 10**8
MAX_CYCLE_LENGTH = 9


def count_triangles(graph: Graph) -> int:
    """Number of triangles, one count per vertex set."""
    total = 0
    for u, v in graph.edges:
        # each triangle {a<b<c} is charged to its edge (a, b) via w=c
        small, other = graph.adj[u], graph.adj_sets[v]
        if len(graph.adj[v]) < len(small):
            small, other = graph.adj[v], graph.adj_sets[u]
        total += sum(1 for w in small if w > v and w in other)
    return total


def _step(counter: list[int]) -> None:
    counter[0] += 1
    if counter[0] > PARTIAL_PATH_LIMIT:
        raise ResourceLimitError(
            f"enumeration exceeded {PARTIAL_PATH_LIMIT} partial paths; "
            "shrink the instance"
        )


def enumerate_cycles(graph: Graph, k: int) -> Iterator[tuple[int, ...]]:
    """Yield each k-cycle once, as a canonical vertex tuple.

    Canonical form: minimum vertex first, then the direction whose second
    vertex is smaller than the last.
    """
    if k < 3:
        raise ValidationError(f"cycle length must be >= 3, got {k}")
    if k > MAX_CYCLE_LENGTH:
        raise ResourceLimitError(
            f"cycle length {k} exceeds the desk-scale cap of {MAX_CYCLE_LENGTH}"
        )
    counter = [0]
    path: list[int] = []
    on_path: set[int] = set()
    adj = graph.adj
    adj_sets = graph.adj_sets

    def extend(start: int) -> Iterator[tuple[int, ...]]:
        last = path[-1]
        if len(path) == k:
            if start in adj_sets[last] and path[1] < path[-1]:
                yield tuple(path)
            return
        for w in adj[last]:
            _step(counter)
            if w > start and w not in on_path:
                path.append(w)
                on_path.add(w)
                yield from extend(start)
                path.pop()
                on_path.remove(w)

    for s in range(graph.n):
        path[:] = [s]
        on_path = {s}
        yield from extend(s)


def count_cycles(graph: Graph, k: int) -> int:
    """Number of distinct k-cycles (vertex sets with cyclic order)."""
    return sum(1 for _ in enumerate_cycles(graph, k))


def count_paths(graph: Graph, k: int) -> int:
    """Number of simple paths with k edges, endpoint-unordered."""
    if k < 1:
        raise ValidationError(f"path edge count must be >= 1, got {k}")
    counter = [0]
    adj = graph.adj
    total = 0
    path: list[int] = []
    on_path: set[int] = set()

    def extend(start: int) -> int:
        found = 0
        last = path[-1]
        if len(path) == k + 1:
            return 1 if start < last else 0
        for w in adj[last]:
            _step(counter)
            if w not in on_path:
                path.append(w)
                on_path.add(w)
                found += extend(start)
                path.pop()
                on_path.remove(w)
        return found

    for s in range(graph.n):
        path[:] = [s]
        on_path = {s}
        total += extend(s)
    return total


def count_low2stars(graph: Graph) -> int:
    """Sum over nodes of (lower-id neighbor count) * (degree - 1).

    Ordering-sensitive by design: node ids must already be the ranks.
    """
    lower = [0] * graph.n
    for u, v in graph.edges:
        lower[max(u, v)] += 1
    d = graph.degrees
    return int(sum(lower[i] * (int(d[i]) - 1) for i in range(graph.n)))


def has_monotone_triple(cycle: tuple[int, ...]) -> bool:
    """True if some cyclically consecutive triple has monotone ids."""
    L = len(cycle)
    for t in range(L):
        a, b, c = cycle[t], cycle[(t + 1) % L], cycle[(t + 2) % L]
        if a < b < c or a > b > c:
            return True
    return False


def _monotone_4cycles(graph: Graph) -> int:
    # Each 4-cycle (u, x, w, y) has diagonals {u, w} and {x, y}; counting only
    # u < w, x < y, u < x visits every 4-cycle exactly once.
    total = 0
    for u in range(graph.n):
        common: dict[int, list[int]] = {}
        for x in graph.adj[u]:
            for w in graph.adj[x]:
                if w > u:
                    common.setdefault(w, []).append(x)
        for w, xs in common.items():
            if len(xs) < 2:
                continue
            for x, y in combinations(xs, 2):  # xs ascending, so x < y
                if u < x and has_monotone_triple((u, x, w, y)):
                    total += 1
    return total


def count_monotone_cycles(graph: Graph, length: int) -> int:
    """Even-length cycles containing at least one monotone consecutive triple.

    Ordering-sensitive: node ids must already be the ranks.  The length-4
    case uses a diagonal-pair enumeration; both routes are cross-checked in
    the test suite.
    """
    if length % 2 != 0 or length < 4:
        raise ValidationError(f"length must be even and >= 4, got {length}")
    if length == 4:
        return _monotone_4cycles(graph)
    return sum(1 for c in enumerate_cycles(graph, length) if has_monotone_triple(c))


@dataclass(frozen=True)
class ExactCounts:
    """Bundle of exact counts, JSON-serializable for the CLI."""

    triangles: int
    low2stars: int
    cycles: dict[int, int] = field(default_factory=dict)
    paths: dict[int, int] = field(default_factory=dict)
    monotone_cycles: dict[int, int] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "triangles": self.triangles,
            "low2stars": self.low2stars,
            "cycles": {str(k): v for k, v in sorted(self.cycles.items())},
            "paths": {str(k): v for k, v in sorted(self.paths.items())},
            "monotone_cycles": {
                str(k): v for k, v in sorted(self.monotone_cycles.items())
            },
        }


def exact_counts(
    graph: Graph,
    cycle_lengths: tuple[int, ...] = (),
    path_lengths: tuple[int, ...] = (),
    monotone_lengths: tuple[int, ...] = (),
) -> ExactCounts:
    return ExactCounts(
        triangles=count_triangles(graph),
        low2stars=count_low2stars(graph),
        cycles={k: count_cycles(graph, k) for k in cycle_lengths},
        paths={k: count_paths(graph, k) for k in path_lengths},
        monotone_cycles={k: count_monotone_cycles(graph, k) for k in monotone_lengths},
    )
