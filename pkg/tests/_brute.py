"""Independent brute-force counters based on subset/permutation enumeration.

These deliberately avoid the library's DFS machinery so the two routes act
as oracles for each other.  Only usable at tiny sizes.
"""

from itertools import combinations, permutations

from ldpcount import Graph
from ldpcount.oracles import has_monotone_triple


def cyclic_arrangements(vertices):
    """Each cyclic order of a vertex set once, up to rotation and reflection."""
    first, *rest = sorted(vertices)
    for perm in permutations(rest):
        if perm[0] < perm[-1]:
            yield (first, *perm)


def _is_cycle(graph: Graph, seq) -> bool:
    k = len(seq)
    return all(graph.has_edge(seq[t], seq[(t + 1) % k]) for t in range(k))


def brute_count_triangles(graph: Graph) -> int:
    return sum(
        1
        for a, b, c in combinations(range(graph.n), 3)
        if graph.has_edge(a, b) and graph.has_edge(b, c) and graph.has_edge(a, c)
    )


def brute_count_cycles(graph: Graph, k: int) -> int:
    total = 0
    for subset in combinations(range(graph.n), k):
        total += sum(1 for seq in cyclic_arrangements(subset) if _is_cycle(graph, seq))
    return total


def brute_count_paths(graph: Graph, k: int) -> int:
    total = 0
    for subset in combinations(range(graph.n), k + 1):
        for perm in permutations(subset):
            if perm[0] > perm[-1]:
                continue  # endpoint-unordered: count each path once
            if all(graph.has_edge(perm[t], perm[t + 1]) for t in range(k)):
                total += 1
    return total


def brute_count_monotone_cycles(graph: Graph, length: int) -> int:
    total = 0
    for subset in combinations(range(graph.n), length):
        for seq in cyclic_arrangements(subset):
            if _is_cycle(graph, seq) and has_monotone_triple(seq):
                total += 1
    return total
