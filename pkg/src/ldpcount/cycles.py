"""Private odd-length cycle estimation (k >= 5).

Per user, the fork pairs from the triangle pipeline are extended into sums
over admissible length-(k-2) vertex tuples between the fork endpoints; the
noise scale couples the clipped degree with a server-side walk sum over the
unbiased matrix.
"""

from __future__ import annotations

import numpy as np

from .errors import ResourceLimitError, ValidationError
from .graphs import Graph
from .mechanisms import (
    STAGE_COUNT,
    ObfuscatedGraph,
    PrivacyBudget,
    sample_laplace,
    substream,
    unbias_span,
)
from .triangles import (
    EstimateReport,
    _resolve_mode,
    run_ordered_stage,
    split_forks,
)

PATH_TUPLE_LIMIT = 10**9


def _require_odd_k(k: int) -> None:
    if k % 2 == 0 or k < 5:
        raise ValidationError(f"cycle length must be odd and >= 5, got {k}")


def server_walk_sum(obf: ObfuscatedGraph, k: int) -> float:
    """Sum over all (k-3)-vertex tuples of products of unbiased entries.

    Tuples may repeat vertices, so this equals ones @ A^(k-4) @ ones for the
    unbiased matrix A (zero diagonal) and costs k-4 matrix-vector products.
    It is a noise scale, not a path count.
    """
    _require_odd_k(k)
    a = obf.unbiased
    v = np.ones(obf.n, dtype=np.float64)
    for _ in range(k - 4):
        v = a @ v
    return float(v.sum())


def canonical_cycle(seq: tuple[int, ...]) -> tuple[int, ...]:
    """Rotate/reflect a cyclic vertex tuple to its canonical form."""
    pivot = seq.index(min(seq))
    rot = seq[pivot:] + seq[:pivot]
    if rot[1] > rot[-1]:
        rot = (rot[0],) + tuple(reversed(rot[1:]))
    return rot


def _triple_ok(u: int, v: int, w: int, i: int) -> bool:
    # Admissibility: a monotone consecutive triple may only have its center
    # ranked above the counting node, else a lower-ranked center would count
    # the same cycle again.
    if (u < v < w) or (u > v > w):
        return v > i
    return True


def _admissible_sum_dfs(
    i: int,
    j: int,
    kappa: int,
    k: int,
    ahat: np.ndarray,
    collector: dict | None = None,
) -> float:
    """Enumerate distinct-vertex tuples from j to kappa, k-2 edges long.

    Products with a zero factor are pruned, which makes the no-noise mode
    walk only real edges.  ``collector`` (no-noise instrumentation) counts
    each tuple with product exactly 1 under its canonical cycle key.
    """
    n = ahat.shape[0]
    used = bytearray(n)
    used[i] = used[j] = used[kappa] = 1
    path = [j]
    total = 0.0

    def extend(prev2: int, prev1: int, prod: float) -> None:
        nonlocal total
        if len(path) == k - 2:
            p = prod * ahat[prev1, kappa]
            if p == 0.0:
                return
            if not _triple_ok(prev2, prev1, kappa, i):
                return
            if not _triple_ok(prev1, kappa, i, i):
                return
            total += p
            if collector is not None and p == 1.0:
                key = canonical_cycle((i, *path, kappa))
                collector[key] = collector.get(key, 0) + 1
            return
        for v in range(n):
            if used[v]:
                continue
            p = prod * ahat[prev1, v]
            if p == 0.0:
                continue
            if not _triple_ok(prev2, prev1, v, i):
                continue
            used[v] = 1
            path.append(v)
            extend(prev1, v, p)
            path.pop()
            used[v] = 0

    extend(i, j, 1.0)
    return total


def _admissible_sum_k5_grid(i: int, j: int, kappa: int, ahat: np.ndarray) -> float:
    """Vectorized k=5 case: sum over the (l2, l3) grid with masked triples."""
    n = ahat.shape[0]
    ids = np.arange(n)
    # triple (i, j, l2) is monotone only as i > j > l2, so l2 < j is out
    valid2 = (ids > j) & (ids != i) & (ids != kappa)
    valid3 = (ids != i) & (ids != j) & (ids != kappa)
    allowed = np.outer(valid2, valid3)
    np.fill_diagonal(allowed, False)
    l2 = ids[:, None]
    l3 = ids[None, :]
    # triple (j, l2, l3): with l2 > j it is monotone iff l2 < l3
    allowed &= ~((l2 < l3) & (l2 < i))
    # triple (l2, l3, kappa)
    mono = ((l2 < l3) & (l3 < kappa)) | ((l2 > l3) & (l3 > kappa))
    allowed &= ~(mono & (l3 < i))
    # triple (l3, kappa, i) cannot be monotone with a center below i
    weights = np.multiply.outer(ahat[j], ahat[:, kappa]) * ahat
    return float(weights[allowed].sum())


def user_cycle_estimate(
    i: int,
    projected_row,
    obf: ObfuscatedGraph,
    k: int,
    *,
    collector: dict | None = None,
) -> float:
    """Sum admissible path products over all fork pairs of user i."""
    _require_odd_k(k)
    below, above = split_forks(tuple(projected_row), i)
    fork_count = len(below) * len(above)
    if fork_count == 0:
        return 0.0
    n = obf.n
    if n ** (k - 3) * fork_count > PATH_TUPLE_LIMIT:
        raise ResourceLimitError(
            f"user {i}: {fork_count} forks x n^{k - 3} tuples exceeds "
            f"{PATH_TUPLE_LIMIT}; shrink n or k"
        )
    ahat = obf.unbiased
    total = 0.0
    for j in below:
        for kappa in above:
            if k == 5 and collector is None:
                total += _admissible_sum_k5_grid(i, j, kappa, ahat)
            else:
                total += _admissible_sum_dfs(i, j, kappa, k, ahat, collector)
    return total


def user_cycle_noise(
    c_hat: float,
    d_hat: float,
    walk_sum: float,
    eps1: float,
    eps2: float,
    rng: np.random.Generator | None = None,
) -> float:
    """Laplace noise scaled by 3 * span(eps1)^2 * max(d_hat,0) * |walk_sum| / eps2.

    The walk sum enters through its magnitude: unbiased entries can be
    negative, and a negative scale would be meaningless.
    """
    scale = (
        3.0 * unbias_span(eps1) ** 2 * max(float(d_hat), 0.0) * abs(walk_sum) / eps2
    )
    if scale == 0.0:
        return float(c_hat)
    return float(c_hat) + float(sample_laplace(scale, rng))


def estimate_odd_cycles(
    graph: Graph,
    k: int,
    budget: PrivacyBudget | None,
    seed: int,
    mode: str = "noisy",
    *,
    trial: int = 0,
    multiplicity_out: dict | None = None,
) -> EstimateReport:
    """Full private k-cycle count for odd k >= 5.

    In no-noise mode the result equals the exact cycle count; passing
    ``multiplicity_out`` (no-noise only) records how many times each cycle
    was counted, keyed by canonical vertex tuple in original node ids.
    """
    _require_odd_k(k)
    noisy, eps0, eps1, eps2, zeta = _resolve_mode(mode, budget)
    if multiplicity_out is not None and noisy:
        raise ValidationError("multiplicity instrumentation needs no-noise mode")
    stage = run_ordered_stage(graph, eps0, eps1, zeta, seed, trial)
    walk_sum = server_walk_sum(stage.obf, k)
    n = graph.n
    collector: dict | None = {} if multiplicity_out is not None else None
    per_user = np.zeros(n, dtype=np.float64)
    for i in range(n):
        c = user_cycle_estimate(
            i, stage.projected[i], stage.obf, k, collector=collector
        )
        if noisy:
            c = user_cycle_noise(
                c,
                float(stage.clipped_degrees[i]),
                walk_sum,
                eps1,
                eps2,
                substream(seed, trial, STAGE_COUNT, i),
            )
        per_user[i] = c
    if multiplicity_out is not None:
        node_of_rank = stage.ordering.node_of_rank()
        for key, count in collector.items():
            original = canonical_cycle(tuple(int(node_of_rank[r]) for r in key))
            multiplicity_out[original] = multiplicity_out.get(original, 0) + count
    return EstimateReport(
        estimate=float(per_user.sum()),
        per_user=tuple(float(x) for x in per_user),
        budget=budget if noisy else None,
        seed=seed,
        clipped_users=stage.clipped_users,
        mode=mode,
        k=k,
        walk_sum=walk_sum,
    )
