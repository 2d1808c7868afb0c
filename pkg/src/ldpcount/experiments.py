"""Monte-Carlo harness, bound measurements, scaling studies, serialization.

Trials are independent given (master seed, trial index), so they can run on
any number of threads; aggregation keeps trial order and the outputs are
byte-identical for a fixed configuration.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .cycles import estimate_odd_cycles
from .errors import ValidationError
from .graphs import Graph, gen_ba, gen_er, gen_ktree, graph_stats, load_edge_list
from .mechanisms import PrivacyBudget, check_budget, derive_seed, substream
from .oracles import count_cycles, count_low2stars, count_monotone_cycles, count_triangles
from .ordering import apply_ordering, get_ordering
from .triangles import EstimateReport, estimate_triangles

TASKS = ("triangles", "cycles")
SUMMARY_COLUMNS = ("exact", "mean", "rmse", "bias", "stderr", "clipped_fraction")


def make_graph(spec: str, seed: int) -> Graph:
    """Build a graph from a generator spec: er:<n>:<p> | ba:<n>:<m0> | ktree:<n>:<k>."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValidationError(f"generator spec must have 3 fields, got {spec!r}")
    kind, a, b = parts
    try:
        if kind == "er":
            return gen_er(int(a), float(b), seed)
        if kind == "ba":
            return gen_ba(int(a), int(b), seed)
        if kind == "ktree":
            return gen_ktree(int(a), int(b), seed)
    except ValueError as exc:
        raise ValidationError(f"bad generator spec {spec!r}: {exc}") from None
    raise ValidationError(f"unknown generator kind {kind!r} in {spec!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte-Carlo run: graph source, task, budget, trial count."""

    task: str
    trials: int
    seed: int
    mode: str = "noisy"
    graph_path: str | None = None
    gen: str | None = None
    k: int | None = None
    budget: PrivacyBudget | None = None
    eps_total: float | None = None
    threads: int = 1
    keep_estimates: bool = False

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValidationError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if (self.graph_path is None) == (self.gen is None):
            raise ValidationError("exactly one of graph_path or gen is required")
        if self.task == "cycles" and self.k is None:
            raise ValidationError("cycle experiments need k")
        if self.mode == "noisy":
            if self.budget is None:
                raise ValidationError("noisy experiments need a budget")
            if self.eps_total is not None and not check_budget(
                self.budget, self.eps_total
            ):
                raise ValidationError(
                    f"budget spends {self.budget.total}, more than the declared "
                    f"total {self.eps_total}"
                )
        if self.threads < 1:
            raise ValidationError(f"threads must be >= 1, got {self.threads}")


def _config_graph(config: ExperimentConfig) -> Graph:
    if config.graph_path is not None:
        with open(config.graph_path, "r", encoding="utf-8") as fh:
            return load_edge_list(fh)
    return make_graph(config.gen, derive_seed(config.seed, "graph"))


@dataclass(frozen=True)
class TrialSummary:
    """Summary statistics of repeated estimates against the exact count.

    ``rmse`` is the empirical l2-error; ``clipped_fraction`` is the share of
    trials in which at least one user was clipped.
    """

    exact: float
    mean: float
    rmse: float
    bias: float
    stderr: float
    clipped_fraction: float
    estimates: tuple[float, ...] | None = None

    def to_json_dict(self) -> dict:
        doc = {"schema": 1}
        doc.update({c: getattr(self, c) for c in SUMMARY_COLUMNS})
        if self.estimates is not None:
            doc["estimates"] = list(self.estimates)
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "TrialSummary":
        est = doc.get("estimates")
        return cls(
            **{c: float(doc[c]) for c in SUMMARY_COLUMNS},
            estimates=None if est is None else tuple(float(x) for x in est),
        )

    def to_csv(self) -> str:
        header = ",".join(SUMMARY_COLUMNS)
        row = ",".join(repr(getattr(self, c)) for c in SUMMARY_COLUMNS)
        return f"{header}\n{row}\n"

    @classmethod
    def from_csv(cls, text: str) -> "TrialSummary":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if len(lines) != 2 or lines[0] != ",".join(SUMMARY_COLUMNS):
            raise ValidationError("unrecognized trial-summary CSV layout")
        values = [float(x) for x in lines[1].split(",")]
        return cls(**dict(zip(SUMMARY_COLUMNS, values)))


def summarize(exact: float, reports: list[EstimateReport]) -> TrialSummary:
    estimates = np.array([r.estimate for r in reports], dtype=np.float64)
    t = len(estimates)
    mean = float(estimates.mean())
    rmse = float(np.sqrt(np.mean((estimates - exact) ** 2)))
    stderr = float(estimates.std(ddof=1) / math.sqrt(t)) if t > 1 else 0.0
    clipped = float(np.mean([r.clipped_users > 0 for r in reports]))
    return TrialSummary(
        exact=float(exact),
        mean=mean,
        rmse=rmse,
        bias=mean - float(exact),
        stderr=stderr,
        clipped_fraction=clipped,
    )


def run_trials(config: ExperimentConfig) -> TrialSummary:
    """Exact count once, then independent estimation trials, then summary."""
    graph = _config_graph(config)
    if config.task == "triangles":
        exact = count_triangles(graph)
        run: Callable[[int], EstimateReport] = lambda t: estimate_triangles(
            graph, config.budget, config.seed, config.mode, trial=t
        )
    else:
        exact = count_cycles(graph, config.k)
        run = lambda t: estimate_odd_cycles(
            graph, config.k, config.budget, config.seed, config.mode, trial=t
        )
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            reports = list(pool.map(run, range(config.trials)))
    else:
        reports = [run(t) for t in range(config.trials)]
    summary = summarize(exact, reports)
    if config.keep_estimates:
        summary = replace(
            summary, estimates=tuple(r.estimate for r in reports)
        )
    return summary


@dataclass(frozen=True)
class BoundReport:
    """Measured ordered-structure counts against their analytic envelopes.

    The two ratio fields divide the measured means by degeneracy^2 * n and
    degeneracy^3 * n; they are reported, never asserted, because the
    analytic constants are asymptotic.
    """

    n: int
    m: int
    d_max: int
    degeneracy: int
    chiba_sum: int
    eps0: float
    orderings: int
    mean_low2stars: float
    stderr_low2stars: float
    mean_monotone_c4: float
    stderr_monotone_c4: float
    low2star_ratio: float
    monotone_c4_ratio: float
    low2star_bound_rhs: float  # chiba_sum + m / eps0
    chiba_bound_ok: bool  # chiba_sum <= 2 * m * degeneracy (provable form)
    chiba_within_m_delta: bool  # chiba_sum <= m * degeneracy (often false; reported)
    edge_count_ok: bool  # m <= degeneracy * n

    def to_json_dict(self) -> dict:
        doc = {"schema": 1}
        doc.update(self.__dict__)
        return doc


def verify_bounds(graph: Graph, orderings: int, eps0: float, seed: int) -> BoundReport:
    """Measure low-2-star and monotone-4-cycle counts over repeated orderings.

    The provable deterministic inequalities (chiba_sum <= 2*m*degeneracy,
    m <= degeneracy*n) are checked outright; failure would mean a counting
    bug.  The tighter chiba_sum <= m*degeneracy variant does not hold in
    general and is only reported.
    """
    if orderings < 1:
        raise ValidationError(f"orderings must be >= 1, got {orderings}")
    stats = graph_stats(graph)
    chiba_ok = stats.chiba_sum <= 2 * stats.m * stats.degeneracy
    edge_ok = stats.m <= stats.degeneracy * stats.n
    if not (chiba_ok and edge_ok):
        raise ValidationError(
            "deterministic degeneracy bounds violated; counting bug"
        )
    s2 = np.empty(orderings, dtype=np.float64)
    c4 = np.empty(orderings, dtype=np.float64)
    for r in range(orderings):
        ordering = get_ordering(graph, eps0, substream(seed, "ordering", r))
        reordered = apply_ordering(graph, ordering)
        s2[r] = count_low2stars(reordered)
        c4[r] = count_monotone_cycles(reordered, 4)
    delta = max(stats.degeneracy, 1)
    se = lambda x: float(x.std(ddof=1) / math.sqrt(orderings)) if orderings > 1 else 0.0
    return BoundReport(
        n=stats.n,
        m=stats.m,
        d_max=stats.d_max,
        degeneracy=stats.degeneracy,
        chiba_sum=stats.chiba_sum,
        eps0=eps0,
        orderings=orderings,
        mean_low2stars=float(s2.mean()),
        stderr_low2stars=se(s2),
        mean_monotone_c4=float(c4.mean()),
        stderr_monotone_c4=se(c4),
        low2star_ratio=float(s2.mean() / (delta**2 * max(stats.n, 1))),
        monotone_c4_ratio=float(c4.mean() / (delta**3 * max(stats.n, 1))),
        low2star_bound_rhs=stats.chiba_sum
        + (0.0 if eps0 == math.inf else stats.m / eps0),
        chiba_bound_ok=chiba_ok,
        chiba_within_m_delta=stats.chiba_sum <= stats.m * stats.degeneracy,
        edge_count_ok=edge_ok,
    )


@dataclass(frozen=True)
class ScalingReport:
    """Per-size error summaries plus the fitted log-log slope of the RMSE."""

    task: str
    gen_template: str
    sizes: tuple[int, ...]
    summaries: tuple[TrialSummary, ...]
    slope: float | None  # None when every RMSE is exactly zero (exact mode)

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "task": self.task,
            "gen_template": self.gen_template,
            "sizes": list(self.sizes),
            "summaries": [s.to_json_dict() for s in self.summaries],
            "slope": self.slope,
        }

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("n," + ",".join(SUMMARY_COLUMNS) + "\n")
        for n, s in zip(self.sizes, self.summaries):
            row = ",".join(repr(getattr(s, c)) for c in SUMMARY_COLUMNS)
            out.write(f"{n},{row}\n")
        return out.getvalue()


def error_scaling(
    task: str,
    gen_template: str,
    sizes,
    budget: PrivacyBudget | None,
    trials: int,
    seed: int,
    *,
    k: int | None = None,
    mode: str = "noisy",
    threads: int = 1,
) -> ScalingReport:
    """RMSE at each size plus a least-squares slope of log RMSE vs log n.

    ``gen_template`` must contain an ``{n}`` placeholder, e.g. ``ba:{n}:3``.
    """
    sizes = tuple(int(n) for n in sizes)
    if len(sizes) < 3 or list(sizes) != sorted(set(sizes)):
        raise ValidationError("need at least 3 strictly ascending sizes")
    if "{n}" not in gen_template:
        raise ValidationError("generator template must contain '{n}'")
    summaries = []
    for idx, n in enumerate(sizes):
        config = ExperimentConfig(
            task=task,
            trials=trials,
            seed=derive_seed(seed, "size", idx),
            mode=mode,
            gen=gen_template.format(n=n),
            k=k,
            budget=budget,
            threads=threads,
        )
        summaries.append(run_trials(config))
    rmses = np.array([s.rmse for s in summaries], dtype=np.float64)
    if np.all(rmses > 0):
        slope = float(
            np.polyfit(np.log(np.asarray(sizes, dtype=np.float64)), np.log(rmses), 1)[0]
        )
    else:
        slope = None
    return ScalingReport(
        task=task,
        gen_template=gen_template,
        sizes=sizes,
        summaries=tuple(summaries),
        slope=slope,
    )
