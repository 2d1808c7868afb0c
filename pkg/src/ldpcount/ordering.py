"""Noisy-degree publication and the low-degree node ordering built from it."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graphs import Graph, relabel
from .mechanisms import sample_laplace

# Publishing a degree has global sensitivity 1: adding or removing one edge
# changes it by exactly 1.
DEGREE_SENSITIVITY = 1.0


@dataclass(frozen=True)
class NodeOrdering:
    """Ranks from noisy degrees: rank 0 is the largest noisy degree.

    ``phi[i]`` is the rank assigned to node i.  Ties (which only occur in
    the no-noise mode) break toward the smaller node id.  The noisy degrees
    are retained so later stages reuse them without spending extra budget.
    """

    phi: np.ndarray
    noisy_degrees: np.ndarray
    eps0: float

    def __post_init__(self):
        n = len(self.phi)
        if not np.array_equal(np.sort(self.phi), np.arange(n)):
            raise ValidationError("phi is not a bijection on [0, n)")
        self.phi.flags.writeable = False
        self.noisy_degrees.flags.writeable = False

    @property
    def n(self) -> int:
        return len(self.phi)

    def node_of_rank(self) -> np.ndarray:
        """Inverse permutation: node carrying each rank."""
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.phi] = np.arange(self.n)
        return inv

    def to_json_dict(self) -> dict:
        return {
            "phi": [int(r) for r in self.phi],
            "noisy_degrees": [float(d) for d in self.noisy_degrees],
            "eps0": self.eps0,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "NodeOrdering":
        return cls(
            phi=np.asarray(doc["phi"], dtype=np.int64),
            noisy_degrees=np.asarray(doc["noisy_degrees"], dtype=np.float64),
            eps0=float(doc["eps0"]),
        )


def get_ordering(graph: Graph, eps0: float, rng=None) -> NodeOrdering:
    """Publish degrees with Laplace noise of scale 1/eps0 and rank them.

    ``rng`` may be a single numpy Generator (noise drawn sequentially in node
    order) or a sequence of per-user Generators for the substream contract.
    At eps0=inf the degrees are published exactly and ``rng`` is unused.
    """
    if not eps0 > 0:
        raise ValidationError(f"eps0 must be > 0, got {eps0}")
    n = graph.n
    degrees = graph.degrees.astype(np.float64)
    if eps0 == math.inf:
        noisy = degrees.copy()
    elif isinstance(rng, np.random.Generator):
        noisy = degrees + sample_laplace(DEGREE_SENSITIVITY / eps0, rng, size=n)
    elif rng is not None:
        gens = list(rng)
        if len(gens) != n:
            raise ValidationError(f"need {n} per-user generators, got {len(gens)}")
        noise = np.array(
            [sample_laplace(DEGREE_SENSITIVITY / eps0, g) for g in gens],
            dtype=np.float64,
        )
        noisy = degrees + noise
    else:
        raise ValidationError("rng is required for finite eps0")
    order = np.lexsort((np.arange(n), -noisy))
    phi = np.empty(n, dtype=np.int64)
    phi[order] = np.arange(n)
    return NodeOrdering(phi=phi, noisy_degrees=noisy, eps0=eps0)


def apply_ordering(graph: Graph, ordering: NodeOrdering) -> Graph:
    """Relabel so the node with the largest noisy degree becomes id 0."""
    if ordering.n != graph.n:
        raise ValidationError(
            f"ordering covers {ordering.n} nodes, graph has {graph.n}"
        )
    return relabel(graph, ordering.phi)
