"""Privacy primitives: Laplace noise, randomized response, projection, budgets.

All randomness flows through numpy Generators.  Reproducible parallel runs
derive one generator per (master seed, trial, stage, user) via
:func:`substream`; the derivation is part of the external contract.

Setting a budget component to ``math.inf`` turns the corresponding mechanism
into the identity.  That is a test-harness feature, not a privacy mode.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ValidationError

INF = math.inf

# Stage tags for substream derivation, one per query in the protocol.
STAGE_DEGREE = 0
STAGE_RR = 1
STAGE_COUNT = 2

BUDGET_SLACK = 1e-12


def derive_seed(master: int, *path: int | str) -> int:
    """64-bit seed for a derivation path: blake2b over "master|p0|p1|...".

    Components are rendered in decimal (strings verbatim) and joined with
    '|', so distinct paths collide only with hash probability.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(master).encode())
    for p in path:
        h.update(b"|")
        h.update(str(p).encode())
    return int.from_bytes(h.digest(), "little")


def substream(master: int, *path: int | str) -> np.random.Generator:
    """Independent generator for a derivation path (counter-based Philox)."""
    return np.random.Generator(np.random.Philox(key=derive_seed(master, *path)))


def laplace_quantile(u: float | np.ndarray, scale: float):
    """Inverse CDF of the centered Laplace distribution; u=0.5 maps to 0."""
    u = np.asarray(u, dtype=np.float64)
    # guard u=0: the log argument is clamped to the smallest normal float
    lo = np.maximum(2.0 * u, np.finfo(np.float64).tiny)
    hi = np.maximum(2.0 * (1.0 - u), np.finfo(np.float64).tiny)
    out = np.where(u < 0.5, scale * np.log(lo), -scale * np.log(hi))
    out = np.where(u == 0.5, 0.0, out)
    return out if out.ndim else float(out)


def sample_laplace(scale: float, rng: np.random.Generator, size: int | None = None):
    """Centered Laplace sample(s) via inverse CDF on a uniform draw."""
    if not scale > 0:
        raise ValidationError(f"Laplace scale must be > 0, got {scale}")
    u = rng.random(size) if size is not None else rng.random()
    return laplace_quantile(u, scale)


def laplace_query(
    value: float,
    sensitivity: float,
    eps: float,
    rng: np.random.Generator | None = None,
) -> float:
    """value + Lap(sensitivity / eps); exact when eps is infinite."""
    if not sensitivity > 0:
        raise ValidationError(f"sensitivity must be > 0, got {sensitivity}")
    if not eps > 0:
        raise ValidationError(f"privacy budget must be > 0, got {eps}")
    scale = sensitivity / eps
    if scale == 0.0:
        return float(value)
    return float(value) + float(sample_laplace(scale, rng))


def rr_keep_probability(eps: float) -> float:
    """Probability that randomized response preserves a bit: e^eps/(1+e^eps)."""
    return 1.0 / (1.0 + math.exp(-eps))


def randomize_response_row(bits, eps: float, rng: np.random.Generator | None = None):
    """Flip each bit independently with probability 1/(1+e^eps).

    At eps=inf this is the identity and consumes no randomness.
    """
    if not eps > 0:
        raise ValidationError(f"privacy budget must be > 0, got {eps}")
    bits = np.asarray(bits, dtype=np.uint8)
    if eps == INF:
        return bits.copy()
    flip = rng.random(bits.shape) < (1.0 - rr_keep_probability(eps))
    return np.bitwise_xor(bits, flip.astype(np.uint8))


def unbias(bit: int, eps: float) -> float:
    """Affine correction making a randomized bit an unbiased edge estimate."""
    if eps == INF:
        return float(bit)
    e = math.exp(eps)
    return ((e + 1.0) * float(bit) - 1.0) / (e - 1.0)


def unbias_span(eps: float) -> float:
    """unbias(1) - unbias(0), i.e. (e^eps+1)/(e^eps-1); 1.0 at eps=inf.

    This span bounds how much one flipped adjacency bit can move any
    estimate built from unbiased entries, so it scales the Laplace noise.
    """
    if eps == INF:
        return 1.0
    return 1.0 / math.tanh(eps / 2.0)


def unbias_variance(eps: float) -> float:
    """Variance of an unbiased randomized-response entry: e^eps/(e^eps-1)^2."""
    if eps == INF:
        return 0.0
    e = math.exp(eps)
    return e / (e - 1.0) ** 2


@dataclass(frozen=True)
class ObfuscatedGraph:
    """Symmetric randomized-response bit matrix plus the budget it spent."""

    bits: np.ndarray
    eps: float

    def __post_init__(self):
        self.bits.flags.writeable = False

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    @cached_property
    def unbiased(self) -> np.ndarray:
        """Matrix of unbiased edge estimates, diagonal forced to zero."""
        if self.eps == INF:
            a = self.bits.astype(np.float64)
        else:
            e = math.exp(self.eps)
            a = ((e + 1.0) * self.bits.astype(np.float64) - 1.0) / (e - 1.0)
        np.fill_diagonal(a, 0.0)
        a.flags.writeable = False
        return a


def assemble_obfuscated(rows, eps: float) -> ObfuscatedGraph:
    """Mirror per-user lower-triangle reports into a symmetric matrix.

    ``rows[i]`` must hold user i's randomized bits for partners j < i, so
    each unordered pair is reported exactly once.
    """
    n = len(rows)
    bits = np.zeros((n, n), dtype=np.uint8)
    for i, row in enumerate(rows):
        row = np.asarray(row, dtype=np.uint8)
        if row.shape != (i,):
            raise ValidationError(
                f"user {i} must report exactly {i} bits, got shape {row.shape}"
            )
        bits[i, :i] = row
    bits = bits + bits.T
    return ObfuscatedGraph(bits=bits, eps=eps)


def project_mu(neighbors, cap: int):
    """Keep only the first ``cap`` neighbors in the fixed (ascending) order."""
    cap = max(int(cap), 0)
    return tuple(neighbors[:cap])


@dataclass(frozen=True)
class PrivacyBudget:
    """Per-query budgets: degree publication, randomized response, counting.

    ``zeta`` is the acceptable probability that some user's degree estimate
    falls below their true degree after the clipping correction.
    """

    eps0: float
    eps1: float
    eps2: float
    zeta: float

    def __post_init__(self):
        for name in ("eps0", "eps1", "eps2"):
            v = getattr(self, name)
            if not v > 0:
                raise ValidationError(f"{name} must be > 0, got {v}")
        if not 0.0 < self.zeta <= 1.0:
            raise ValidationError(f"zeta must be in (0, 1], got {self.zeta}")

    @property
    def total(self) -> float:
        return self.eps0 + self.eps1 + self.eps2

    def to_json_dict(self) -> dict:
        return {
            "eps0": self.eps0,
            "eps1": self.eps1,
            "eps2": self.eps2,
            "zeta": self.zeta,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "PrivacyBudget":
        return cls(
            eps0=doc["eps0"], eps1=doc["eps1"], eps2=doc["eps2"], zeta=doc["zeta"]
        )


def check_budget(budget: PrivacyBudget, eps_total: float) -> bool:
    """True iff the three query budgets sum to at most eps_total.

    A tiny absolute slack absorbs decimal parsing of command-line flags.
    """
    return budget.total <= eps_total + BUDGET_SLACK
