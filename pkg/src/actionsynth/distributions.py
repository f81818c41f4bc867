"""Seeded sampling primitives: triangular, categorical, Bernoulli and bounded uniform.

Every stochastic choice in the generator goes through an :class:`RngStream`,
a deterministic stream keyed by (seed, stream ids). Identical keys produce
identical draw sequences on any host and under any scheduling, which is what
makes parallel scenario generation reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "TriangularParams",
    "CategoricalWeights",
    "RngStream",
    "derive_seed",
    "triangular_pdf",
    "triangular_cdf",
    "triangular_inverse_cdf",
    "triangular_sample",
    "categorical_sample",
    "bernoulli_sample",
]


def derive_seed(master_seed: int, *ids: int) -> int:
    """Derive a 64-bit scenario seed from a master seed and integer ids.

    Pure function of its arguments; independent of call order, so workers can
    derive their own seeds from (master, index, attempt) in any schedule.
    """
    state = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(i) for i in ids))
    return int(state.generate_state(1, np.uint64)[0])


class RngStream:
    """Deterministic random stream identified by (seed, stream ids).

    Instances are independently owned (never shared across scenarios); all
    methods mutate only this stream's internal state.
    """

    def __init__(self, seed: int, *ids: int):
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        self.seed = int(seed)
        self.ids = tuple(int(i) for i in ids)
        seq = np.random.SeedSequence(self.seed, spawn_key=self.ids)
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, ids={self.ids})"

    def child(self, *ids: int) -> "RngStream":
        """Derive an independent stream without advancing this one."""
        return RngStream(self.seed, *self.ids, *ids)

    def random(self) -> float:
        """Uniform draw in [0, 1)."""
        return float(self._gen.random())

    def uniform(self, low: float, high: float) -> float:
        """Bounded uniform draw in [low, high)."""
        if not low <= high:
            raise ValueError(f"uniform needs low <= high, got [{low}, {high}]")
        return float(self._gen.uniform(low, high))

    def integers(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError(f"integers needs n > 0, got {n}")
        return int(self._gen.integers(n))

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)


@dataclass(frozen=True)
class TriangularParams:
    """Support [lower, upper] with the density peak at mode.

    Degenerate peaks at either end (mode == lower or mode == upper) are
    allowed; a zero-width support is not.
    """

    lower: float
    upper: float
    mode: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(
                f"triangular needs lower < upper, got [{self.lower}, {self.upper}]"
            )
        if not self.lower <= self.mode <= self.upper:
            raise ValueError(
                f"triangular mode {self.mode} outside [{self.lower}, {self.upper}]"
            )

    @property
    def mean(self) -> float:
        return (self.lower + self.upper + self.mode) / 3.0


def triangular_pdf(p: TriangularParams, x: float) -> float:
    """Piecewise-linear density, rising on [lower, mode], falling on [mode, upper]."""
    a, b, c = p.lower, p.upper, p.mode
    if x < a or x > b:
        return 0.0
    if x == c:
        return 2.0 / (b - a)
    if x < c:
        return 2.0 * (x - a) / ((b - a) * (c - a))
    return 2.0 * (b - x) / ((b - a) * (b - c))


def triangular_cdf(p: TriangularParams, x: float) -> float:
    a, b, c = p.lower, p.upper, p.mode
    if x <= a:
        return 0.0
    if x >= b:
        return 1.0
    if x < c:
        return (x - a) ** 2 / ((b - a) * (c - a))
    return 1.0 - (b - x) ** 2 / ((b - a) * (b - c))


def triangular_inverse_cdf(p: TriangularParams, u: float) -> float:
    """Analytic quantile function; exact and branchless in the sampled variable."""
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"quantile argument must be in [0, 1], got {u}")
    a, b, c = p.lower, p.upper, p.mode
    split = (c - a) / (b - a)
    if u <= split:
        return a + math.sqrt(u * (b - a) * (c - a))
    return b - math.sqrt((1.0 - u) * (b - a) * (b - c))


def triangular_sample(p: TriangularParams, rng: RngStream) -> float:
    """Inverse-CDF draw; always lands inside [lower, upper]."""
    return triangular_inverse_cdf(p, rng.random())


@dataclass(frozen=True)
class CategoricalWeights:
    """Non-negative weights over category indices; normalized at sampling time."""

    weights: tuple[float, ...]

    def __init__(self, weights: Sequence[float]):
        object.__setattr__(self, "weights", tuple(float(w) for w in weights))
        if not self.weights:
            raise ValueError("categorical needs at least one weight")
        for w in self.weights:
            if not math.isfinite(w) or w < 0.0:
                raise ValueError(f"categorical weights must be finite and >= 0, got {w}")
        if not any(w > 0.0 for w in self.weights):
            raise ValueError("categorical weights are all zero")

    def __len__(self) -> int:
        return len(self.weights)

    def probabilities(self) -> np.ndarray:
        w = np.asarray(self.weights, dtype=np.float64)
        return w / w.sum()


def categorical_sample(w: CategoricalWeights, rng: RngStream) -> int:
    """Draw an index with P(i) proportional to weights[i]; zero weights never win."""
    cum = np.cumsum(w.weights)
    u = rng.random() * cum[-1]
    idx = int(np.searchsorted(cum, u, side="right"))
    idx = min(idx, len(w.weights) - 1)
    while w.weights[idx] == 0.0:  # float-edge guard; cannot step below index 0
        idx -= 1
    return idx


def bernoulli_sample(prob: float, rng: RngStream) -> bool:
    if not 0.0 <= prob <= 1.0:
        raise ValueError(f"Bernoulli probability must be in [0, 1], got {prob}")
    return rng.random() < prob
