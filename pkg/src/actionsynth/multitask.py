"""Segmental consensus and the two-head multi-task classification loss.

Scores arrive as plain (segments x classes) matrices per head ("real" and
"virtual"); the consensus is their arithmetic mean over segments, and the
loss is a per-head softmax cross-entropy weighted by each source's share of
the mini-batch. Only the head matching the label's source contributes.
Mixed mini-batches follow the 256 = 8 x 32 layout with 10 virtual + 22 real
samples per block, so the per-block and per-batch source proportions
coincide (10/32 == 80/256).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .distributions import RngStream

__all__ = [
    "SOURCES",
    "SegmentScores",
    "MultiTaskLabel",
    "LossWeights",
    "MixedBatchPlan",
    "segmental_consensus",
    "multitask_loss",
    "loss_gradient",
    "finite_difference_check",
    "build_minibatch",
]

SOURCES = ("real", "virtual")

BATCH_SIZE = 256
BLOCKS = 8
BLOCK_SIZE = 32
VIRTUAL_PER_BLOCK = 10
REAL_PER_BLOCK = BLOCK_SIZE - VIRTUAL_PER_BLOCK


@dataclass(frozen=True)
class SegmentScores:
    """Per-head (segments x classes) score matrices."""

    real: np.ndarray
    virtual: np.ndarray

    def __post_init__(self):
        for name in SOURCES:
            m = np.asarray(getattr(self, name), dtype=np.float64)
            if m.ndim != 2 or m.shape[0] < 1:
                raise ValueError(f"{name} scores must be a (segments, classes) matrix")
            if not np.all(np.isfinite(m)):
                raise ValueError(f"{name} scores contain non-finite entries")
            object.__setattr__(self, name, m)

    def consensus(self) -> dict[str, np.ndarray]:
        return {name: segmental_consensus(getattr(self, name)) for name in SOURCES}


@dataclass(frozen=True)
class MultiTaskLabel:
    source: str
    class_index: int

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"label source must be one of {SOURCES}, got {self.source!r}")
        if self.class_index < 0:
            raise ValueError("label class index must be non-negative")


@dataclass(frozen=True)
class LossWeights:
    real: float
    virtual: float

    def get(self, source: str) -> float:
        return getattr(self, source)


def segmental_consensus(scores) -> np.ndarray:
    """Arithmetic mean of the per-segment score rows."""
    m = np.asarray(scores, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1:
        raise ValueError("scores must be a (segments, classes) matrix")
    return m.mean(axis=0)


def _log_softmax(g: np.ndarray) -> np.ndarray:
    # log-sum-exp with max subtraction; matches the naive formula wherever
    # the naive formula is finite.
    shift = g - g.max()
    return shift - np.log(np.exp(shift).sum())


def _check_label(heads: Mapping[str, np.ndarray], label: MultiTaskLabel) -> np.ndarray:
    g = np.asarray(heads[label.source], dtype=np.float64)
    if g.ndim != 1:
        raise ValueError("consensus per head must be a class-score vector")
    if label.class_index >= g.shape[0]:
        raise ValueError(
            f"label class {label.class_index} out of range for {g.shape[0]} {label.source} classes"
        )
    return g


def multitask_loss(heads: Mapping[str, np.ndarray], label: MultiTaskLabel,
                   weights: LossWeights) -> float:
    """Source-weighted softmax cross-entropy; only the labeled head contributes."""
    g = _check_label(heads, label)
    return float(-weights.get(label.source) * _log_softmax(g)[label.class_index])


def loss_gradient(heads: Mapping[str, np.ndarray], label: MultiTaskLabel,
                  weights: LossWeights) -> dict[str, np.ndarray]:
    """d(loss)/d(consensus) per head: w_z * (softmax - onehot) for the labeled
    head, a zero vector for the other."""
    _check_label(heads, label)
    out = {}
    for source in SOURCES:
        g = np.asarray(heads[source], dtype=np.float64)
        if source == label.source:
            p = np.exp(_log_softmax(g))
            p[label.class_index] -= 1.0
            out[source] = weights.get(source) * p
        else:
            out[source] = np.zeros_like(g)
    return out


def finite_difference_check(heads: Mapping[str, np.ndarray], label: MultiTaskLabel,
                            weights: LossWeights, h: float = 1e-5) -> float:
    """Max relative error between the analytic gradient and central differences."""
    grad = loss_gradient(heads, label, weights)
    worst = 0.0
    for source in SOURCES:
        g = np.asarray(heads[source], dtype=np.float64)
        for i in range(g.shape[0]):
            plus = {s: np.asarray(heads[s], dtype=np.float64).copy() for s in SOURCES}
            minus = {s: np.asarray(heads[s], dtype=np.float64).copy() for s in SOURCES}
            plus[source][i] += h
            minus[source][i] -= h
            fd = (multitask_loss(plus, label, weights) - multitask_loss(minus, label, weights)) / (2 * h)
            denom = max(abs(fd), abs(grad[source][i]), 1e-8)
            worst = max(worst, abs(fd - grad[source][i]) / denom)
    return worst


@dataclass(frozen=True)
class MixedBatchPlan:
    """8 blocks of 32 sample references, 10 virtual + 22 real each."""

    blocks: tuple[tuple[tuple[str, str], ...], ...]
    weights: LossWeights

    def __post_init__(self):
        if len(self.blocks) != BLOCKS:
            raise ValueError(f"need {BLOCKS} blocks, got {len(self.blocks)}")
        for i, block in enumerate(self.blocks):
            if len(block) != BLOCK_SIZE:
                raise ValueError(f"block {i}: need {BLOCK_SIZE} samples, got {len(block)}")
            virtual = sum(1 for source, _ in block if source == "virtual")
            if virtual != VIRTUAL_PER_BLOCK:
                raise ValueError(
                    f"block {i}: need {VIRTUAL_PER_BLOCK} virtual samples, got {virtual}"
                )
        n_real = BLOCKS * REAL_PER_BLOCK
        n_virtual = BLOCKS * VIRTUAL_PER_BLOCK
        if self.weights.real != n_real / BATCH_SIZE or self.weights.virtual != n_virtual / BATCH_SIZE:
            raise ValueError("weights must equal each source's share of the batch")

    def samples(self) -> list[tuple[str, str]]:
        return [ref for block in self.blocks for ref in block]


def _draw(pool: Sequence[str], demand: int, rng: RngStream) -> list[str]:
    # Without replacement when the pool suffices, with replacement otherwise.
    if len(pool) >= demand:
        order = rng.permutation(len(pool))[:demand]
        return [pool[i] for i in order]
    return [pool[rng.integers(len(pool))] for _ in range(demand)]


def build_minibatch(real_ids: Sequence[str], virtual_ids: Sequence[str],
                    rng: RngStream) -> MixedBatchPlan:
    """Plan one 256-sample mixed batch; loss weights are the source proportions."""
    if not real_ids:
        raise ValueError("real pool is empty")
    if not virtual_ids:
        raise ValueError("virtual pool is empty")
    real = _draw(real_ids, BLOCKS * REAL_PER_BLOCK, rng)
    virtual = _draw(virtual_ids, BLOCKS * VIRTUAL_PER_BLOCK, rng)
    blocks = []
    for b in range(BLOCKS):
        block = [("real", rid) for rid in real[b * REAL_PER_BLOCK:(b + 1) * REAL_PER_BLOCK]]
        block += [("virtual", vid) for vid in virtual[b * VIRTUAL_PER_BLOCK:(b + 1) * VIRTUAL_PER_BLOCK]]
        order = rng.permutation(BLOCK_SIZE)
        blocks.append(tuple(block[i] for i in order))
    weights = LossWeights(
        real=BLOCKS * REAL_PER_BLOCK / BATCH_SIZE,
        virtual=BLOCKS * VIRTUAL_PER_BLOCK / BATCH_SIZE,
    )
    return MixedBatchPlan(blocks=tuple(blocks), weights=weights)
