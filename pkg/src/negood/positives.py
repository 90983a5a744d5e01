"""Synthesis of positive-label embeddings.

Each ID text embedding z is pushed through the semantics-preserving
transformation ``l2(z + sigma * eps)`` with a fresh standard-normal eps,
producing one synthetic positive per ID label. The bank is built once
per scoring run (not per test input), so scores stay deterministic
within a run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import STREAM_POSITIVES, EmbeddingMatrix, module_rng
from .errors import ZeroNormResult


@dataclass(frozen=True)
class PositiveBank:
    """Synthesized positive-label embeddings, one per ID label."""

    vectors: EmbeddingMatrix
    source: EmbeddingMatrix
    sigma: float
    seed: int

    def __post_init__(self):
        if self.vectors.rows != self.source.rows:
            raise ValueError(
                f"{self.vectors.rows} positives for {self.source.rows} ID labels"
            )


def perturb(z, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """One draw of l2(z + sigma * eps); always consumes one eps from rng.

    sigma=0 returns z exactly (no renormalization). A zero-norm result is
    resampled once, then raises ZeroNormResult.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    z = np.asarray(z, dtype=np.float64)
    eps = rng.standard_normal(z.size)
    if sigma == 0.0:
        return z.copy()
    for _ in range(2):
        w = z + sigma * eps
        norm = np.linalg.norm(w)
        if norm > 0.0:
            return w / norm
        eps = rng.standard_normal(z.size)
    raise ZeroNormResult("perturbation cancelled the input twice")


def synthesize_bank(id_texts: EmbeddingMatrix, sigma: float, seed: int) -> PositiveBank:
    """Perturb every ID text row, consuming rng draws in row order."""
    rng = module_rng(seed, STREAM_POSITIVES)
    rows = [perturb(id_texts.data[i], sigma, rng) for i in range(id_texts.rows)]
    vectors = EmbeddingMatrix(np.stack(rows), id_texts.labels)
    return PositiveBank(vectors=vectors, source=id_texts, sigma=sigma, seed=seed)
