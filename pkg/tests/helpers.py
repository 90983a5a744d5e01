"""Shared test utilities."""

import numpy as np

from negood import EmbeddingMatrix, ScoreConfig, ScoringContext
from negood.core import l2_normalize


def unit_matrix(rng, rows, dim, labels=False):
    """Random unit-row EmbeddingMatrix."""
    data = l2_normalize(rng.standard_normal((rows, dim)))
    names = tuple(f"row_{i}" for i in range(rows)) if labels else None
    return EmbeddingMatrix(data, names)


def random_context(rng, n_inputs=3, k=4, group_widths=(3, 2), n_pos=4, **config_kwargs):
    """Context with affinities drawn uniformly from [-kappa, kappa]."""
    config = ScoreConfig(**config_kwargs)
    kappa = config.kappa

    def aff(cols):
        return kappa * (2.0 * rng.random((n_inputs, cols)) - 1.0)

    m = sum(group_widths)
    slices = []
    cursor = 0
    for w in group_widths:
        slices.append((cursor, cursor + w))
        cursor += w
    return ScoringContext(
        id_affinities=aff(k),
        wild_affinities=aff(m),
        positive_affinities=aff(n_pos) if n_pos else np.zeros((n_inputs, 0)),
        group_slices=tuple(slices),
        config=config,
    )
