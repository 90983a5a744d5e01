"""Wild-corpus filtering: representativeness scoring, top-L selection,
and partitioning of the selected labels into score groups.

Representativeness of a corpus row is the negative log of the summed
squared Euclidean distances to its alpha nearest neighbors (self
excluded), so rows in dense regions score high. On unit vectors the
Euclidean kNN ordering coincides with the cosine ordering since
``|a - b|^2 = 2 - 2 a.b``.

Ties -- both inside a neighbor set and in the global reorder -- break by
ascending original row index; the results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import STREAM_SELECTION, EmbeddingMatrix, ScoreConfig, module_rng
from .errors import AlphaTooLarge, LNotAvailable, TooFewRows

REP_SUM_FLOOR = 1e-12

GROUPING_ROUND_ROBIN = "round-robin"
GROUPING_RANDOM = "random"


@dataclass(frozen=True)
class SelectionResult:
    """Corpus reordered by decreasing representativeness plus the groups.

    order        permutation of corpus row indices, best first
    rep_scores   representativeness per corpus row (original order)
    selected     the first L entries of order
    groups       B disjoint arrays of size L // B over the selected set;
                 the L mod B leftover indices are discarded
    """

    order: np.ndarray
    rep_scores: np.ndarray
    selected: np.ndarray
    groups: tuple[np.ndarray, ...]


def _block_size(total_rows: int) -> int:
    # keep the per-block distance buffer around 32 MB
    return max(16, min(1024, (1 << 22) // max(total_rows, 1)))


def _alpha_nearest(drow: np.ndarray, alpha: int) -> np.ndarray:
    """Indices of the alpha smallest entries, nearest first; ties break by
    ascending index."""
    kth = np.partition(drow, alpha - 1)[alpha - 1]
    cand = np.flatnonzero(drow <= kth)
    cand = cand[np.lexsort((cand, drow[cand]))]
    return cand[:alpha]


def _iter_distance_blocks(data: np.ndarray):
    n = data.shape[0]
    sq = np.einsum("ij,ij->i", data, data)
    step = _block_size(n)
    for start in range(0, n, step):
        stop = min(start + step, n)
        d = sq[start:stop, None] + sq[None, :] - 2.0 * (data[start:stop] @ data.T)
        np.maximum(d, 0.0, out=d)
        d[np.arange(stop - start), np.arange(start, stop)] = np.inf  # exclude self
        yield start, d


def _check_knn_args(corpus: EmbeddingMatrix, alpha: int):
    if corpus.rows < 2:
        raise TooFewRows(f"need at least 2 rows, got {corpus.rows}")
    if alpha > corpus.rows - 1:
        raise AlphaTooLarge(f"alpha={alpha} but only {corpus.rows - 1} neighbors exist")
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")


def knn_indices(corpus: EmbeddingMatrix, alpha: int) -> np.ndarray:
    """(rows, alpha) matrix of nearest-neighbor row indices."""
    _check_knn_args(corpus, alpha)
    data = corpus.data.astype(np.float64)
    out = np.empty((corpus.rows, alpha), dtype=np.int64)
    for start, d in _iter_distance_blocks(data):
        for i in range(d.shape[0]):
            out[start + i] = _alpha_nearest(d[i], alpha)
    return out


def representativeness(corpus: EmbeddingMatrix, alpha: int) -> np.ndarray:
    """Per-row score -log sum of squared distances to the alpha nearest rows.

    Sums below 1e-12 (duplicate rows) are clamped to 1e-12 before the log.
    """
    _check_knn_args(corpus, alpha)
    data = corpus.data.astype(np.float64)
    sums = np.empty(corpus.rows, dtype=np.float64)
    for start, d in _iter_distance_blocks(data):
        for i in range(d.shape[0]):
            row = d[i]
            sums[start + i] = row[_alpha_nearest(row, alpha)].sum()
    return -np.log(np.maximum(sums, REP_SUM_FLOOR))


def select_and_partition(
    corpus: EmbeddingMatrix,
    config: ScoreConfig,
    grouping: str = GROUPING_ROUND_ROBIN,
) -> SelectionResult:
    """Reorder the corpus by representativeness, keep the top L, group into B.

    Groups are filled round-robin along the representativeness order so
    every group sees a similar representativeness profile; pass
    grouping="random" for a seeded random partition instead.
    """
    if config.L > corpus.rows:
        raise LNotAvailable(f"L={config.L} exceeds corpus rows {corpus.rows}")
    if grouping not in (GROUPING_ROUND_ROBIN, GROUPING_RANDOM):
        raise ValueError(f"unknown grouping {grouping!r}")

    rep = representativeness(corpus, config.alpha)
    order = np.argsort(-rep, kind="stable")  # ties keep ascending index
    selected = order[: config.L]

    group_size = config.L // config.B
    pool = selected[: group_size * config.B]
    if grouping == GROUPING_RANDOM:
        rng = module_rng(config.seed, STREAM_SELECTION)
        pool = rng.permutation(selected)[: group_size * config.B]
    groups = tuple(pool[b :: config.B] for b in range(config.B))
    return SelectionResult(order=order, rep_scores=rep, selected=selected, groups=groups)
