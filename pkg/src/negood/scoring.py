"""OOD scoring functions.

All scores share the shape A / (A + W): an exponential ID-affinity mass A
against some negative mass W.

    mcm                 max softmax over the ID affinities (baseline)
    neglabel            per-group wild mass, averaged over groups (baseline)
    debiased            wild mass minus the tau-weighted synthesized-positive
                        mass, one pool
    grouped-debiased    the debiased score averaged over the B groups
    asymptotic-unbiased the infinite-sample limit, fed by an exact negative
                        mean from the oracle module

Every exponential sum subtracts the per-input max affinity before
exponentiation; the shift cancels in each ratio, so results are exact and
the same code holds for temperatures up to 100. The debiased denominator
correction can go non-positive when perturbed-ID affinities exceed the
wild affinities; it is clamped at config.mass_floor and the clamp is
reported, which keeps scores inside (0, 1] and order-preserving among
clamped inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    LAMBDA_FIXED,
    LAMBDA_GROUP_SIZE,
    EmbeddingMatrix,
    ScoreConfig,
    ScoreReport,
)
from .errors import EmptyAffinities, EmptyGroups, NonPositiveMean
from .positives import PositiveBank
from .similarity import affinity_matrix

AFFINITY_TOL = 1e-6


@dataclass(frozen=True)
class ScoringContext:
    """Affinities of the test inputs against every embedding bank.

    Wild affinity columns are ordered group by group; group_slices holds
    the (start, stop) column range of each group and must partition the
    columns. positive_affinities may be empty (NegLabel and MCM never
    read them); the debiased scores require them whenever tau > 0.
    """

    id_affinities: np.ndarray
    wild_affinities: np.ndarray
    positive_affinities: np.ndarray
    group_slices: tuple[tuple[int, int], ...]
    config: ScoreConfig

    def __post_init__(self):
        id_aff = np.atleast_2d(np.asarray(self.id_affinities, dtype=np.float64))
        wild = np.atleast_2d(np.asarray(self.wild_affinities, dtype=np.float64))
        pos = np.asarray(self.positive_affinities, dtype=np.float64)
        if pos.size == 0:
            pos = np.zeros((id_aff.shape[0], 0))
        pos = np.atleast_2d(pos)
        object.__setattr__(self, "id_affinities", id_aff)
        object.__setattr__(self, "wild_affinities", wild)
        object.__setattr__(self, "positive_affinities", pos)
        object.__setattr__(self, "group_slices", tuple((int(a), int(b)) for a, b in self.group_slices))

        n = id_aff.shape[0]
        if wild.shape[0] != n or pos.shape[0] != n:
            raise ValueError("affinity blocks disagree on the number of inputs")
        if id_aff.shape[1] < 1 or wild.shape[1] < 1:
            raise EmptyAffinities("need at least one ID and one wild affinity column")
        limit = self.config.kappa + AFFINITY_TOL
        for name, block in (("id", id_aff), ("wild", wild), ("positive", pos)):
            if block.size and np.abs(block).max() > limit:
                raise ValueError(f"{name} affinity exceeds kappa={self.config.kappa}")
        if not self.group_slices:
            raise EmptyGroups("context has no groups")
        cursor = 0
        for start, stop in self.group_slices:
            if start != cursor or stop <= start:
                raise ValueError("group slices must partition the wild columns")
            cursor = stop
        if cursor != wild.shape[1]:
            raise ValueError("group slices must cover every wild column")

    @property
    def n_inputs(self) -> int:
        return self.id_affinities.shape[0]


def build_context(images, id_texts, wild, positives, groups, config: ScoreConfig) -> ScoringContext:
    """Compute all affinities for a scoring run.

    groups: sequence of wild-row index arrays (e.g. SelectionResult.groups);
    the wild affinity columns are laid out in that order. positives may be
    a PositiveBank, an EmbeddingMatrix, or None (tau=0 runs only).
    """
    id_aff = affinity_matrix(images, id_texts, config.kappa)
    group_arrays = [np.asarray(g, dtype=np.int64) for g in groups]
    if not group_arrays:
        raise EmptyGroups("no groups given")
    order = np.concatenate(group_arrays)
    wild_aff = affinity_matrix(images, wild, config.kappa)[:, order]
    slices = []
    cursor = 0
    for g in group_arrays:
        slices.append((cursor, cursor + len(g)))
        cursor += len(g)
    if isinstance(positives, PositiveBank):
        positives = positives.vectors
    if positives is None:
        pos_aff = np.zeros((id_aff.shape[0], 0))
    else:
        pos_aff = affinity_matrix(images, positives, config.kappa)
    return ScoringContext(id_aff, wild_aff, pos_aff, tuple(slices), config)


def phi(id_aff, neg_aff, lam: float) -> float:
    """ID-confidence ratio of one input against r negative affinities:
    sum(e^id) / (sum(e^id) + (lam / r) * sum(e^neg)).
    """
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    id_aff = np.asarray(id_aff, dtype=np.float64)
    neg_aff = np.asarray(neg_aff, dtype=np.float64)
    if id_aff.size == 0 or neg_aff.size == 0:
        raise EmptyAffinities("phi needs non-empty ID and negative affinities")
    c = max(id_aff.max(), neg_aff.max())
    a = np.exp(id_aff - c).sum()
    w = (lam / neg_aff.size) * np.exp(neg_aff - c).sum()
    return float(a / (a + w))


def score_mcm(id_aff):
    """Max softmax probability over the ID affinities.

    Accepts one affinity row or an (inputs, K) matrix; returns a float or
    an array accordingly.
    """
    arr = np.asarray(id_aff, dtype=np.float64)
    squeeze = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[1] == 0:
        raise EmptyAffinities("mcm needs at least one ID affinity")
    z = np.exp(arr - arr.max(axis=1, keepdims=True))
    out = z.max(axis=1) / z.sum(axis=1)
    return float(out[0]) if squeeze else out


def score_neglabel(ctx: ScoringContext) -> np.ndarray:
    """Group-averaged confidence against the raw wild affinities."""
    id_aff, wild = ctx.id_affinities, ctx.wild_affinities
    c = np.maximum(id_aff.max(axis=1), wild.max(axis=1))[:, None]
    a = np.exp(id_aff - c).sum(axis=1)
    acc = np.zeros(ctx.n_inputs)
    for start, stop in ctx.group_slices:
        w = np.exp(wild[:, start:stop] - c).sum(axis=1)
        acc += a / (a + w)
    return acc / len(ctx.group_slices)


def _debiased_pool(id_aff, wild, pos, tau, lam, floor):
    """Debiased score on one wild pool; returns (scores, clamped mask)."""
    c = id_aff.max(axis=1)
    c = np.maximum(c, wild.max(axis=1))
    if pos.shape[1]:
        c = np.maximum(c, pos.max(axis=1))
    c = c[:, None]
    a = ((1.0 - tau) / lam) * np.exp(id_aff - c).sum(axis=1)
    wild_mean = np.exp(wild - c).sum(axis=1) / wild.shape[1]
    if pos.shape[1]:
        pos_term = tau * np.exp(pos - c).sum(axis=1) / pos.shape[1]
    else:
        pos_term = 0.0
    wneg = wild_mean - pos_term
    floor_scaled = floor * np.exp(-c[:, 0])
    clamped = wneg <= floor_scaled
    wneg = np.where(clamped, floor_scaled, wneg)
    return a / (a + wneg), clamped


def _resolve_lambda(config: ScoreConfig, pool_size: int) -> float:
    if config.lambda_mode == LAMBDA_GROUP_SIZE:
        return float(pool_size)
    assert config.lambda_mode == LAMBDA_FIXED
    return config.lambda_fixed


def score_debiased(ctx: ScoringContext, single_pool: bool = True):
    """Debiased score over one wild pool; returns (scores, clamped mask).

    With single_pool=True (default) the pool is every wild column
    regardless of grouping. With single_pool=False the context must hold
    exactly one group (the per-group kernel used by the grouped score).
    Under the group-size lambda mode, lambda equals the pool size.
    """
    if not single_pool and len(ctx.group_slices) != 1:
        raise EmptyGroups("single_pool=False requires exactly one group")
    if ctx.config.tau > 0 and ctx.positive_affinities.shape[1] < 1:
        raise EmptyAffinities("tau > 0 requires positive affinities")
    wild = ctx.wild_affinities
    lam = _resolve_lambda(ctx.config, wild.shape[1])
    return _debiased_pool(
        ctx.id_affinities, wild, ctx.positive_affinities,
        ctx.config.tau, lam, ctx.config.mass_floor,
    )


def score_grouped_debiased(ctx: ScoringContext):
    """Debiased score averaged over the B groups.

    Returns (scores, clamp counts); each input's count is the number of
    groups in which its negative mass hit the floor. Under the group-size
    lambda mode, lambda is each group's size.
    """
    if not ctx.group_slices:
        raise EmptyGroups("context has no groups")
    if ctx.config.tau > 0 and ctx.positive_affinities.shape[1] < 1:
        raise EmptyAffinities("tau > 0 requires positive affinities")
    total = np.zeros(ctx.n_inputs)
    counts = np.zeros(ctx.n_inputs, dtype=np.int64)
    for start, stop in ctx.group_slices:
        lam = _resolve_lambda(ctx.config, stop - start)
        scores, clamped = _debiased_pool(
            ctx.id_affinities, ctx.wild_affinities[:, start:stop],
            ctx.positive_affinities, ctx.config.tau, lam, ctx.config.mass_floor,
        )
        total += scores
        counts += clamped
    return total / len(ctx.group_slices), counts


def score_asymptotic_unbiased(id_aff, exact_neg_mean: float, lam: float):
    """Infinite-negative-sample score sum(e^id) / (sum(e^id) + lam * E[e^h]).

    exact_neg_mean is the exact expectation of e^affinity under the true
    negative distribution, supplied by the oracle module.
    """
    if not exact_neg_mean > 0:
        raise NonPositiveMean(f"exact_neg_mean must be positive, got {exact_neg_mean}")
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    arr = np.asarray(id_aff, dtype=np.float64)
    squeeze = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[1] == 0:
        raise EmptyAffinities("need at least one ID affinity")
    c = arr.max(axis=1, keepdims=True)
    a = np.exp(arr - c).sum(axis=1)
    w = lam * np.exp(np.log(exact_neg_mean) - c[:, 0])
    out = a / (a + w)
    return float(out[0]) if squeeze else out


def detect(score: float, beta: float) -> str:
    """Threshold rule: ID iff score >= beta (the boundary counts as ID)."""
    return "ID" if score >= beta else "OOD"


def compute_scores(ctx: ScoringContext, method: str) -> ScoreReport:
    """Score every input in the context with one method.

    The report's clamp_count is the number of inputs whose corrected
    negative mass hit the floor in at least one pool.
    """
    if method == "mcm":
        scores = score_mcm(ctx.id_affinities)
        clamps = 0
    elif method == "neglabel":
        scores = score_neglabel(ctx)
        clamps = 0
    elif method == "debiased":
        scores, clamped = score_debiased(ctx)
        clamps = int(np.count_nonzero(clamped))
    elif method == "grouped-debiased":
        scores, counts = score_grouped_debiased(ctx)
        clamps = int(np.count_nonzero(counts))
    else:
        raise ValueError(f"unknown method {method!r}")
    return ScoreReport(method=method, scores=scores, clamp_count=clamps, config=ctx.config)
