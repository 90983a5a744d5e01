"""Exact brute-force evaluators over small discrete label spaces.

These enumerate every r-tuple of labels, so they are exact up to float
rounding and serve as ground truth for the Monte-Carlo scoring paths:
the expectation over true negatives, its inclusion-exclusion expansion
in terms of the wild and positive distributions, and the exact negative
mean feeding the asymptotic score. Enumeration is capped at 8 labels and
r = 6 (8^6 tuples); past the cap the operations refuse rather than fall
back to sampling, because their entire value is exactness.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb

import numpy as np

from .core import EmbeddingMatrix, l2_normalize
from .errors import EmptyAffinities, EnumerationTooLarge

MAX_LABELS = 8
MAX_R = 6
WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteLabelSpace:
    """A finite label space with wild (Q) and positive (P+) weights.

    The derived negative weights (q - tau * p+) / (1 - tau) must be a
    genuine distribution (entries >= -1e-12); otherwise the mixture
    Q = tau P+ + (1 - tau) P- is not realizable and construction fails.
    """

    embeddings: EmbeddingMatrix
    q_weights: np.ndarray
    pplus_weights: np.ndarray
    tau: float

    def __post_init__(self):
        q = np.asarray(self.q_weights, dtype=np.float64)
        p = np.asarray(self.pplus_weights, dtype=np.float64)
        object.__setattr__(self, "q_weights", q)
        object.__setattr__(self, "pplus_weights", p)
        n = self.embeddings.rows
        if n > MAX_LABELS:
            raise EnumerationTooLarge(f"{n} labels exceeds the cap of {MAX_LABELS}")
        if q.shape != (n,) or p.shape != (n,):
            raise ValueError("weights must have one entry per label")
        if not (0 <= self.tau < 1):
            raise ValueError(f"tau must be in [0, 1), got {self.tau}")
        for name, w in (("q", q), ("p+", p)):
            if np.any(w < 0):
                raise ValueError(f"{name} weights must be non-negative")
            if abs(w.sum() - 1.0) > WEIGHT_TOL:
                raise ValueError(f"{name} weights sum to {w.sum()!r}, expected 1")
        if np.any(self.neg_weights < -WEIGHT_TOL):
            raise ValueError(
                "mixture is not realizable: derived negative weights go negative"
            )

    @property
    def n_labels(self) -> int:
        return self.embeddings.rows

    @property
    def neg_weights(self) -> np.ndarray:
        return (self.q_weights - self.tau * self.pplus_weights) / (1.0 - self.tau)


def _tuple_table(n_labels: int, r: int) -> np.ndarray:
    if n_labels > MAX_LABELS or r > MAX_R:
        raise EnumerationTooLarge(
            f"enumeration of {n_labels}^{r} tuples exceeds the {MAX_LABELS}^{MAX_R} cap"
        )
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    return np.array(list(product(range(n_labels), repeat=r)), dtype=np.int64)


def _phi_per_tuple(x_aff: np.ndarray, id_aff: np.ndarray, tuples: np.ndarray, lam: float) -> np.ndarray:
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if x_aff.size == 0 or id_aff.size == 0:
        raise EmptyAffinities("need per-label and ID affinities")
    c = max(x_aff.max(), id_aff.max())
    a = np.exp(id_aff - c).sum()
    e = np.exp(x_aff - c)
    neg = e[tuples].sum(axis=1)
    return a / (a + (lam / tuples.shape[1]) * neg)


def exact_unbiased_score(space: DiscreteLabelSpace, x_aff, id_aff, r: int, lam: float) -> float:
    """Expectation of phi over r i.i.d. true-negative draws, by enumeration."""
    x_aff = np.asarray(x_aff, dtype=np.float64)
    id_aff = np.asarray(id_aff, dtype=np.float64)
    tuples = _tuple_table(space.n_labels, r)
    phis = _phi_per_tuple(x_aff, id_aff, tuples, lam)
    weights = np.prod(space.neg_weights[tuples], axis=1)
    return float(weights @ phis)


def inclusion_exclusion_score(space: DiscreteLabelSpace, x_aff, id_aff, r: int, lam: float) -> float:
    """The same expectation via the inclusion-exclusion expansion:
    sum_k C(r,k) (-tau)^k / (1-tau)^r E[phi] with the first k negatives
    drawn from P+ and the remaining r-k from Q.
    """
    x_aff = np.asarray(x_aff, dtype=np.float64)
    id_aff = np.asarray(id_aff, dtype=np.float64)
    tuples = _tuple_table(space.n_labels, r)
    phis = _phi_per_tuple(x_aff, id_aff, tuples, lam)
    tau = space.tau
    total = 0.0
    for k in range(r + 1):
        w = (
            np.prod(space.pplus_weights[tuples[:, :k]], axis=1)
            * np.prod(space.q_weights[tuples[:, k:]], axis=1)
        )
        coeff = comb(r, k) * (-tau) ** k / (1.0 - tau) ** r
        total += coeff * float(w @ phis)
    return total


def exact_neg_mean(space: DiscreteLabelSpace, x_aff) -> float:
    """Exact E[e^affinity] under the derived negative distribution."""
    x_aff = np.asarray(x_aff, dtype=np.float64)
    return float(space.neg_weights @ np.exp(x_aff))


def random_space(
    rng: np.random.Generator,
    n_labels: int = 4,
    dim: int = 8,
    tau: float = 0.5,
) -> DiscreteLabelSpace:
    """A random valid space: the wild weights are built as an exact
    tau-mixture of random positive and negative distributions, so the
    derived negative weights are non-negative by construction.
    """
    emb = EmbeddingMatrix(l2_normalize(rng.standard_normal((n_labels, dim))))
    pplus = rng.dirichlet(np.ones(n_labels))
    pneg = rng.dirichlet(np.ones(n_labels))
    q = tau * pplus + (1.0 - tau) * pneg
    return DiscreteLabelSpace(embeddings=emb, q_weights=q, pplus_weights=pplus, tau=tau)
