"""Detection-quality metrics: AUROC and FPR at a fixed TPR.

AUROC is the probability that an ID input outscores an OOD input, with
ties counted half; it is computed from midranks, which is exactly the
pairwise count. The FPR95 threshold is the largest score beta such that
at least 95% of ID scores are >= beta -- no interpolation between scores,
and ties at beta count as detections for both ID and OOD (the detector's
boundary is inclusive).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyScores


def _as_scores(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise EmptyScores(f"{name} is empty")
    return arr


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    sorted_v = values[order]
    ranks = np.empty(values.size, dtype=np.float64)
    edges = np.flatnonzero(np.r_[True, sorted_v[1:] != sorted_v[:-1], True])
    for start, stop in zip(edges[:-1], edges[1:]):
        ranks[order[start:stop]] = 0.5 * (start + stop - 1) + 1.0
    return ranks


def auroc(id_scores, ood_scores) -> float:
    """Probability an ID score exceeds an OOD score, ties counting 0.5."""
    ids = _as_scores(id_scores, "id_scores")
    oods = _as_scores(ood_scores, "ood_scores")
    ranks = _midranks(np.concatenate([ids, oods]))
    u = ranks[: ids.size].sum() - ids.size * (ids.size + 1) / 2.0
    return float(u / (ids.size * oods.size))


def fpr_at_tpr(id_scores, ood_scores, tpr_target: float = 0.95) -> tuple[float, float]:
    """(fpr, beta): beta is the largest threshold keeping ID TPR >= target."""
    ids = _as_scores(id_scores, "id_scores")
    oods = _as_scores(ood_scores, "ood_scores")
    if not (0 < tpr_target <= 1):
        raise ValueError(f"tpr_target must be in (0, 1], got {tpr_target}")
    n = ids.size
    k = int(np.ceil(tpr_target * n))
    k = min(max(k, 1), n)
    # guard float rounding in ceil(target * n) against the ratio contract
    while k > 1 and (k - 1) / n >= tpr_target:
        k -= 1
    while k < n and k / n < tpr_target:
        k += 1
    beta = float(np.sort(ids)[::-1][k - 1])
    fpr = float(np.count_nonzero(oods >= beta) / oods.size)
    return fpr, beta


@dataclass(frozen=True)
class EvalReport:
    auroc: float
    fpr95: float
    threshold_beta: float
    n_id: int
    n_ood: int

    def to_dict(self) -> dict:
        return {
            "auroc": self.auroc,
            "fpr95": self.fpr95,
            "threshold_beta": self.threshold_beta,
            "n_id": self.n_id,
            "n_ood": self.n_ood,
        }

    def write_json(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")
        return path


def evaluate(id_scores, ood_scores, tpr_target: float = 0.95) -> EvalReport:
    ids = _as_scores(id_scores, "id_scores")
    oods = _as_scores(ood_scores, "ood_scores")
    fpr, beta = fpr_at_tpr(ids, oods, tpr_target)
    return EvalReport(
        auroc=auroc(ids, oods),
        fpr95=fpr,
        threshold_beta=beta,
        n_id=ids.size,
        n_ood=oods.size,
    )
