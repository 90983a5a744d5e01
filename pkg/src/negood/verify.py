"""Empirical verification of the Monte-Carlo bias bound.

The expected absolute log-score gap between the debiased estimator and
its infinite-sample limit is bounded by

    1/(1-tau) * sqrt(pi e^{3 kappa} / (2 m))
    + tau/(1-tau) * sqrt(pi e^{3 kappa} / (2 n))

for m wild draws and n positive draws. This module estimates the gap by
simulation on a discrete synthetic space -- the only setting where the
limit is computable exactly -- and checks dominance plus the m^{-1/2}
decay rate. Lambda is held at a fixed constant (the bound is stated for
fixed lambda), not at the pool size used by the practical score.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import pi
from pathlib import Path

import numpy as np

from .core import STREAM_VERIFY, module_rng
from .errors import InsufficientTrials
from .oracle import (
    DiscreteLabelSpace,
    exact_unbiased_score,
    inclusion_exclusion_score,
    random_space,
)


def delta_bound(kappa: float, tau: float, m: int, n: int) -> float:
    """Closed-form upper bound on the expected absolute log-score gap."""
    scale = np.sqrt(pi * np.exp(3.0 * kappa) / 2.0)
    return scale / (1.0 - tau) * m ** -0.5 + scale * tau / (1.0 - tau) * n ** -0.5


def sample_delta(
    space: DiscreteLabelSpace,
    x_aff,
    id_aff,
    m: int,
    n: int,
    lam: float,
    rng: np.random.Generator,
    mass_floor: float = 1e-12,
) -> float:
    """One draw of |log S_unbiased - log S_debiased|.

    Draws m labels from Q and n from P+ (as multinomial counts: the
    estimator depends on the draws only through their exponential sums,
    and counts of i.i.d. categorical draws are multinomial), forms the
    debiased estimate with fixed lambda, and compares against the exact
    asymptotic score. The negative-mass floor keeps the log finite in
    the rare event the correction goes non-positive.
    """
    if m < 1 or n < 1:
        raise ValueError(f"need m, n >= 1, got m={m}, n={n}")
    x_aff = np.asarray(x_aff, dtype=np.float64)
    id_aff = np.asarray(id_aff, dtype=np.float64)
    tau = space.tau

    counts_q = rng.multinomial(m, space.q_weights)
    counts_p = rng.multinomial(n, space.pplus_weights)

    c = max(x_aff.max(), id_aff.max())
    e = np.exp(x_aff - c)
    a_scaled = np.exp(id_aff - c).sum()

    wneg = (counts_q @ e) / m - tau * (counts_p @ e) / n
    floor_scaled = mass_floor * np.exp(-c)
    wneg = max(wneg, floor_scaled)
    s_debiased = ((1.0 - tau) / lam) * a_scaled / (((1.0 - tau) / lam) * a_scaled + wneg)

    neg_mean_scaled = space.neg_weights @ e
    s_unbiased = a_scaled / (a_scaled + lam * neg_mean_scaled)
    return float(abs(np.log(s_unbiased) - np.log(s_debiased)))


@dataclass(frozen=True)
class BiasExperimentReport:
    """Estimated gap vs bound on a grid of (m, n) sample sizes."""

    grid: tuple[tuple[int, int], ...]
    mean_delta: np.ndarray
    bound: np.ndarray
    slope_m: float
    trials: int
    kappa: float
    tau: float

    def to_dict(self) -> dict:
        return {
            "grid": [list(p) for p in self.grid],
            "mean_delta": [float(v) for v in self.mean_delta],
            "bound": [float(v) for v in self.bound],
            "slope_m": float(self.slope_m),
            "trials": self.trials,
            "kappa": self.kappa,
            "tau": self.tau,
        }

    def write_json(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")
        return path


def run_bias_experiment(
    space: DiscreteLabelSpace,
    x_aff,
    id_aff,
    grid,
    trials: int,
    lam: float = 1.0,
    seed: int = 0,
    kappa: float | None = None,
    mass_floor: float = 1e-12,
) -> BiasExperimentReport:
    """Mean gap over independent trials per grid point, plus the fitted
    log-log slope of the gap against m at the largest n in the grid.

    Each (grid point, trial) pair gets its own derived rng stream, so
    running trials in parallel cannot change the results. kappa defaults
    to the largest absolute affinity (the temperature bounds |h|).
    """
    grid = tuple((int(m), int(n)) for m, n in grid)
    if not grid:
        raise ValueError("grid must be non-empty")
    if trials < 100:
        raise InsufficientTrials(f"need at least 100 trials, got {trials}")
    x_aff = np.asarray(x_aff, dtype=np.float64)
    id_aff = np.asarray(id_aff, dtype=np.float64)
    if kappa is None:
        kappa = float(max(np.abs(x_aff).max(), np.abs(id_aff).max()))

    mean_delta = np.empty(len(grid))
    for gi, (m, n) in enumerate(grid):
        acc = 0.0
        for t in range(trials):
            rng = module_rng(seed, STREAM_VERIFY, gi, t)
            acc += sample_delta(space, x_aff, id_aff, m, n, lam, rng, mass_floor)
        mean_delta[gi] = acc / trials

    bound = np.array([delta_bound(kappa, space.tau, m, n) for m, n in grid])

    n_max = max(n for _, n in grid)
    at_nmax = [gi for gi, (_, n) in enumerate(grid) if n == n_max]
    if len(at_nmax) >= 2:
        ms = np.log([grid[gi][0] for gi in at_nmax])
        ds = np.log(mean_delta[at_nmax])
        slope_m = float(np.polyfit(ms, ds, 1)[0])
    else:
        slope_m = float("nan")

    return BiasExperimentReport(
        grid=grid, mean_delta=mean_delta, bound=bound,
        slope_m=slope_m, trials=trials, kappa=kappa, tau=space.tau,
    )


def run_expansion_suite(
    n_spaces: int = 60,
    seed: int = 0,
    taus=(0.2, 0.5),
    r_values=(1, 2, 3),
    kappas=(0.01, 1.0),
    max_labels: int = 6,
) -> float:
    """Max |exact enumeration - inclusion-exclusion expansion| over
    randomized valid spaces. Should sit at float-rounding level.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n_spaces):
        tau = taus[i % len(taus)]
        kappa = kappas[i % len(kappas)]
        n_labels = int(rng.integers(2, max_labels + 1))
        space = random_space(rng, n_labels=n_labels, dim=8, tau=tau)
        x = rng.standard_normal(8)
        x /= np.linalg.norm(x)
        x_aff = kappa * (space.embeddings.data.astype(np.float64) @ x)
        k_id = int(rng.integers(1, 5))
        id_aff = kappa * (2.0 * rng.random(k_id) - 1.0)
        for r in r_values:
            a = exact_unbiased_score(space, x_aff, id_aff, r, lam=1.0)
            b = inclusion_exclusion_score(space, x_aff, id_aff, r, lam=1.0)
            worst = max(worst, abs(a - b))
    return worst
