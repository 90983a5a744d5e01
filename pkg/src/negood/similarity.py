"""Affinity kernels between unit image and text embeddings.

The scalar affinity is the temperature-scaled inner product
``kappa * image . text``; because both vectors are unit-norm every value
lies in [-kappa, kappa]. Dot products accumulate in float64 even for
float32 inputs: downstream scores subtract nearly equal exponential sums
and are sensitive to rounding.
"""

from __future__ import annotations

import numpy as np

from .core import EmbeddingMatrix
from .errors import DimensionMismatch


def _as_rows(m) -> np.ndarray:
    data = m.data if isinstance(m, EmbeddingMatrix) else np.asarray(m)
    return data.astype(np.float64, copy=False)


def affinity(image, text, kappa: float) -> float:
    """Affinity of one image and one text embedding."""
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    a = np.asarray(image, dtype=np.float64)
    b = np.asarray(text, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatch(f"incompatible shapes {a.shape} and {b.shape}")
    return float(kappa * np.dot(a, b))


def affinity_matrix(images, texts, kappa: float) -> np.ndarray:
    """Dense affinity matrix; entry (i, j) is affinity(image i, text j)."""
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    x = _as_rows(images)
    t = _as_rows(texts)
    if x.shape[1] != t.shape[1]:
        raise DimensionMismatch(f"dim {x.shape[1]} vs {t.shape[1]}")
    return kappa * (x @ t.T)
