"""Seeded generators for desk-scale benchmarks.

Clusters are Gaussian-perturb-then-normalize around unit anchors (the
same transformation family the positive synthesis uses), so spread
controls concentration on the sphere. The wild corpus is an explicit
two-component mixture: positives cluster near the ID anchors -- close but
not equal, so selection genuinely faces false-negative contamination --
and negatives cluster near the OOD-region anchors. The generator records
which component produced each row; scoring never sees those tags.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .core import STREAM_SYNTHETIC, EmbeddingMatrix, l2_normalize, module_rng
from .errors import InfeasibleSeparation


@dataclass(frozen=True)
class ClusterSpreads:
    # wild positives sit tight around the ID anchors: the hard false
    # negatives are near-duplicates of ID labels
    id_images: float = 0.15
    ood_images: float = 0.15
    wild_positive: float = 0.02
    wild_negative: float = 0.08

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SyntheticBenchmark:
    id_texts: EmbeddingMatrix
    id_images: EmbeddingMatrix
    ood_images: EmbeddingMatrix
    wild_corpus: EmbeddingMatrix
    wild_truth: tuple[str, ...]  # "positive" | "negative" per wild row
    true_tau: float


def sample_cluster(center, spread: float, count: int, rng: np.random.Generator) -> EmbeddingMatrix:
    """count rows of l2(center + spread * eps), fresh eps per row.

    spread=0 repeats the center exactly.
    """
    if spread < 0:
        raise ValueError(f"spread must be >= 0, got {spread}")
    center = np.asarray(center, dtype=np.float64)
    if spread == 0.0:
        return EmbeddingMatrix(np.tile(center, (count, 1)))
    eps = rng.standard_normal((count, center.size))
    return EmbeddingMatrix(l2_normalize(center + spread * eps))


def _make_anchors(dim, n_id, n_ood, separation, rng):
    """ID and OOD anchors with |cos(ood, id)| <= separation.

    When everything fits orthogonally the anchors come from a QR factor
    of a Gaussian matrix (exactly orthogonal, hence near-orthogonal ID
    anchors and zero ID/OOD cosines). Otherwise OOD anchors are rejection
    sampled against the separation cap.
    """
    total = n_id + n_ood
    if total <= dim:
        q, _ = np.linalg.qr(rng.standard_normal((dim, total)))
        anchors = q.T
        return anchors[:n_id], anchors[n_id:]
    id_anchors = l2_normalize(rng.standard_normal((n_id, dim)))
    ood = []
    for _ in range(n_ood):
        for _attempt in range(200):
            v = l2_normalize(rng.standard_normal(dim))
            if np.abs(id_anchors @ v).max() <= separation:
                ood.append(v)
                break
        else:
            raise InfeasibleSeparation(
                f"cannot place {n_ood} OOD anchors at cosine <= {separation} "
                f"from {n_id} ID anchors in dim {dim}"
            )
    return id_anchors, np.array(ood)


def build_benchmark(
    dim: int,
    K: int,
    T: int,
    tau: float,
    spreads: ClusterSpreads | None = None,
    separation: float = 0.1,
    seed: int = 0,
    n_id_images: int = 500,
    n_ood_images: int = 500,
    n_ood_anchors: int | None = None,
) -> SyntheticBenchmark:
    """A full synthetic benchmark with a contaminated wild corpus.

    The wild corpus holds round(tau * T) positive rows, so the realized
    mixing fraction matches tau to within 1/T. Byte-reproducible from the
    arguments plus seed.
    """
    if not (0 < tau < 1):
        raise ValueError(f"tau must be in (0, 1), got {tau}")
    if K < 2:
        raise ValueError(f"need K >= 2, got {K}")
    if T < 100:
        raise ValueError(f"need T >= 100, got {T}")
    spreads = spreads or ClusterSpreads()
    n_ood_anchors = n_ood_anchors or K
    rng = module_rng(seed, STREAM_SYNTHETIC)

    id_anchors, ood_anchors = _make_anchors(dim, K, n_ood_anchors, separation, rng)
    id_texts = EmbeddingMatrix(id_anchors, tuple(f"class_{i}" for i in range(K)))

    def around(anchors, spread, count):
        per = [count // len(anchors)] * len(anchors)
        for i in range(count % len(anchors)):
            per[i] += 1
        parts = [
            sample_cluster(anchors[i], spread, per[i], rng).data
            for i in range(len(anchors))
            if per[i]
        ]
        return np.concatenate(parts)

    id_images = EmbeddingMatrix(around(id_anchors, spreads.id_images, n_id_images))
    ood_images = EmbeddingMatrix(around(ood_anchors, spreads.ood_images, n_ood_images))

    n_pos = round(tau * T)
    wild_rows = np.concatenate([
        around(id_anchors, spreads.wild_positive, n_pos),
        around(ood_anchors, spreads.wild_negative, T - n_pos),
    ])
    tags = np.array(["positive"] * n_pos + ["negative"] * (T - n_pos))
    perm = rng.permutation(T)
    wild = EmbeddingMatrix(wild_rows[perm], tuple(f"wild_{i}" for i in range(T)))

    return SyntheticBenchmark(
        id_texts=id_texts,
        id_images=id_images,
        ood_images=ood_images,
        wild_corpus=wild,
        wild_truth=tuple(tags[perm]),
        true_tau=n_pos / T,
    )
