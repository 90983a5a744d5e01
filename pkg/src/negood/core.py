"""Shared data model: embedding matrices, scoring configuration, reports.

The EMB1 binary format is the interchange surface between every CLI
command (and the embedding exporter):

    bytes 0-3   magic ``EMB1``
    bytes 4-7   format version, u32 little-endian, currently 1
    bytes 8-11  row count, u32 little-endian
    bytes 12-15 embedding dimension, u32 little-endian
    then        rows * dim IEEE-754 float32 little-endian, row-major

An optional sidecar next to ``<name>.emb`` called ``<name>.labels`` holds
one UTF-8 label per row, ``\\n``-separated.

Matrices hold float32 (the wire type); all arithmetic elsewhere in the
package upcasts to float64 before accumulating.
"""

from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    EmptyMatrix,
    LabelCountMismatch,
    NonUnitRow,
)

EMB1_MAGIC = b"EMB1"
EMB1_VERSION = 1
UNIT_NORM_TOL = 1e-4

# Fixed rng stream offsets so modules cannot perturb each other's draws.
STREAM_SELECTION = 1
STREAM_POSITIVES = 2
STREAM_SYNTHETIC = 3
STREAM_VERIFY = 4


def module_rng(seed: int, stream: int, *extra: int) -> np.random.Generator:
    """Generator for (seed, stream) -- extra keys derive per-task substreams."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, *extra)))


def l2_normalize(rows: np.ndarray) -> np.ndarray:
    """Row-wise l2 normalization in float64. Rejects zero rows."""
    arr = np.asarray(rows, dtype=np.float64)
    if arr.ndim == 1:
        norm = np.linalg.norm(arr)
        if norm == 0.0:
            raise ValueError("cannot normalize a zero vector")
        return arr / norm
    norms = np.linalg.norm(arr, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("cannot normalize zero rows")
    return arr / norms[:, None]


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Rows of d-dimensional vectors on the unit sphere, with optional labels.

    Construction only fixes shape and dtype; invariant checking lives in
    :func:`validate` so that malformed external files can be loaded and
    then rejected with a precise error.
    """

    data: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 2:
            raise ValueError(f"embedding data must be 2-D, got shape {arr.shape}")
        object.__setattr__(self, "data", arr)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def take(self, indices) -> "EmbeddingMatrix":
        """Row subset (copy), carrying labels along."""
        idx = np.asarray(indices, dtype=np.int64)
        labels = tuple(self.labels[i] for i in idx) if self.labels is not None else None
        return EmbeddingMatrix(self.data[idx], labels)


def validate(matrix: EmbeddingMatrix) -> EmbeddingMatrix:
    """Check all EmbeddingMatrix invariants, raising on the first violation.

    Raises NonUnitRow (with the first offending row index and its norm),
    LabelCountMismatch, or EmptyMatrix. Returns the matrix unchanged so
    calls can be chained.
    """
    if matrix.rows < 1 or matrix.dim < 2:
        raise EmptyMatrix(f"need rows >= 1 and dim >= 2, got {matrix.rows}x{matrix.dim}")
    norms = np.linalg.norm(matrix.data.astype(np.float64), axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)
    if bad.size:
        i = int(bad[0])
        raise NonUnitRow(i, float(norms[i]))
    if matrix.labels is not None and len(matrix.labels) != matrix.rows:
        raise LabelCountMismatch(
            f"{len(matrix.labels)} labels for {matrix.rows} rows"
        )
    return matrix


def labels_sidecar(path) -> Path:
    """Sidecar path for an EMB1 file: the extension is replaced by .labels."""
    return Path(path).with_suffix(".labels")


def write_emb1(matrix: EmbeddingMatrix, path) -> Path:
    """Write an EMB1 file (plus the labels sidecar when labels exist)."""
    path = Path(path)
    header = struct.pack("<4sIII", EMB1_MAGIC, EMB1_VERSION, matrix.rows, matrix.dim)
    payload = matrix.data.astype("<f4", copy=False).tobytes()
    path.write_bytes(header + payload)
    if matrix.labels is not None:
        labels_sidecar(path).write_text("\n".join(matrix.labels) + "\n", encoding="utf-8")
    return path


def load_emb1(path, check: bool = True) -> EmbeddingMatrix:
    """Read an EMB1 file; picks up a labels sidecar when one exists.

    With check=True (default) the loaded matrix is passed through
    :func:`validate`, so broken exporters fail fast instead of feeding
    bad rows into the pipeline.
    """
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < 16:
        raise ValueError(f"{path}: truncated EMB1 header")
    magic, version, rows, dim = struct.unpack_from("<4sIII", raw, 0)
    if magic != EMB1_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != EMB1_VERSION:
        raise ValueError(f"{path}: unsupported EMB1 version {version}")
    expected = 16 + 4 * rows * dim
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(raw)}")
    data = np.frombuffer(raw, dtype="<f4", count=rows * dim, offset=16).reshape(rows, dim)
    labels = None
    sidecar = labels_sidecar(path)
    if sidecar.exists():
        labels = tuple(sidecar.read_text(encoding="utf-8").splitlines())
    matrix = EmbeddingMatrix(np.array(data), labels)
    if check:
        validate(matrix)
    return matrix


LAMBDA_GROUP_SIZE = "group-size"
LAMBDA_FIXED = "fixed"


@dataclass(frozen=True)
class ScoreConfig:
    """Hyperparameters for selection, synthesis and scoring.

    Defaults follow the reference operating point: kappa=0.01, B=100,
    tau=0.5, sigma=0.001, L=12000, alpha=100.
    """

    kappa: float = 0.01
    tau: float = 0.5
    sigma: float = 0.001
    L: int = 12000
    B: int = 100
    alpha: int = 100
    lambda_mode: str = LAMBDA_GROUP_SIZE
    lambda_fixed: float = 1.0  # used only when lambda_mode == "fixed"
    mass_floor: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ConfigError(f"kappa must be positive, got {self.kappa}")
        if not (0 <= self.tau < 1):
            raise ConfigError(f"tau must be in [0, 1), got {self.tau}")
        if self.sigma < 0:
            raise ConfigError(f"sigma must be >= 0, got {self.sigma}")
        if not (1 <= self.B <= self.L):
            raise ConfigError(f"need 1 <= B <= L, got B={self.B}, L={self.L}")
        if self.alpha < 1:
            raise ConfigError(f"alpha must be >= 1, got {self.alpha}")
        if not self.mass_floor > 0:
            raise ConfigError(f"mass_floor must be positive, got {self.mass_floor}")
        if self.lambda_mode not in (LAMBDA_GROUP_SIZE, LAMBDA_FIXED):
            raise ConfigError(f"unknown lambda_mode {self.lambda_mode!r}")
        if self.lambda_mode == LAMBDA_FIXED and not self.lambda_fixed > 0:
            raise ConfigError(f"lambda_fixed must be positive, got {self.lambda_fixed}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ScoreConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ScoreConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


METHODS = ("mcm", "neglabel", "debiased", "grouped-debiased", "asymptotic-unbiased")


@dataclass(frozen=True)
class ScoreReport:
    """Per-input scores for one method plus clamp diagnostics."""

    method: str
    scores: np.ndarray = field(repr=False)
    clamp_count: int
    config: ScoreConfig

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        arr = np.asarray(self.scores, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise ValueError("scores must all be finite")
        object.__setattr__(self, "scores", arr)
