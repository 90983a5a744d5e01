"""EMB1 writer.

The format contract shared with the scoring pipeline: 4-byte magic
``EMB1``, u32 LE version (1), u32 LE rows, u32 LE dim, then rows*dim
float32 LE row-major. Labels go into a ``<name>.labels`` sidecar, one
UTF-8 line per row.
"""

import struct
from pathlib import Path

import numpy as np

MAGIC = b"EMB1"
VERSION = 1


def labels_sidecar(path) -> Path:
    return Path(path).with_suffix(".labels")


def write_emb1(rows: np.ndarray, path, labels=None) -> Path:
    path = Path(path)
    arr = np.ascontiguousarray(rows, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
    if labels is not None and len(labels) != arr.shape[0]:
        raise ValueError(f"{len(labels)} labels for {arr.shape[0]} rows")
    header = struct.pack("<4sIII", MAGIC, VERSION, arr.shape[0], arr.shape[1])
    path.write_bytes(header + arr.tobytes())
    if labels is not None:
        labels_sidecar(path).write_text("\n".join(labels) + "\n", encoding="utf-8")
    return path
