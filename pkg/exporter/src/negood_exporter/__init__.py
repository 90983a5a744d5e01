"""CLIP embedding extraction into the EMB1 wire format."""

from .emb1 import write_emb1
from .encoder import ClipEncoder, ModelLoadFailure
from .export import DEFAULT_PROMPT, ExportManifest, UnreadableInput, WriteFailure, export

__all__ = [
    "ClipEncoder",
    "DEFAULT_PROMPT",
    "ExportManifest",
    "ModelLoadFailure",
    "UnreadableInput",
    "WriteFailure",
    "export",
    "write_emb1",
]
