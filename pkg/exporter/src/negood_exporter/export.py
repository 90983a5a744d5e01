"""Export driver: inputs in, EMB1 files out.

Text kinds (``labels`` and ``corpus``) read one entry per line, run each
through the prompt template, encode, and write the EMB1 matrix plus a
labels sidecar holding the raw entries. The ``images`` kind reads every
file in a directory in sorted name order. Row order always matches input
order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .emb1 import write_emb1
from .encoder import ClipEncoder

DEFAULT_PROMPT = "The nice <label>."
KINDS = ("labels", "corpus", "images")


class UnreadableInput(RuntimeError):
    pass


class WriteFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class ExportManifest:
    model_name: str
    inputs: tuple  # (kind, source path) pairs
    outputs: tuple  # one EMB1 path per input
    prompt_template: str = DEFAULT_PROMPT

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple((k, Path(p)) for k, p in self.inputs))
        object.__setattr__(self, "outputs", tuple(Path(p) for p in self.outputs))
        if len(self.inputs) != len(self.outputs):
            raise ValueError(
                f"{len(self.inputs)} inputs but {len(self.outputs)} outputs"
            )
        for kind, _ in self.inputs:
            if kind not in KINDS:
                raise ValueError(f"unknown input kind {kind!r}")
        if "<label>" not in self.prompt_template:
            raise ValueError("prompt template must contain <label>")


def read_lines(path: Path) -> list[str]:
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UnreadableInput(f"cannot read {path}: {exc}") from exc
    lines = [line.strip() for line in lines if line.strip()]
    if not lines:
        raise UnreadableInput(f"{path} holds no entries")
    return lines


def read_images(path: Path) -> list:
    from PIL import Image, UnidentifiedImageError

    if not path.is_dir():
        raise UnreadableInput(f"{path} is not a directory of images")
    files = sorted(p for p in path.iterdir() if p.is_file())
    if not files:
        raise UnreadableInput(f"{path} holds no image files")
    images = []
    for f in files:
        try:
            images.append(Image.open(f).convert("RGB"))
        except (OSError, UnidentifiedImageError) as exc:
            raise UnreadableInput(f"cannot decode {f}: {exc}") from exc
    return images


def export(manifest: ExportManifest, encoder: ClipEncoder | None = None) -> list[Path]:
    """Encode every manifest input and write its EMB1 output."""
    encoder = encoder or ClipEncoder(manifest.model_name)
    written = []
    for (kind, source), out in zip(manifest.inputs, manifest.outputs):
        if kind == "images":
            rows = encoder.encode_images(read_images(source))
            labels = None
        else:
            entries = read_lines(source)
            prompts = [manifest.prompt_template.replace("<label>", e) for e in entries]
            rows = encoder.encode_texts(prompts)
            labels = entries
        try:
            written.append(write_emb1(rows, out, labels))
        except OSError as exc:
            raise WriteFailure(f"cannot write {out}: {exc}") from exc
    return written
