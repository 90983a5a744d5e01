"""CLIP encoder wrapper around transformers."""

from __future__ import annotations

import numpy as np


class ModelLoadFailure(RuntimeError):
    pass


def _features(output):
    # transformers < 5 returns the tensor, >= 5 wraps it
    import torch

    if torch.is_tensor(output):
        return output
    return output.pooler_output


class ClipEncoder:
    """Loads a CLIP checkpoint (hub id or local directory) and encodes
    text or images into l2-normalized float32 rows."""

    def __init__(self, model_name: str, batch_size: int = 64):
        try:
            from transformers import CLIPModel, CLIPProcessor

            self.model = CLIPModel.from_pretrained(model_name)
            self.processor = CLIPProcessor.from_pretrained(model_name)
        except Exception as exc:
            raise ModelLoadFailure(f"cannot load CLIP model {model_name!r}: {exc}") from exc
        self.model.eval()
        self.batch_size = batch_size

    def _normalized(self, feats) -> np.ndarray:
        feats = feats / feats.norm(dim=-1, keepdim=True)
        return feats.cpu().numpy().astype(np.float32)

    def encode_texts(self, texts) -> np.ndarray:
        import torch

        texts = list(texts)
        chunks = []
        with torch.no_grad():
            for i in range(0, len(texts), self.batch_size):
                enc = self.processor(
                    text=texts[i : i + self.batch_size],
                    return_tensors="pt", padding=True, truncation=True,
                )
                feats = _features(self.model.get_text_features(**enc))
                chunks.append(self._normalized(feats))
        return np.concatenate(chunks)

    def encode_images(self, images) -> np.ndarray:
        import torch

        images = list(images)
        chunks = []
        with torch.no_grad():
            for i in range(0, len(images), self.batch_size):
                enc = self.processor(images=images[i : i + self.batch_size], return_tensors="pt")
                feats = _features(self.model.get_image_features(**enc))
                chunks.append(self._normalized(feats))
        return np.concatenate(chunks)
