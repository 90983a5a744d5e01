import json

import numpy as np
import pytest


@pytest.fixture(scope="session")
def tiny_clip_dir(tmp_path_factory):
    """A small randomly-initialized CLIP checkpoint saved locally, so the
    real transformers loading path runs without any network access."""
    import torch
    from transformers import (
        CLIPConfig,
        CLIPImageProcessor,
        CLIPModel,
        CLIPProcessor,
        CLIPTextConfig,
        CLIPTokenizer,
        CLIPVisionConfig,
    )

    out = tmp_path_factory.mktemp("tiny-clip")

    chars = list("abcdefghijklmnopqrstuvwxyz0123456789.,!?' -<>")
    vocab = {"<|startoftext|>": 0, "<|endoftext|>": 1}
    for c in chars:
        vocab[c] = len(vocab)
    for c in chars:
        vocab[c + "</w>"] = len(vocab)
    (out / "vocab.json").write_text(json.dumps(vocab))
    (out / "merges.txt").write_text("#version: 0.2\n")

    tokenizer = CLIPTokenizer(str(out / "vocab.json"), str(out / "merges.txt"))
    config = CLIPConfig(
        text_config=CLIPTextConfig(
            vocab_size=len(vocab), hidden_size=32, intermediate_size=64,
            num_hidden_layers=2, num_attention_heads=2,
            max_position_embeddings=77, bos_token_id=0, eos_token_id=1,
        ).to_dict(),
        vision_config=CLIPVisionConfig(
            hidden_size=32, intermediate_size=64, num_hidden_layers=2,
            num_attention_heads=2, image_size=32, patch_size=16,
        ).to_dict(),
        projection_dim=16,
    )
    torch.manual_seed(0)
    model = CLIPModel(config)
    model.eval()
    model.save_pretrained(out)
    image_processor = CLIPImageProcessor(
        size={"shortest_edge": 32}, crop_size={"height": 32, "width": 32}
    )
    CLIPProcessor(image_processor=image_processor, tokenizer=tokenizer).save_pretrained(out)
    return out


@pytest.fixture()
def label_file(tmp_path):
    path = tmp_path / "labels.txt"
    path.write_text("goldfish\ntabby cat\nfire truck\n")
    return path


@pytest.fixture()
def image_dir(tmp_path):
    from PIL import Image

    out = tmp_path / "images"
    out.mkdir()
    rng = np.random.default_rng(5)
    for name in ("a.png", "b.png", "c.png", "d.png"):
        arr = (rng.random((48, 40, 3)) * 255).astype("uint8")
        Image.fromarray(arr).save(out / name)
    return out
