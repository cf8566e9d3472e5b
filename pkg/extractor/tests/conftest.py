import os

import pytest
import torch
from transformers import BertConfig, BertModel, BertTokenizer

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")

HIDDEN_SIZE = 16

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "cat", "sat", "on", "mat", "dog", "ran", "far", "good", "bad",
    "a", "b", "c",
]


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory) -> str:
    """A local, weights-seeded BERT small enough for CPU test runs."""
    root = tmp_path_factory.mktemp("tinybert")
    vocab_file = root / "vocab.txt"
    vocab_file.write_text("\n".join(VOCAB) + "\n")
    torch.manual_seed(0)
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=HIDDEN_SIZE,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=32,
        max_position_embeddings=64,
    )
    model_dir = root / "model"
    BertModel(config).save_pretrained(model_dir)
    BertTokenizer(str(vocab_file), model_max_length=64).save_pretrained(model_dir)
    return str(model_dir)
