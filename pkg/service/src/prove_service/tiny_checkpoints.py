"""Build miniature checkpoints for development and smoke testing.

Real deployments point the service at externally supplied fine-tuned
checkpoints. These builders produce tiny stand-ins in the same on-disk
format: a toy sequence-to-sequence verbaliser actually fitted to a handful
of label-to-sentence pairs, plus randomly initialised (but seeded and
digest-stable) relevance and stance scorers. They let the full wire protocol
run end to end on a laptop within seconds; no quality claims attach to them.
"""

from __future__ import annotations

import sys
from pathlib import Path

TOY_PAIRS = [
    ("anna vogel | occupation | sculptor",
     "anna vogel's occupation is sculptor."),
    ("librarian of congress | officeholder | james billington",
     "james billington is the officeholder of librarian of congress."),
    ("port ellen harbour | inception | 1712",
     "port ellen harbour's inception is 1712."),
    ("bridgetown bridge | length | 304 metres",
     "bridgetown bridge's length is 304 metres."),
    ("blue museum | founder | maria keller",
     "blue museum's founder is maria keller."),
    ("robert brunton | date of birth | 23 march 1796",
     "robert brunton's date of birth is 23 march 1796."),
    ("the tower | height | 96 metres",
     "the tower's height is 96 metres."),
    ("green hall | architect | ines bauer",
     "green hall's architect is ines bauer."),
]

_BERT_WORDS = [
    "the", "is", "a", "of", "in", "not", "was", "and", "anna", "vogel",
    "sculptor", "occupation", "museum", "founder", "harbour", "bridge",
    "length", "born", "congress", "librarian",
]


def _alias_sentencepiece_pb2() -> None:
    # tokenizers' spm import expects the pb2 module at top level.
    import sentencepiece.sentencepiece_model_pb2 as spm_pb2

    sys.modules.setdefault("sentencepiece_model_pb2", spm_pb2)


def _train_sentencepiece(corpus_lines: list[str], workdir: Path) -> Path:
    import sentencepiece as spm

    corpus = workdir / "corpus.txt"
    corpus.write_text("\n".join(corpus_lines), "utf-8")
    spm.SentencePieceTrainer.train(
        input=str(corpus),
        model_prefix=str(workdir / "spiece"),
        vocab_size=220,
        model_type="unigram",
        pad_id=0,
        eos_id=1,
        unk_id=2,
        bos_id=-1,
        hard_vocab_limit=False,
        minloglevel=2,
    )
    return workdir / "spiece.model"


def _fast_tokenizer_from_spm(spm_path: Path):
    from tokenizers.implementations import SentencePieceUnigramTokenizer
    from tokenizers.processors import TemplateProcessing
    from transformers import PreTrainedTokenizerFast

    _alias_sentencepiece_pb2()
    inner = SentencePieceUnigramTokenizer.from_spm(str(spm_path))._tokenizer
    inner.post_processor = TemplateProcessing(
        single="$A </s>", special_tokens=[("</s>", 1)]
    )
    return PreTrainedTokenizerFast(
        tokenizer_object=inner,
        unk_token="<unk>",
        eos_token="</s>",
        pad_token="<pad>",
    )


def build_verbaliser(out_dir: Path, seed: int = 0, steps: int = 300) -> Path:
    """Fit a toy seq2seq verbaliser on TOY_PAIRS and save it."""
    import torch
    from transformers import T5Config, T5ForConditionalGeneration

    out_dir.mkdir(parents=True, exist_ok=True)
    corpus = [a for a, _ in TOY_PAIRS] + [b for _, b in TOY_PAIRS]
    tokenizer = _fast_tokenizer_from_spm(_train_sentencepiece(corpus, out_dir))

    torch.manual_seed(seed)
    config = T5Config(
        vocab_size=max(len(tokenizer), 128),
        d_model=64,
        d_ff=128,
        d_kv=16,
        num_layers=2,
        num_heads=2,
        decoder_start_token_id=tokenizer.pad_token_id,
        pad_token_id=tokenizer.pad_token_id,
        eos_token_id=tokenizer.eos_token_id,
    )
    model = T5ForConditionalGeneration(config)

    encoded = tokenizer([a for a, _ in TOY_PAIRS], return_tensors="pt", padding=True)
    labels = tokenizer([b for _, b in TOY_PAIRS], return_tensors="pt", padding=True).input_ids
    labels[labels == tokenizer.pad_token_id] = -100
    optimiser = torch.optim.Adam(model.parameters(), lr=3e-3)
    model.train()
    for _ in range(steps):
        optimiser.zero_grad()
        loss = model(
            input_ids=encoded.input_ids,
            attention_mask=encoded.attention_mask,
            labels=labels,
        ).loss
        loss.backward()
        optimiser.step()

    model.eval()
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    return out_dir


def _bert_vocab() -> list[str]:
    letters = list("abcdefghijklmnopqrstuvwxyz0123456789")
    return (
        ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
        + letters
        + ["##" + c for c in letters]
        + _BERT_WORDS
    )


def build_scorer(out_dir: Path, num_labels: int, seed: int = 0) -> Path:
    """Save a tiny randomly initialised (seeded) classification checkpoint."""
    import torch
    from transformers import BertConfig, BertForSequenceClassification, BertTokenizer

    out_dir.mkdir(parents=True, exist_ok=True)
    vocab_path = out_dir / "vocab.txt"
    vocab_path.write_text("\n".join(_bert_vocab()), "utf-8")
    tokenizer = BertTokenizer(vocab_file=str(vocab_path))

    torch.manual_seed(seed)
    config = BertConfig(
        vocab_size=len(_bert_vocab()),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=128,
        num_labels=num_labels,
    )
    model = BertForSequenceClassification(config).eval()
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    return out_dir


def build_all(root: Path, seed: int = 0, steps: int = 300) -> dict[str, Path]:
    """All three checkpoints under ``root``; returns their paths by name."""
    return {
        "verbaliser": build_verbaliser(root / "verbaliser", seed=seed, steps=steps),
        "relevance": build_scorer(root / "relevance", num_labels=1, seed=seed + 1),
        "stance": build_scorer(root / "stance", num_labels=3, seed=seed + 2),
    }
