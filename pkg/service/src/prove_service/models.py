"""Model wrappers and the registry behind the scoring endpoints.

Three checkpoints back the service: a sequence-to-sequence verbaliser
(labels in, sentence out, beam search decoding), a single-output relevance
scorer whose logit passes through a hyperbolic tangent so scores land in
[-1, 1], and a three-class stance scorer normalised with a softmax.

Checkpoints are externally supplied transformers-format directories; the
registry can pin their sha256 digests and refuses mismatching weights. All
inference runs under no_grad in eval mode, serialised per model, so repeated
requests with identical contents produce identical outputs.
"""

from __future__ import annotations

import hashlib
import threading
from pathlib import Path

import torch

from .config import ServiceConfig

MODEL_NAMES = ("verbaliser", "relevance", "stance")


class ModelLoadError(RuntimeError):
    pass


def directory_digest(path: str | Path) -> str:
    """sha256 over the checkpoint directory's file names and contents."""
    root = Path(path)
    digest = hashlib.sha256()
    for file in sorted(p for p in root.rglob("*") if p.is_file()):
        digest.update(str(file.relative_to(root)).encode("utf-8"))
        digest.update(file.read_bytes())
    return digest.hexdigest()


def _resolve_device(device: str) -> torch.device:
    if device == "auto":
        return torch.device("cuda" if torch.cuda.is_available() else "cpu")
    return torch.device(device)


def _chunks(items: list, size: int):
    for i in range(0, len(items), size):
        yield items[i:i + size]


class _ModelBase:
    def __init__(self, path: str, config: ServiceConfig) -> None:
        self.path = path
        self.config = config
        self.device = _resolve_device(config.device)
        self.digest = directory_digest(path)
        self._lock = threading.Lock()


class Verbaliser(_ModelBase):
    def __init__(self, path: str, config: ServiceConfig) -> None:
        super().__init__(path, config)
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

        self.tokenizer = AutoTokenizer.from_pretrained(path)
        self.model = AutoModelForSeq2SeqLM.from_pretrained(path).to(self.device).eval()

    def generate(self, subject: str, predicate: str, object_: str) -> str:
        prompt = self.config.input_template.format(
            subject=subject, predicate=predicate, object=object_
        )
        settings = self.config.generation
        with self._lock, torch.no_grad():
            encoded = self.tokenizer(
                [prompt],
                return_tensors="pt",
                truncation=True,
                max_length=self.config.max_input_tokens,
            ).to(self.device)
            ids = self.model.generate(
                **encoded,
                num_beams=settings.num_beams,
                max_new_tokens=settings.max_new_tokens,
                min_new_tokens=settings.min_new_tokens,
                do_sample=False,
            )
        text = self.tokenizer.batch_decode(ids, skip_special_tokens=True)[0].strip()
        if not text:
            raise ModelLoadError("verbaliser produced an empty sentence")
        return text


class RelevanceScorer(_ModelBase):
    def __init__(self, path: str, config: ServiceConfig) -> None:
        super().__init__(path, config)
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        self.tokenizer = AutoTokenizer.from_pretrained(path)
        self.model = (
            AutoModelForSequenceClassification.from_pretrained(path)
            .to(self.device)
            .eval()
        )
        if self.model.config.num_labels != 1:
            raise ModelLoadError(
                f"relevance checkpoint has {self.model.config.num_labels} outputs, "
                f"expected a single regression head"
            )

    def score(self, claim: str, passages: list[str]) -> list[float]:
        scores: list[float] = []
        with self._lock, torch.no_grad():
            for chunk in _chunks(passages, self.config.batch_size):
                encoded = self.tokenizer(
                    [claim] * len(chunk),
                    chunk,
                    return_tensors="pt",
                    padding=True,
                    truncation=True,
                    max_length=self.config.max_input_tokens,
                ).to(self.device)
                logits = self.model(**encoded).logits[:, 0]
                scores.extend(torch.tanh(logits).tolist())
        return scores


class StanceScorer(_ModelBase):
    def __init__(self, path: str, config: ServiceConfig) -> None:
        super().__init__(path, config)
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        self.tokenizer = AutoTokenizer.from_pretrained(path)
        self.model = (
            AutoModelForSequenceClassification.from_pretrained(path)
            .to(self.device)
            .eval()
        )
        if self.model.config.num_labels != 3:
            raise ModelLoadError(
                f"stance checkpoint has {self.model.config.num_labels} outputs, "
                f"expected the three entailment classes"
            )

    def distributions(self, claim: str, evidence: list[str]) -> list[list[float]]:
        rows: list[list[float]] = []
        with self._lock, torch.no_grad():
            for chunk in _chunks(evidence, self.config.batch_size):
                encoded = self.tokenizer(
                    chunk,
                    [claim] * len(chunk),
                    return_tensors="pt",
                    padding=True,
                    truncation=True,
                    max_length=self.config.max_input_tokens,
                ).to(self.device)
                probs = torch.softmax(self.model(**encoded).logits, dim=-1)
                rows.extend(probs.tolist())
        return rows


_LOADERS = {
    "verbaliser": ("verbaliser_path", Verbaliser),
    "relevance": ("relevance_path", RelevanceScorer),
    "stance": ("stance_path", StanceScorer),
}


class ModelRegistry:
    """Holds the three models; endpoints answer 503 until their model loads."""

    def __init__(self, config: ServiceConfig) -> None:
        self.config = config
        self._models: dict[str, object | None] = {name: None for name in MODEL_NAMES}
        self._errors: dict[str, str] = {}

    def load(self, name: str) -> None:
        attr, factory = _LOADERS[name]
        path = getattr(self.config, attr)
        if path is None:
            raise ModelLoadError(f"no checkpoint path configured for {name}")
        expected = self.config.expected_digests.get(name)
        if expected is not None:
            actual = directory_digest(path)
            if actual != expected:
                raise ModelLoadError(
                    f"{name} checkpoint digest mismatch: expected {expected}, "
                    f"found {actual}"
                )
        try:
            self._models[name] = factory(path, self.config)
        except ModelLoadError:
            raise
        except Exception as exc:  # checkpoint unreadable, wrong format, ...
            self._errors[name] = str(exc)
            raise ModelLoadError(f"cannot load {name} from {path}: {exc}") from exc

    def load_all(self) -> None:
        for name in MODEL_NAMES:
            self.load(name)

    def get(self, name: str):
        return self._models.get(name)

    @property
    def all_loaded(self) -> bool:
        return all(self._models[name] is not None for name in MODEL_NAMES)

    def versions(self) -> dict:
        out = {}
        for name in MODEL_NAMES:
            model = self._models[name]
            attr, _ = _LOADERS[name]
            entry = {
                "loaded": model is not None,
                "path": getattr(self.config, attr),
            }
            if model is not None:
                entry["digest"] = model.digest
            if name in self._errors:
                entry["error"] = self._errors[name]
            out[name] = entry
        return out
