"""A small deterministic random-forest classifier.

Decision-tree ensemble with bootstrap sampling and per-split feature
subsampling, grown on gini impurity. Everything is seeded: the same seed,
data and configuration produce bit-identical trees, predictions and
serialised model files. Trees are stored as flat node lists so the model
round-trips through a plain JSON document.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import ProveError

MODEL_FORMAT = "prove-forest"
MODEL_VERSION = 1


class NotTrained(ProveError):
    """The model has no trees yet."""


class SchemaMismatch(ProveError):
    """Input features or a model file do not match the expected schema."""


@dataclass(frozen=True)
class ForestConfig:
    """Hyperparameters; defaults are documented, not tuned.

    ``n_jobs`` parallelises tree fitting; every tree derives its own seed
    from the forest seed up front, so the result is identical at any job
    count.
    """

    n_trees: int = 100
    max_depth: int = 8
    max_features: str | int = "sqrt"
    min_samples_split: int = 2
    min_samples_leaf: int = 1
    bootstrap: bool = True
    n_jobs: int = 1

    def resolve_max_features(self, n_features: int) -> int:
        if isinstance(self.max_features, int):
            return max(1, min(self.max_features, n_features))
        if self.max_features == "sqrt":
            return max(1, int(math.sqrt(n_features)))
        if self.max_features == "all":
            return n_features
        raise SchemaMismatch(f"unknown max_features {self.max_features!r}")


@dataclass
class _Node:
    # Internal nodes carry (feature, threshold, left, right); leaves carry a
    # class distribution. Exactly one of the two shapes is populated.
    feature: int = -1
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    distribution: tuple[float, ...] | None = None

    @property
    def is_leaf(self) -> bool:
        return self.distribution is not None


class _TreeBuilder:
    def __init__(self, X: np.ndarray, y: np.ndarray, n_classes: int,
                 config: ForestConfig, rng: np.random.Generator) -> None:
        self.X = X
        self.y = y
        self.n_classes = n_classes
        self.config = config
        self.rng = rng
        self.max_features = config.resolve_max_features(X.shape[1])
        self.nodes: list[_Node] = []

    def build(self, indices: np.ndarray) -> list[_Node]:
        self._grow(indices, depth=0)
        return self.nodes

    def _leaf(self, indices: np.ndarray) -> int:
        counts = np.bincount(self.y[indices], minlength=self.n_classes)
        dist = tuple((counts / counts.sum()).tolist())
        self.nodes.append(_Node(distribution=dist))
        return len(self.nodes) - 1

    def _grow(self, indices: np.ndarray, depth: int) -> int:
        y_here = self.y[indices]
        if (
            depth >= self.config.max_depth
            or len(indices) < self.config.min_samples_split
            or np.all(y_here == y_here[0])
        ):
            return self._leaf(indices)
        split = self._best_split(indices)
        if split is None:
            return self._leaf(indices)
        feature, threshold = split
        mask = self.X[indices, feature] <= threshold
        left_idx = indices[mask]
        right_idx = indices[~mask]
        if (
            len(left_idx) < self.config.min_samples_leaf
            or len(right_idx) < self.config.min_samples_leaf
        ):
            return self._leaf(indices)
        node_id = len(self.nodes)
        self.nodes.append(_Node(feature=feature, threshold=threshold))
        self.nodes[node_id].left = self._grow(left_idx, depth + 1)
        self.nodes[node_id].right = self._grow(right_idx, depth + 1)
        return node_id

    def _best_split(self, indices: np.ndarray) -> tuple[int, float] | None:
        n = len(indices)
        features = self.rng.permutation(self.X.shape[1])[: self.max_features]
        best: tuple[float, int, float] | None = None
        onehot = np.eye(self.n_classes)[self.y[indices]]
        for feature in features:
            values = self.X[indices, feature]
            order = np.argsort(values, kind="stable")
            sorted_values = values[order]
            boundaries = np.nonzero(sorted_values[:-1] < sorted_values[1:])[0]
            if boundaries.size == 0:
                continue
            left_counts = np.cumsum(onehot[order], axis=0)[boundaries]
            total = np.sum(onehot, axis=0)
            right_counts = total - left_counts
            n_left = boundaries + 1
            n_right = n - n_left
            gini_left = 1.0 - np.sum((left_counts / n_left[:, None]) ** 2, axis=1)
            gini_right = 1.0 - np.sum((right_counts / n_right[:, None]) ** 2, axis=1)
            weighted = (n_left * gini_left + n_right * gini_right) / n
            pos = int(np.argmin(weighted))
            score = float(weighted[pos])
            if best is None or score < best[0]:
                cut = boundaries[pos]
                threshold = float((sorted_values[cut] + sorted_values[cut + 1]) / 2.0)
                best = (score, int(feature), threshold)
        if best is None:
            return None
        return best[1], best[2]


@dataclass
class RandomForest:
    """Bagged decision trees over a fixed class list."""

    classes: tuple[str, ...]
    n_features: int
    config: ForestConfig = field(default_factory=ForestConfig)
    seed: int = 0
    trees: list[list[_Node]] = field(default_factory=list)

    @property
    def trained(self) -> bool:
        return bool(self.trees)

    def fit(self, X: np.ndarray, y_labels: list[str]) -> "RandomForest":
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise SchemaMismatch(
                f"expected (*, {self.n_features}) features, got {X.shape}"
            )
        if len(y_labels) != X.shape[0]:
            raise SchemaMismatch("one label per row required")
        try:
            y = np.array([self.classes.index(label) for label in y_labels])
        except ValueError as exc:
            raise SchemaMismatch(f"label outside class list: {exc}") from exc
        root = np.random.default_rng(self.seed)
        tree_seeds = root.integers(0, 2**63 - 1, size=self.config.n_trees)
        n = X.shape[0]

        def grow_one(tree_seed: int) -> list[_Node]:
            rng = np.random.default_rng(int(tree_seed))
            if self.config.bootstrap:
                sample = rng.integers(0, n, size=n)
            else:
                sample = np.arange(n)
            builder = _TreeBuilder(X, y, len(self.classes), self.config, rng)
            return builder.build(np.asarray(sample))

        if self.config.n_jobs > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=self.config.n_jobs) as pool:
                self.trees = list(pool.map(grow_one, tree_seeds))
        else:
            self.trees = [grow_one(s) for s in tree_seeds]
        return self

    def _tree_proba(self, nodes: list[_Node], row: np.ndarray) -> np.ndarray:
        node = nodes[0]
        while not node.is_leaf:
            node = nodes[node.left if row[node.feature] <= node.threshold else node.right]
        return np.asarray(node.distribution)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        if not self.trained:
            raise NotTrained("fit the forest before predicting")
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise SchemaMismatch(
                f"expected {self.n_features} features, got {X.shape[1]}"
            )
        out = np.zeros((X.shape[0], len(self.classes)))
        for nodes in self.trees:
            for i, row in enumerate(X):
                out[i] += self._tree_proba(nodes, row)
        out /= len(self.trees)
        return out[0] if single else out

    def predict(self, X: np.ndarray) -> list[str]:
        proba = np.atleast_2d(self.predict_proba(X))
        # Ties break towards the lowest class index, matching argmax_class.
        return [self.classes[int(np.argmax(row))] for row in proba]

    # --- persistence -------------------------------------------------------

    def to_dict(self) -> dict:
        def encode(node: _Node) -> dict:
            if node.is_leaf:
                return {"leaf": list(node.distribution)}
            return {"f": node.feature, "t": node.threshold, "l": node.left, "r": node.right}

        # n_jobs is an execution detail, not part of the model identity.
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "classes": list(self.classes),
            "n_features": self.n_features,
            "seed": self.seed,
            "config": {
                "n_trees": self.config.n_trees,
                "max_depth": self.config.max_depth,
                "max_features": self.config.max_features,
                "min_samples_split": self.config.min_samples_split,
                "min_samples_leaf": self.config.min_samples_leaf,
                "bootstrap": self.config.bootstrap,
            },
            "trees": [[encode(node) for node in nodes] for nodes in self.trees],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "RandomForest":
        if payload.get("format") != MODEL_FORMAT:
            raise SchemaMismatch(f"not a {MODEL_FORMAT} document")
        if payload.get("version") != MODEL_VERSION:
            raise SchemaMismatch(f"unsupported model version {payload.get('version')!r}")
        config = ForestConfig(**payload["config"])

        def decode(entry: dict) -> _Node:
            if "leaf" in entry:
                return _Node(distribution=tuple(entry["leaf"]))
            return _Node(feature=entry["f"], threshold=entry["t"],
                         left=entry["l"], right=entry["r"])

        forest = cls(
            classes=tuple(payload["classes"]),
            n_features=int(payload["n_features"]),
            config=config,
            seed=int(payload["seed"]),
        )
        forest.trees = [[decode(e) for e in nodes] for nodes in payload["trees"]]
        return forest

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n",
            "utf-8",
        )

    @classmethod
    def load(cls, path: str | Path) -> "RandomForest":
        try:
            payload = json.loads(Path(path).read_text("utf-8"))
        except (OSError, ValueError) as exc:
            raise SchemaMismatch(f"cannot read model file {path}: {exc}") from exc
        return cls.from_dict(payload)
