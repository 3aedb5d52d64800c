"""Dual linear encoders over hashed n-gram features with logit fusion.

Two independent linear heads produce per-topic logits: one over the content
input, one over the author input.  The heads are fused by element-wise
addition and squashed by a sigmoid; training runs per-example SGD on
class-weighted binary cross-entropy, with gradients flowing to both heads
through the summed logit.  Positive examples of topic ``t`` are up-weighted
by ``min(N / (2 * N_t+), weight_cap)`` to counter label imbalance.

Supports weak-label pretraining followed by gold-label fine-tuning by passing
the pretrained model as ``init``.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .corpus import Corpus, Document
from .errors import DataError
from .features import AssemblyConfig, assemble_author_input, assemble_content_input
from .hashing import HASH_NAME, SparseFeatureVector, featurize
from .topics import TopicSpace, encode_labels

__all__ = [
    "TrainConfig",
    "LinearDualModel",
    "train",
    "predict_logits",
    "predict_proba",
    "predict_many",
    "combine_logits",
    "sigmoid",
    "weighted_bce_loss",
    "class_weights",
    "labels_from",
    "save_model",
    "load_model",
]

PROB_CLAMP = 1e-7
MODEL_FORMAT = "topical-linear-dual-model"
MODEL_VERSION = 1
_ARRAY_ORDER = ("content_weights", "content_bias", "author_weights", "author_bias")


@dataclass
class TrainConfig:
    epochs: int = 5
    learning_rate: float = 0.1
    dim: int = 2**18
    weight_cap: float = 100.0
    l2: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise DataError(f"epochs must be >= 1, got {self.epochs}")
        if not self.learning_rate > 0:
            raise DataError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.dim < 2:
            raise DataError(f"dim must be >= 2, got {self.dim}")
        if not self.weight_cap > 0:
            raise DataError(f"weight_cap must be > 0, got {self.weight_cap}")
        if self.l2 < 0:
            raise DataError(f"l2 must be >= 0, got {self.l2}")
        if self.l2 > 0 and self.learning_rate * self.l2 >= 1.0:
            raise DataError("learning_rate * l2 must be < 1 for stable decay")


@dataclass
class LinearDualModel:
    """Weights of both heads plus everything needed to reproduce predictions."""

    space: TopicSpace
    dim: int
    content_weights: np.ndarray
    content_bias: np.ndarray
    author_weights: np.ndarray
    author_bias: np.ndarray
    assembly: AssemblyConfig = AssemblyConfig()
    version: int = MODEL_VERSION
    hash_name: str = HASH_NAME
    epoch_losses: list[float] = field(default_factory=list, repr=False)

    @classmethod
    def zeros(cls, space: TopicSpace, dim: int, assembly: AssemblyConfig = AssemblyConfig()):
        n = len(space)
        return cls(
            space=space,
            dim=dim,
            content_weights=np.zeros((n, dim)),
            content_bias=np.zeros(n),
            author_weights=np.zeros((n, dim)),
            author_bias=np.zeros(n),
            assembly=assembly,
        )

    def copy(self) -> "LinearDualModel":
        return replace(
            self,
            content_weights=self.content_weights.copy(),
            content_bias=self.content_bias.copy(),
            author_weights=self.author_weights.copy(),
            author_bias=self.author_bias.copy(),
            epoch_losses=list(self.epoch_losses),
        )


def sigmoid(logits: np.ndarray) -> np.ndarray:
    """Numerically stable logistic transform."""
    x = np.asarray(logits, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def combine_logits(content_logits: np.ndarray, author_logits: np.ndarray) -> np.ndarray:
    """Fuse the two heads' logits by element-wise addition."""
    yt = np.asarray(content_logits, dtype=np.float64)
    ya = np.asarray(author_logits, dtype=np.float64)
    if yt.shape != ya.shape:
        raise DataError(f"logit shape mismatch: {yt.shape} vs {ya.shape}")
    return yt + ya


def weighted_bce_loss(
    probs: np.ndarray, gold: np.ndarray, weights: np.ndarray
) -> float:
    """Class-weighted binary cross-entropy; the weight applies to positives only.

    loss = -sum_t [ w_t * y_t * ln p_t + (1 - y_t) * ln(1 - p_t) ]
    """
    p = np.clip(np.asarray(probs, dtype=np.float64), PROB_CLAMP, 1.0 - PROB_CLAMP)
    y = np.asarray(gold, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    return float(-np.sum(w * y * np.log(p) + (1.0 - y) * np.log1p(-p)))


def class_weights(label_matrix: np.ndarray, cap: float) -> np.ndarray:
    """Per-topic positive weights min(N / (2 * N_t+), cap); cap when no positives."""
    n = label_matrix.shape[0]
    positives = label_matrix.sum(axis=0)
    weights = np.full(label_matrix.shape[1], float(cap))
    has_pos = positives > 0
    weights[has_pos] = np.minimum(n / (2.0 * positives[has_pos]), cap)
    return weights


def labels_from(doc: Document, source: str) -> set[str]:
    if source == "gold":
        labels = doc.gold_labels
    elif source == "weak":
        labels = doc.weak_labels
    else:
        raise DataError(f"label source must be 'gold' or 'weak', got {source!r}")
    if labels is None:
        raise DataError(f"document {doc.id!r} has no {source} labels")
    return labels


def _dot(weights: np.ndarray, bias: np.ndarray, sfv: SparseFeatureVector) -> np.ndarray:
    if len(sfv) == 0:
        return bias.copy()
    return weights[:, sfv.indices] @ sfv.values + bias


def predict_logits(
    model: LinearDualModel, doc: Document
) -> tuple[np.ndarray, np.ndarray]:
    """Per-topic logits of the content head and the author head for one document."""
    csf = featurize(assemble_content_input(doc, model.assembly), model.dim)
    asf = featurize(assemble_author_input(doc, model.assembly), model.dim)
    yt = _dot(model.content_weights, model.content_bias, csf)
    ya = _dot(model.author_weights, model.author_bias, asf)
    return yt, ya


def predict_proba(model: LinearDualModel, doc: Document) -> np.ndarray:
    """Combined per-topic probabilities for one document."""
    yt, ya = predict_logits(model, doc)
    return sigmoid(combine_logits(yt, ya))


def predict_many(model: LinearDualModel, docs, threads: int = 1) -> np.ndarray:
    """Probability matrix (n_docs, n_topics); document order is preserved."""
    docs = list(docs)
    if not docs:
        return np.zeros((0, len(model.space)))
    if threads <= 1 or len(docs) < 2:
        rows = [predict_proba(model, doc) for doc in docs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda d: predict_proba(model, d), docs))
    return np.vstack(rows)


class _LazyDecay:
    """Exact full-matrix L2 weight decay applied lazily to touched columns."""

    def __init__(self, weights: np.ndarray, factor: float):
        self.weights = weights
        self.factor = factor
        self.last_step = np.zeros(weights.shape[1], dtype=np.int64)

    def touch(self, indices: np.ndarray, step: int) -> None:
        delta = step - self.last_step[indices]
        self.weights[:, indices] *= self.factor ** delta.astype(np.float64)
        self.last_step[indices] = step

    def flush(self, step: int) -> None:
        delta = step - self.last_step
        self.weights *= self.factor ** delta.astype(np.float64)
        self.last_step[:] = step


def _corpus_loss(
    model: LinearDualModel,
    feature_pairs: list[tuple[SparseFeatureVector, SparseFeatureVector]],
    label_matrix: np.ndarray,
    weights: np.ndarray,
) -> float:
    total = 0.0
    for (csf, asf), gold in zip(feature_pairs, label_matrix):
        yt = _dot(model.content_weights, model.content_bias, csf)
        ya = _dot(model.author_weights, model.author_bias, asf)
        total += weighted_bce_loss(sigmoid(yt + ya), gold, weights)
    return total / len(feature_pairs)


def train(
    corpus: Corpus,
    label_source: str,
    space: TopicSpace,
    config: TrainConfig,
    assembly: AssemblyConfig = AssemblyConfig(),
    init: LinearDualModel | None = None,
) -> LinearDualModel:
    """Per-example SGD over both heads jointly; deterministic given the seed.

    ``label_source`` selects gold or weak labels; empty label sets are valid
    (all-negative targets, e.g. chatter documents).  Pass a pretrained model
    as ``init`` to fine-tune it.
    """
    docs = list(corpus)
    if not docs:
        raise DataError("cannot train on an empty corpus")

    label_matrix = np.vstack(
        [encode_labels(labels_from(doc, label_source), space) for doc in docs]
    )
    weights = class_weights(label_matrix, config.weight_cap)

    if init is not None:
        if init.dim != config.dim:
            raise DataError(
                f"init model dim {init.dim} != configured dim {config.dim}"
            )
        if init.space.names != space.names:
            raise DataError("init model topic space does not match training space")
        model = init.copy()
        model.assembly = assembly
        model.epoch_losses = []
    else:
        model = LinearDualModel.zeros(space, config.dim, assembly)

    feature_pairs = [
        (
            featurize(assemble_content_input(doc, assembly), config.dim),
            featurize(assemble_author_input(doc, assembly), config.dim),
        )
        for doc in docs
    ]

    lr = config.learning_rate
    decay_content = decay_author = None
    if config.l2 > 0:
        factor = 1.0 - lr * config.l2
        decay_content = _LazyDecay(model.content_weights, factor)
        decay_author = _LazyDecay(model.author_weights, factor)

    rng = np.random.default_rng(config.seed)
    step = 0
    for _ in range(config.epochs):
        for i in rng.permutation(len(docs)):
            csf, asf = feature_pairs[i]
            step += 1
            if decay_content is not None:
                decay_content.touch(csf.indices, step)
                decay_author.touch(asf.indices, step)
            yt = _dot(model.content_weights, model.content_bias, csf)
            ya = _dot(model.author_weights, model.author_bias, asf)
            p = sigmoid(yt + ya)
            y = label_matrix[i]
            # dL/d(logit) for the fused logit; identical for both heads
            grad = weights * y * (p - 1.0) + (1.0 - y) * p
            if len(csf) > 0:
                model.content_weights[:, csf.indices] -= lr * np.outer(grad, csf.values)
            model.content_bias -= lr * grad
            if len(asf) > 0:
                model.author_weights[:, asf.indices] -= lr * np.outer(grad, asf.values)
            model.author_bias -= lr * grad
        if decay_content is not None:
            decay_content.flush(step)
            decay_author.flush(step)
        model.epoch_losses.append(
            _corpus_loss(model, feature_pairs, label_matrix, weights)
        )
    return model


def save_model(model: LinearDualModel, path) -> None:
    """Write the versioned binary model file; output bytes are deterministic."""
    header = {
        "format": MODEL_FORMAT,
        "version": model.version,
        "dim": model.dim,
        "hash": model.hash_name,
        "dtype": "<f8",
        "topics": list(model.space.names),
        "assembly": {
            "use_links": model.assembly.use_links,
            "use_media": model.assembly.use_media,
            "use_entities": model.assembly.use_entities,
            "use_author": model.assembly.use_author,
        },
        "arrays": list(_ARRAY_ORDER),
    }
    with open(path, "wb") as f:
        f.write(json.dumps(header, sort_keys=True, ensure_ascii=False).encode("utf-8"))
        f.write(b"\n")
        for name in _ARRAY_ORDER:
            arr = np.ascontiguousarray(getattr(model, name), dtype="<f8")
            f.write(arr.tobytes())


def load_model(path) -> LinearDualModel:
    """Load a model file; round-trips to bit-identical predictions."""
    with open(path, "rb") as f:
        header_line = f.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: not a model file ({exc.msg})") from exc
        if header.get("format") != MODEL_FORMAT:
            raise DataError(f"{path}: unexpected format {header.get('format')!r}")
        if header.get("version") != MODEL_VERSION:
            raise DataError(f"{path}: unsupported version {header.get('version')!r}")
        if header.get("hash") != HASH_NAME:
            raise DataError(f"{path}: unsupported hash {header.get('hash')!r}")
        space = TopicSpace(header["topics"])
        dim = int(header["dim"])
        n = len(space)
        shapes = {
            "content_weights": (n, dim),
            "content_bias": (n,),
            "author_weights": (n, dim),
            "author_bias": (n,),
        }
        arrays = {}
        for name in header["arrays"]:
            shape = shapes[name]
            count = int(np.prod(shape))
            raw = f.read(count * 8)
            if len(raw) != count * 8:
                raise DataError(f"{path}: truncated array {name!r}")
            arrays[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
    return LinearDualModel(
        space=space,
        dim=dim,
        assembly=AssemblyConfig(**header["assembly"]),
        version=header["version"],
        hash_name=header["hash"],
        **arrays,
    )
