"""Estimator-style wrappers around the training and calibration pipelines.

:class:`TopicClassifier` follows the familiar fit/predict shape over
sequences of :class:`~topical.corpus.Document` (or a whole
:class:`~topical.corpus.Corpus`); :class:`ConstraintCalibrator` is a
transformer over probability matrices.  Both expose their knobs as plain
constructor parameters, so ``get_params``/``set_params``/``clone`` work as
usual.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .classifier import (
    LinearDualModel,
    TrainConfig,
    combine_logits,
    load_model,
    predict_logits,
    predict_many,
    train,
)
from .constraints import ConstraintSet
from .corpus import Corpus, Document
from .errors import DataError
from .evaluate import average_precision, median_aps
from .factorgraph import BPConfig, calibrate
from .features import AssemblyConfig
from .topics import TopicSpace, default_topic_space, encode_labels, register_topics

__all__ = ["TopicClassifier", "ConstraintCalibrator"]


def _as_documents(X) -> list[Document]:
    if isinstance(X, Corpus):
        return list(X)
    docs = list(X)
    for item in docs:
        if not isinstance(item, Document):
            raise DataError(
                f"expected Document instances or a Corpus, got {type(item).__name__}"
            )
    return docs


class TopicClassifier(BaseEstimator):
    """Dual-head linear multi-label classifier over documents.

    Parameters mirror the training configuration; ``topics`` may be a
    TopicSpace, a sequence of names, or None for the packaged topic list.
    ``y`` in :meth:`fit` is optional -- when omitted, labels come from each
    document's ``label_source`` field (gold or weak); when given, it must
    be one iterable of topic names per document.

    Attributes after fit: ``model_`` (the raw weight bundle), ``topics_``
    (name tuple) and ``loss_curve_`` (post-epoch training losses).
    """

    def __init__(
        self,
        topics=None,
        epochs: int = 5,
        learning_rate: float = 0.1,
        dim: int = 2**18,
        weight_cap: float = 100.0,
        l2: float = 0.0,
        seed: int = 0,
        label_source: str = "gold",
        use_links: bool = True,
        use_media: bool = True,
        use_entities: bool = True,
        use_author: bool = True,
        decision_threshold: float = 0.5,
        init_model=None,
    ):
        self.topics = topics
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.dim = dim
        self.weight_cap = weight_cap
        self.l2 = l2
        self.seed = seed
        self.label_source = label_source
        self.use_links = use_links
        self.use_media = use_media
        self.use_entities = use_entities
        self.use_author = use_author
        self.decision_threshold = decision_threshold
        self.init_model = init_model

    def _topic_space(self) -> TopicSpace:
        if self.topics is None:
            return default_topic_space()
        if isinstance(self.topics, TopicSpace):
            return self.topics
        return register_topics(list(self.topics))

    def _assembly(self) -> AssemblyConfig:
        return AssemblyConfig(
            use_links=self.use_links,
            use_media=self.use_media,
            use_entities=self.use_entities,
            use_author=self.use_author,
        )

    def fit(self, X, y=None):
        docs = _as_documents(X)
        source = self.label_source
        if y is not None:
            labels = list(y)
            if len(labels) != len(docs):
                raise DataError(
                    f"y has {len(labels)} entries for {len(docs)} documents"
                )
            docs = [
                replace(doc, gold_labels=set(lab)) for doc, lab in zip(docs, labels)
            ]
            source = "gold"

        init = self.init_model
        if isinstance(init, (str, Path)):
            init = load_model(init)
        elif init is not None and not isinstance(init, LinearDualModel):
            raise DataError("init_model must be a model, a path, or None")

        config = TrainConfig(
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            dim=self.dim,
            weight_cap=self.weight_cap,
            l2=self.l2,
            seed=self.seed,
        )
        self.model_ = train(
            Corpus(docs),
            source,
            self._topic_space(),
            config,
            assembly=self._assembly(),
            init=init,
        )
        self.topics_ = self.model_.space.names
        self.loss_curve_ = list(self.model_.epoch_losses)
        return self

    def predict_proba(self, X) -> np.ndarray:
        check_is_fitted(self, "model_")
        return predict_many(self.model_, _as_documents(X))

    def decision_function(self, X) -> np.ndarray:
        """Combined (content + author) logits, one row per document."""
        check_is_fitted(self, "model_")
        docs = _as_documents(X)
        if not docs:
            return np.zeros((0, len(self.model_.space)))
        rows = []
        for doc in docs:
            yt, ya = predict_logits(self.model_, doc)
            rows.append(combine_logits(yt, ya))
        return np.vstack(rows)

    def predict(self, X) -> np.ndarray:
        """Multi-hot matrix: probability strictly above ``decision_threshold``."""
        proba = self.predict_proba(X)
        return (proba > self.decision_threshold).astype(np.int64)

    def score(self, X, y=None) -> float:
        """Median per-topic average precision (topics with positives only)."""
        check_is_fitted(self, "model_")
        docs = _as_documents(X)
        space = self.model_.space
        if y is not None:
            label_rows = [encode_labels(set(lab), space) for lab in y]
        else:
            label_rows = []
            for doc in docs:
                if doc.gold_labels is None:
                    raise DataError(f"document {doc.id!r} has no gold labels")
                label_rows.append(encode_labels(doc.gold_labels, space))
        if len(label_rows) != len(docs):
            raise DataError(f"y has {len(label_rows)} entries for {len(docs)} documents")
        gold = np.vstack(label_rows) if label_rows else np.zeros((0, len(space)))
        proba = self.predict_proba(docs)
        aps = [
            average_precision(proba[:, i], gold[:, i])
            for i in range(len(space))
            if gold[:, i].sum() > 0
        ]
        return median_aps(aps)


class ConstraintCalibrator(TransformerMixin, BaseEstimator):
    """Row-wise constraint calibration of probability matrices.

    ``constraints`` may be a ConstraintSet or a mapping with
    ``inclusions``/``exclusions`` index-pair lists; None means no
    constraints (transform is then the identity).
    """

    def __init__(
        self,
        constraints=None,
        max_iters: int = 100,
        tolerance: float = 1e-8,
        damping: float = 0.0,
        epsilon: float = 1e-6,
        exact_component_limit: int = 20,
    ):
        self.constraints = constraints
        self.max_iters = max_iters
        self.tolerance = tolerance
        self.damping = damping
        self.epsilon = epsilon
        self.exact_component_limit = exact_component_limit

    def _constraint_set(self) -> ConstraintSet:
        c = self.constraints
        if c is None:
            return ConstraintSet()
        if isinstance(c, ConstraintSet):
            return c
        if isinstance(c, dict):
            return ConstraintSet(
                tuple(tuple(p) for p in c.get("inclusions", ())),
                tuple(tuple(p) for p in c.get("exclusions", ())),
            )
        raise DataError(
            "constraints must be a ConstraintSet, a dict with "
            "'inclusions'/'exclusions', or None"
        )

    @staticmethod
    def _matrix(X) -> np.ndarray:
        arr = np.asarray(X, dtype=np.float64)
        if arr.ndim != 2:
            raise DataError(f"expected a 2-D probability matrix, got shape {arr.shape}")
        return arr

    def fit(self, X, y=None):
        arr = self._matrix(X)
        constraints = self._constraint_set()
        if constraints.max_index() >= arr.shape[1]:
            raise DataError(
                f"constraint references topic index {constraints.max_index()}, "
                f"but input has {arr.shape[1]} columns"
            )
        self.constraints_ = constraints
        self.config_ = BPConfig(
            max_iters=self.max_iters,
            tolerance=self.tolerance,
            damping=self.damping,
            epsilon=self.epsilon,
            exact_component_limit=self.exact_component_limit,
        )
        self.n_features_in_ = arr.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "constraints_")
        arr = self._matrix(X)
        if arr.shape[1] != self.n_features_in_:
            raise DataError(
                f"input has {arr.shape[1]} columns, was fitted with "
                f"{self.n_features_in_}"
            )
        if arr.shape[0] == 0 or len(self.constraints_) == 0:
            return arr.copy()
        return np.vstack(
            [calibrate(row, self.constraints_, self.config_) for row in arr]
        )
