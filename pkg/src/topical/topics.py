"""Topic registry and multi-hot label encoding.

A :class:`TopicSpace` fixes the label universe: an ordered list of unique
topic names whose positions define the index semantics of every vector in
the toolkit (label vectors, logit vectors, probability vectors).  Names are
compared byte-exact; any normalization belongs to data preparation, not here.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from importlib import resources

import numpy as np

from .errors import DataError

__all__ = [
    "TopicSpace",
    "register_topics",
    "load_topic_file",
    "default_topic_space",
    "encode_labels",
    "decode_labels",
]


class TopicSpace:
    """Ordered, immutable registry of topic names.

    ``space.index[name]`` is the 0-based position of ``name``; positions are
    assigned in registration order and are part of the model-file and
    constraint-file contracts.
    """

    __slots__ = ("names", "index")

    def __init__(self, names: Sequence[str]):
        names = list(names)
        if not names:
            raise DataError("topic space requires at least one topic name")
        index: dict[str, int] = {}
        for i, name in enumerate(names):
            if name == "":
                raise DataError(f"empty topic name at position {i}")
            if name in index:
                raise DataError(f"duplicate topic name: {name!r}")
            index[name] = i
        self.names: tuple[str, ...] = tuple(names)
        self.index: dict[str, int] = index

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self.index

    def __eq__(self, other) -> bool:
        return isinstance(other, TopicSpace) and self.names == other.names

    def __repr__(self) -> str:
        return f"TopicSpace({len(self.names)} topics)"


def register_topics(names: Iterable[str]) -> TopicSpace:
    """Build a :class:`TopicSpace` with stable 0-based indices in input order."""
    return TopicSpace(list(names))


def load_topic_file(path) -> TopicSpace:
    """Read a topic list file: one topic name per line, UTF-8, order defines indices.

    Lines are taken verbatim apart from the trailing newline; blank lines are
    skipped.
    """
    with open(path, encoding="utf-8") as f:
        names = [line.rstrip("\r\n") for line in f]
    return register_topics([n for n in names if n != ""])


def default_topic_space() -> TopicSpace:
    """The topic list shipped with the package (312 topics)."""
    text = resources.files("topical.data").joinpath("topics.txt").read_text("utf-8")
    return register_topics([n for n in text.splitlines() if n != ""])


def encode_labels(labels: Iterable[str], space: TopicSpace) -> np.ndarray:
    """Multi-hot encode a set of topic names as a binary vector of len(space).

    bits[i] == 1 iff space.names[i] is in ``labels``.  Unknown labels are
    rejected by name.
    """
    bits = np.zeros(len(space), dtype=np.float64)
    for label in labels:
        pos = space.index.get(label)
        if pos is None:
            raise DataError(f"unknown topic label: {label!r}")
        bits[pos] = 1.0
    return bits


def decode_labels(bits: np.ndarray, space: TopicSpace) -> set[str]:
    """Recover the label set from a binary vector (positions of 1-bits)."""
    if len(bits) != len(space):
        raise DataError(
            f"label vector has length {len(bits)}, topic space has {len(space)}"
        )
    return {space.names[i] for i in np.flatnonzero(bits)}
