"""Hashed bag-of-n-grams features.

Word unigrams and bigrams of the input string are hashed with BLAKE2b
(8-byte digest) and reduced modulo the feature dimensionality; presence is
binary.  BLAKE2b is a published, keyed-off 64-bit hash, so feature indices
are identical across platforms and processes; the model file records the
hash identifier.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import DataError

__all__ = ["SparseFeatureVector", "featurize", "hash_gram", "HASH_NAME"]

HASH_NAME = "blake2b-64"


def hash_gram(gram: str) -> int:
    """Deterministic 64-bit hash of one n-gram string."""
    digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class SparseFeatureVector:
    """Sorted unique indices in [0, dim) with positive values."""

    indices: np.ndarray
    values: np.ndarray
    dim: int

    def __len__(self) -> int:
        return len(self.indices)


def featurize(text: str, dim: int) -> SparseFeatureVector:
    """Hash distinct word unigrams and bigrams into a binary sparse vector."""
    if dim < 2:
        raise DataError(f"feature dimensionality must be >= 2, got {dim}")
    tokens = text.split()
    grams = set(tokens)
    grams.update(f"{a} {b}" for a, b in zip(tokens, tokens[1:]))
    if not grams:
        return SparseFeatureVector(
            indices=np.empty(0, dtype=np.int64),
            values=np.empty(0, dtype=np.float64),
            dim=dim,
        )
    idx = sorted({hash_gram(g) % dim for g in grams})
    indices = np.asarray(idx, dtype=np.int64)
    return SparseFeatureVector(
        indices=indices, values=np.ones(len(indices), dtype=np.float64), dim=dim
    )
