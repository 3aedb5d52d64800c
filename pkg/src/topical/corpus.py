"""Document corpora: JSONL loading, schema validation, user-disjoint splits.

A corpus file is newline-delimited JSON, one document object per line, with
the field names used by :class:`Document`.  Optional fields default to empty
lists/strings; ``gold_labels``/``weak_labels`` distinguish "absent" (``None``,
key missing) from "labeled with nothing" (``[]``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import DataError

__all__ = [
    "Hyperlink",
    "Author",
    "Document",
    "Corpus",
    "load_corpus",
    "save_corpus",
    "split_user_disjoint",
]

MAX_TEXT_CHARS = 4000


@dataclass
class Hyperlink:
    url: str = ""
    title: str = ""
    description: str = ""


@dataclass
class Author:
    id: str = ""
    name: str = ""
    bio: str = ""


@dataclass
class Document:
    """One post: text plus the precomputed side features the encoders consume."""

    id: str
    text: str
    hyperlinks: list[Hyperlink] = field(default_factory=list)
    media_annotations: list[str] = field(default_factory=list)
    entity_descriptions: list[str] = field(default_factory=list)
    author: Author = field(default_factory=Author)
    gold_labels: Optional[set[str]] = None
    weak_labels: Optional[set[str]] = None


@dataclass
class Corpus:
    documents: list[Document] = field(default_factory=list)
    provenance: str = ""

    def __post_init__(self):
        seen = set()
        for doc in self.documents:
            if doc.id in seen:
                raise DataError(f"duplicate document id: {doc.id!r}")
            seen.add(doc.id)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)


def _expect(obj, key, typ, where):
    value = obj.get(key)
    if value is None:
        raise DataError(f"{where}: missing required field {key!r}")
    if not isinstance(value, typ):
        raise DataError(f"{where}: field {key!r} must be {typ.__name__}")
    return value


def _string_list(obj, key, where):
    value = obj.get(key, [])
    if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
        raise DataError(f"{where}: field {key!r} must be a list of strings")
    return list(value)


def _label_set(obj, key, where):
    if key not in obj or obj[key] is None:
        return None
    return set(_string_list(obj, key, where))


def _parse_document(obj: dict, where: str) -> Document:
    doc_id = _expect(obj, "id", str, where)
    if doc_id == "":
        raise DataError(f"{where}: document id must be non-empty")
    text = _expect(obj, "text", str, where)
    if len(text) > MAX_TEXT_CHARS:
        raise DataError(
            f"{where}: text exceeds {MAX_TEXT_CHARS} characters ({len(text)})"
        )

    links = []
    for k, raw in enumerate(obj.get("hyperlinks", [])):
        if not isinstance(raw, dict):
            raise DataError(f"{where}: hyperlinks[{k}] must be an object")
        links.append(
            Hyperlink(
                url=raw.get("url", ""),
                title=raw.get("title", ""),
                description=raw.get("description", ""),
            )
        )

    raw_author = _expect(obj, "author", dict, where)
    author = Author(
        id=raw_author.get("id", ""),
        name=raw_author.get("name", ""),
        bio=raw_author.get("bio", ""),
    )
    if author.id == "":
        raise DataError(f"{where}: author.id must be non-empty")

    return Document(
        id=doc_id,
        text=text,
        hyperlinks=links,
        media_annotations=_string_list(obj, "media_annotations", where),
        entity_descriptions=_string_list(obj, "entity_descriptions", where),
        author=author,
        gold_labels=_label_set(obj, "gold_labels", where),
        weak_labels=_label_set(obj, "weak_labels", where),
    )


def load_corpus(path) -> Corpus:
    """Load a JSONL corpus file; errors carry 1-based line numbers."""
    documents: list[Document] = []
    ids: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if line.strip() == "":
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{where}: malformed JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise DataError(f"{where}: document record must be an object")
            doc = _parse_document(obj, where)
            if doc.id in ids:
                raise DataError(f"{where}: duplicate document id: {doc.id!r}")
            ids.add(doc.id)
            documents.append(doc)
    return Corpus(documents, provenance=str(path))


def document_to_record(doc: Document) -> dict:
    record = {
        "id": doc.id,
        "text": doc.text,
        "hyperlinks": [
            {"url": h.url, "title": h.title, "description": h.description}
            for h in doc.hyperlinks
        ],
        "media_annotations": list(doc.media_annotations),
        "entity_descriptions": list(doc.entity_descriptions),
        "author": {"id": doc.author.id, "name": doc.author.name, "bio": doc.author.bio},
    }
    if doc.gold_labels is not None:
        record["gold_labels"] = sorted(doc.gold_labels)
    if doc.weak_labels is not None:
        record["weak_labels"] = sorted(doc.weak_labels)
    return record


def save_corpus(corpus: Corpus, path) -> None:
    """Write JSONL with sorted keys; output bytes are deterministic."""
    with open(path, "w", encoding="utf-8") as f:
        for doc in corpus:
            f.write(
                json.dumps(
                    document_to_record(doc),
                    sort_keys=True,
                    ensure_ascii=False,
                    separators=(",", ":"),
                )
            )
            f.write("\n")


def split_user_disjoint(
    corpus: Corpus, fractions: tuple[float, float, float], seed: int
) -> tuple[Corpus, Corpus, Corpus]:
    """Split a corpus so each author's documents land entirely in one split.

    Authors are shuffled in a seeded pseudo-random order and assigned
    greedily: the current split receives whole authors until its
    document-count budget (fraction * corpus size) is met, so a split can
    overshoot its budget by at most one author's documents.  Deterministic
    given the seed.
    """
    fractions = tuple(float(x) for x in fractions)
    if len(fractions) != 3 or any(x < 0 for x in fractions):
        raise DataError("fractions must be three non-negative reals")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise DataError(f"fractions must sum to 1, got {sum(fractions)!r}")

    by_author: dict[str, list[Document]] = {}
    for doc in corpus:
        by_author.setdefault(doc.author.id, []).append(doc)

    authors = sorted(by_author)
    rng = np.random.default_rng(seed)
    order = [authors[i] for i in rng.permutation(len(authors))]

    total = len(corpus)
    budgets = [f * total for f in fractions]
    buckets: list[list[str]] = [[], [], []]
    current = 0
    filled = 0.0
    for author in order:
        while current < 2 and filled >= budgets[current]:
            current += 1
            filled = 0.0
        buckets[current].append(author)
        filled += len(by_author[author])

    splits = []
    for bucket in buckets:
        members = set(bucket)
        docs = [doc for doc in corpus if doc.author.id in members]
        splits.append(Corpus(docs, provenance=corpus.provenance))
    return tuple(splits)


def with_weak_labels(doc: Document, labels: set[str]) -> Document:
    """Copy of ``doc`` with ``weak_labels`` attached."""
    return replace(doc, weak_labels=set(labels))
