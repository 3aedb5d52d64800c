"""Shared builders for the test suite."""

import pytest

from topical import Author, Corpus, Document, register_topics


def make_doc(doc_id="d1", text="hello world", author_id="u1", **kwargs):
    kwargs.setdefault("author", Author(id=author_id, name="", bio=""))
    return Document(id=doc_id, text=text, **kwargs)


@pytest.fixture
def doc_factory():
    return make_doc


@pytest.fixture
def tiny_space():
    return register_topics(["Sports", "Music", "News"])


@pytest.fixture
def tiny_corpus():
    docs = [
        make_doc("d1", "the big game tonight", "u1", gold_labels={"Sports"}),
        make_doc("d2", "new album drops", "u2", gold_labels={"Music"}),
        make_doc("d3", "game soundtrack released", "u1", gold_labels={"Sports", "Music"}),
        make_doc("d4", "good morning", "u3", gold_labels=set()),
    ]
    return Corpus(docs, provenance="tiny")
