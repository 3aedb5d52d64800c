"""Seeded synthetic corpus for end-to-end exercises and benchmarks.

The generator plants three separable kinds of signal:

* keyword signal: each topic owns a small vocabulary that appears only in
  that topic's documents;
* author signal: a slice of each topic's documents carries no topical text
  at all -- only the author's bio (a per-topic marker token shared by that
  topic's specialist accounts) identifies the topic;
* trap words: words that chatter documents share with topical documents,
  so a model trained without chatter negatives confidently fires on
  chatter, while one trained with them does not.

Three sports topics sit under a "Sports" umbrella topic (their documents
carry both labels), giving the constraint engine real structure to work
with.  All draws come from one seeded generator, so identical parameters
always yield an identical corpus.
"""

from __future__ import annotations

import numpy as np

from .corpus import Author, Corpus, Document, Hyperlink
from .errors import DataError
from .topics import TopicSpace, register_topics

__all__ = [
    "SYNTHETIC_TOPICS",
    "SPORTS_CHILDREN",
    "make_synthetic_corpus",
    "synthetic_rule_lines",
    "synthetic_constraint_lines",
]

SYNTHETIC_TOPICS = (
    "Sports",
    "Cricket",
    "Basketball",
    "Tennis",
    "Cooking",
    "Gaming",
    "Movies",
    "Music",
    "Politics",
    "Science",
)

SPORTS_CHILDREN = ("Cricket", "Basketball", "Tennis")

_TOPIC_WORDS = {
    "Sports": ("stadium", "league", "referee", "championship"),
    "Cricket": ("wicket", "batsman", "bowler", "innings"),
    "Basketball": ("dunk", "rebound", "layup", "pointguard"),
    "Tennis": ("backhand", "deuce", "tiebreak", "volley"),
    "Cooking": ("recipe", "saute", "marinade", "simmer"),
    "Gaming": ("speedrun", "respawn", "loadout", "sidequest"),
    "Movies": ("trailer", "screenplay", "matinee", "boxoffice"),
    "Music": ("chorus", "setlist", "encore", "remix"),
    "Politics": ("ballot", "senate", "caucus", "manifesto"),
    "Science": ("hypothesis", "telescope", "genome", "catalyst"),
}

# Two per topic; each appears both in that topic's documents and in chatter.
_TOPIC_TRAPS = {
    "Sports": ("tonight", "crowd"),
    "Cricket": ("sunday", "tea"),
    "Basketball": ("downtown", "sneakers"),
    "Tennis": ("summer", "club"),
    "Cooking": ("dinner", "kitchen"),
    "Gaming": ("midnight", "stream"),
    "Movies": ("weekend", "popcorn"),
    "Music": ("tickets", "crew"),
    "Politics": ("meeting", "neighbors"),
    "Science": ("reading", "notes"),
}

_GENERIC_TRAPS = ("coffee", "monday")

_FILLERS = (
    "today",
    "really",
    "about",
    "just",
    "always",
    "still",
    "little",
    "never",
    "again",
    "maybe",
    "pretty",
    "quite",
)

_BIO_MARKERS = {
    "Sports": "sportsdesk",
    "Cricket": "cricketblog",
    "Basketball": "hoopswriter",
    "Tennis": "courtsider",
    "Cooking": "homechef",
    "Gaming": "streamer",
    "Movies": "cinephile",
    "Music": "giggoer",
    "Politics": "wonk",
    "Science": "labrat",
}

_GENERIC_BIOS = (
    "posting my days",
    "here for everything",
    "no particular beat",
    "lurking mostly",
)

_SPECIALISTS_PER_TOPIC = 6
_GENERIC_AUTHORS = 40


def synthetic_rule_lines() -> list[str]:
    """Keyword rules that exactly match the planted per-topic vocabulary."""
    return [f"{t}: {', '.join(_TOPIC_WORDS[t])}" for t in SYNTHETIC_TOPICS]


def synthetic_constraint_lines() -> list[str]:
    """Umbrella inclusions plus pairwise exclusions among the sports."""
    lines = [f"includes Sports {child}" for child in SPORTS_CHILDREN]
    lines += [
        "excludes Cricket Basketball",
        "excludes Cricket Tennis",
        "excludes Basketball Tennis",
    ]
    return lines


def _pick(rng: np.random.Generator, seq, k: int) -> list[str]:
    return [seq[i] for i in rng.choice(len(seq), size=k, replace=False)]


def make_synthetic_corpus(
    n_docs: int = 2000,
    seed: int = 7,
    chatter_fraction: float = 0.3,
    author_only_fraction: float = 0.25,
) -> tuple[Corpus, TopicSpace]:
    """Generate a corpus of topical and chatter documents with gold labels.

    ``author_only_fraction`` of each topic's documents have topically empty
    text; their label is recoverable only through the author's bio marker.
    Chatter documents carry an explicit empty gold label set.
    """
    if n_docs < 1:
        raise DataError(f"n_docs must be >= 1, got {n_docs}")
    if not 0.0 <= chatter_fraction < 1.0:
        raise DataError(f"chatter_fraction must be in [0, 1), got {chatter_fraction}")
    if not 0.0 <= author_only_fraction <= 1.0:
        raise DataError(
            f"author_only_fraction must be in [0, 1], got {author_only_fraction}"
        )
    rng = np.random.default_rng(seed)
    topics = list(SYNTHETIC_TOPICS)
    space = register_topics(topics)

    specialists = {
        t: [
            Author(
                id=f"{t.lower()}-fan-{j}",
                name=f"{t.lower()} fan {j}",
                bio=f"{_BIO_MARKERS[t]} posting daily",
            )
            for j in range(_SPECIALISTS_PER_TOPIC)
        ]
        for t in topics
    }
    generic = [
        Author(
            id=f"user-{i:03d}",
            name=f"user {i:03d}",
            bio=_GENERIC_BIOS[i % len(_GENERIC_BIOS)],
        )
        for i in range(_GENERIC_AUTHORS)
    ]

    n_chatter = int(round(n_docs * chatter_fraction))
    n_topical = n_docs - n_chatter
    base, extra = divmod(n_topical, len(topics))
    per_topic = [base + (1 if i < extra else 0) for i in range(len(topics))]

    docs: list[Document] = []
    counter = 0

    def next_id() -> str:
        nonlocal counter
        counter += 1
        return f"d{counter:05d}"

    for ti, topic in enumerate(topics):
        total = per_topic[ti]
        n_author_only = int(round(total * author_only_fraction))
        n_text = total - n_author_only
        gold = {topic} | ({"Sports"} if topic in SPORTS_CHILDREN else set())
        trap_a, trap_b = _TOPIC_TRAPS[topic]

        for _ in range(n_text):
            keywords = _pick(rng, _TOPIC_WORDS[topic], int(rng.integers(2, 4)))
            tokens = list(keywords)
            if topic in SPORTS_CHILDREN and rng.random() < 0.5:
                tokens += _pick(rng, _TOPIC_WORDS["Sports"], 1)
            tokens += _pick(rng, _FILLERS, 4)
            if rng.random() < 0.6:
                tokens.append(trap_a)
            if rng.random() < 0.6:
                tokens.append(trap_b)
            if rng.random() < 0.3:
                tokens += _pick(rng, _GENERIC_TRAPS, 1)
            rng.shuffle(tokens)

            media = []
            if rng.random() < 0.3:
                media.append(f"photo of a {keywords[0]}")
            links = []
            if rng.random() < 0.2:
                links.append(
                    Hyperlink(
                        url=f"https://posts.example/{topic.lower()}/{counter}",
                        title=f"{keywords[0]} notes",
                        description=f"a longer writeup about {keywords[0]}",
                    )
                )
            entities = []
            if rng.random() < 0.2:
                entities.append(f"{keywords[0]} is a {topic.lower()} term")

            docs.append(
                Document(
                    id=next_id(),
                    text=" ".join(tokens),
                    hyperlinks=links,
                    media_annotations=media,
                    entity_descriptions=entities,
                    author=generic[int(rng.integers(len(generic)))],
                    gold_labels=set(gold),
                )
            )

        for _ in range(n_author_only):
            tokens = _pick(rng, _FILLERS, 5) + _pick(rng, _GENERIC_TRAPS, 1)
            rng.shuffle(tokens)
            author = specialists[topic][int(rng.integers(_SPECIALISTS_PER_TOPIC))]
            docs.append(
                Document(
                    id=next_id(),
                    text=" ".join(tokens),
                    author=author,
                    gold_labels=set(gold),
                )
            )

    all_traps = [w for t in topics for w in _TOPIC_TRAPS[t]] + list(_GENERIC_TRAPS)
    for _ in range(n_chatter):
        themes = _pick(rng, topics, 2)
        tokens = [w for t in themes for w in _TOPIC_TRAPS[t]]
        tokens += _pick(rng, all_traps, 1)
        tokens += _pick(rng, _FILLERS, int(rng.integers(3, 6)))
        rng.shuffle(tokens)
        media = ["photo of my desk"] if rng.random() < 0.1 else []
        docs.append(
            Document(
                id=next_id(),
                text=" ".join(tokens),
                media_annotations=media,
                author=generic[int(rng.integers(len(generic)))],
                gold_labels=set(),
            )
        )

    order = rng.permutation(len(docs))
    shuffled = [docs[i] for i in order]
    corpus = Corpus(shuffled, provenance=f"synthetic:seed={seed}:docs={n_docs}")
    return corpus, space
