"""Keyword-rule weak labeling and the chatter partition.

Matching is whole-token phrase matching: text is case-folded, characters
outside letters/digits/``#``/``@`` act as token separators, and a keyword
phrase matches iff its token sequence occurs contiguously.  Keywords starting
with ``#`` match only hashtag tokens.  Documents triggering no rule are
"chatter".
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Corpus, Document, with_weak_labels
from .errors import DataError
from .topics import TopicSpace

__all__ = [
    "RuleSet",
    "compile_rules",
    "load_rule_file",
    "weak_label",
    "partition_chatter",
    "match_tokens",
]


def match_tokens(text: str) -> list[str]:
    """Case-folded tokens for rule matching; punctuation acts as whitespace."""
    folded = text.casefold()
    cleaned = [ch if (ch.isalnum() or ch in "#@") else " " for ch in folded]
    return "".join(cleaned).split()


@dataclass(frozen=True)
class Rule:
    topic: str
    keyword: str          # case-folded phrase as stored
    tokens: tuple[str, ...]  # pre-tokenized for matching


@dataclass
class RuleSet:
    rules: list[Rule]

    def __len__(self) -> int:
        return len(self.rules)

    def topics(self) -> set[str]:
        return {r.topic for r in self.rules}


def compile_rules(lines, space: TopicSpace, source: str = "<rules>") -> RuleSet:
    """Compile ``TopicName: kw1, kw2, ...`` lines into a validated RuleSet.

    Keywords are case-folded and deduplicated per (topic, keyword) pair;
    ``#`` at line start begins a comment.
    """
    rules: list[Rule] = []
    seen: set[tuple[str, str]] = set()
    for lineno, line in enumerate(lines, start=1):
        where = f"{source}:{lineno}"
        stripped = line.strip()
        if stripped == "" or stripped.startswith("#"):
            continue
        topic, sep, rest = stripped.partition(":")
        if sep == "":
            raise DataError(f"{where}: expected 'TopicName: kw1, kw2, ...'")
        topic = topic.strip()
        if topic not in space:
            raise DataError(f"{where}: unknown topic: {topic!r}")
        for raw_kw in rest.split(","):
            keyword = raw_kw.strip().casefold()
            if keyword == "":
                raise DataError(f"{where}: empty keyword under topic {topic!r}")
            tokens = tuple(match_tokens(keyword))
            if not tokens:
                raise DataError(
                    f"{where}: keyword {keyword!r} has no matchable tokens"
                )
            if (topic, keyword) in seen:
                continue
            seen.add((topic, keyword))
            rules.append(Rule(topic=topic, keyword=keyword, tokens=tokens))
    return RuleSet(rules)


def load_rule_file(path, space: TopicSpace) -> RuleSet:
    with open(path, encoding="utf-8") as f:
        return compile_rules(f, space, source=str(path))


def _contains_phrase(tokens: list[str], phrase: tuple[str, ...]) -> bool:
    n, m = len(tokens), len(phrase)
    if m > n:
        return False
    first = phrase[0]
    for i in range(n - m + 1):
        if tokens[i] == first and tuple(tokens[i : i + m]) == phrase:
            return True
    return False


def weak_label(doc: Document, rules: RuleSet) -> set[str]:
    """Topics whose keywords occur as whole-token phrases in the document text."""
    tokens = match_tokens(doc.text)
    labels: set[str] = set()
    for rule in rules.rules:
        if rule.topic in labels:
            continue
        if _contains_phrase(tokens, rule.tokens):
            labels.add(rule.topic)
    return labels


def partition_chatter(corpus: Corpus, rules: RuleSet) -> tuple[Corpus, Corpus]:
    """Split a corpus into (topical, chatter) by weak-label outcome.

    Topical documents get their weak labels attached; chatter documents get
    an explicit empty label set so they can train all-negative targets.
    """
    topical: list[Document] = []
    chatter: list[Document] = []
    for doc in corpus:
        labels = weak_label(doc, rules)
        if labels:
            topical.append(with_weak_labels(doc, labels))
        else:
            chatter.append(with_weak_labels(doc, set()))
    return (
        Corpus(topical, provenance=corpus.provenance),
        Corpus(chatter, provenance=corpus.provenance),
    )
