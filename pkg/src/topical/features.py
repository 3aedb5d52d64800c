"""Encoder input assembly.

Each document yields two strings: the content input (post text plus hyperlink,
media, and entity cues) and the author input (display name plus bio).  Side
features are appended after the text with per-class separator tokens so a
bag-of-n-grams encoder can tell feature provenance apart:

    <text> [LINK] <title> <description[:100]> ... [MEDIA] <annotation> ...
           [ENTITY] <description> ...
    <name> [BIO] <bio>

Order is fixed (links, then media, then entities, each in document order) to
keep assembly deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Document

__all__ = [
    "AssemblyConfig",
    "preprocess_text",
    "assemble_content_input",
    "assemble_author_input",
]

LINK_SEP = "[LINK]"
MEDIA_SEP = "[MEDIA]"
ENTITY_SEP = "[ENTITY]"
BIO_SEP = "[BIO]"

DESCRIPTION_CHARS = 100


@dataclass(frozen=True)
class AssemblyConfig:
    """Feature toggles; fields switched off are ignored during assembly."""

    use_links: bool = True
    use_media: bool = True
    use_entities: bool = True
    use_author: bool = True


def preprocess_text(raw: str) -> str:
    """Case-fold, drop URL and @-mention tokens, collapse whitespace.

    Idempotent: applying it twice equals applying it once.
    """
    kept = []
    for token in raw.split():
        folded = token.casefold()
        if folded.startswith(("http://", "https://")) or folded.startswith("@"):
            continue
        kept.append(folded)
    return " ".join(kept)


def assemble_content_input(doc: Document, config: AssemblyConfig = AssemblyConfig()) -> str:
    """Content-encoder input string for one document.

    The hyperlink description is truncated to its first 100 characters
    (Unicode scalar values) before case-folding.
    """
    parts = [preprocess_text(doc.text)]
    if config.use_links:
        for link in doc.hyperlinks:
            desc = link.description[:DESCRIPTION_CHARS].casefold()
            parts.append(f" {LINK_SEP} {link.title.casefold()} {desc}")
    if config.use_media:
        for annotation in doc.media_annotations:
            parts.append(f" {MEDIA_SEP} {annotation.casefold()}")
    if config.use_entities:
        for desc in doc.entity_descriptions:
            parts.append(f" {ENTITY_SEP} {desc.casefold()}")
    return "".join(parts).strip()


def assemble_author_input(doc: Document, config: AssemblyConfig = AssemblyConfig()) -> str:
    """Author-encoder input: display name, then bio behind a separator.

    Empty components are dropped without leaving a dangling separator; with
    ``use_author`` off the input is empty.
    """
    if not config.use_author:
        return ""
    parts = []
    if doc.author.name:
        parts.append(doc.author.name.casefold())
    if doc.author.bio:
        parts.append(f"{BIO_SEP} {doc.author.bio.casefold()}")
    return " ".join(parts)
