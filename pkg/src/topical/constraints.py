"""Label constraints between topic pairs.

Two constraint types are supported, each encoded as a fixed 2x2 potential
matrix over the binary activity variables of the pair:

* broader-topic inclusion (narrower topic active implies broader active),
* topic-pair exclusion (at most one of the two active).

Constraints are declared over topic indices; the text file format resolves
topic names (which may contain spaces) against a :class:`TopicSpace`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .topics import TopicSpace

__all__ = [
    "ConstraintSet",
    "inclusion_potential",
    "exclusion_potential",
    "parse_constraints",
    "load_constraint_file",
]


def inclusion_potential() -> np.ndarray:
    """Potential for broader-topic inclusion; rows index the broader topic."""
    return np.array([[0.5, 0.0], [0.5, 10.0]])


def exclusion_potential() -> np.ndarray:
    """Potential for topic-pair exclusion; zero weight on both active."""
    return np.array([[0.5, 0.5], [0.5, 0.0]])


@dataclass(frozen=True)
class ConstraintSet:
    """Inclusion pairs (broader, narrower) and unordered exclusion pairs."""

    inclusions: tuple[tuple[int, int], ...] = field(default=())
    exclusions: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(
            self, "inclusions", tuple((int(p), int(c)) for p, c in self.inclusions)
        )
        object.__setattr__(
            self, "exclusions", tuple((int(a), int(b)) for a, b in self.exclusions)
        )
        seen_inc: set[tuple[int, int]] = set()
        for p, c in self.inclusions:
            if p == c:
                raise DataError(f"inclusion pair with identical topics: ({p}, {c})")
            if min(p, c) < 0:
                raise DataError(f"negative topic index in inclusion ({p}, {c})")
            if (p, c) in seen_inc:
                raise DataError(f"duplicate inclusion constraint: ({p}, {c})")
            seen_inc.add((p, c))
        inc_pairs = {frozenset(pc) for pc in seen_inc}
        seen_exc: set[frozenset] = set()
        for a, b in self.exclusions:
            if a == b:
                raise DataError(f"exclusion pair with identical topics: ({a}, {b})")
            if min(a, b) < 0:
                raise DataError(f"negative topic index in exclusion ({a}, {b})")
            key = frozenset((a, b))
            if key in seen_exc:
                raise DataError(f"duplicate exclusion constraint: ({a}, {b})")
            if key in inc_pairs:
                raise DataError(
                    f"topics ({a}, {b}) appear in both an inclusion and an "
                    "exclusion constraint; the pair is contradictory"
                )
            seen_exc.add(key)

    def __len__(self) -> int:
        return len(self.inclusions) + len(self.exclusions)

    def constrained_topics(self) -> set[int]:
        topics: set[int] = set()
        for p, c in self.inclusions:
            topics.update((p, c))
        for a, b in self.exclusions:
            topics.update((a, b))
        return topics

    def max_index(self) -> int:
        topics = self.constrained_topics()
        return max(topics) if topics else -1

    def factors(self) -> list[tuple[int, int, np.ndarray]]:
        """(row topic, column topic, potential) triples for graph construction."""
        out = [(p, c, inclusion_potential()) for p, c in self.inclusions]
        out += [(a, b, exclusion_potential()) for a, b in self.exclusions]
        return out


def _resolve_pair(rest: str, space: TopicSpace, where: str) -> tuple[int, int]:
    """Split ``rest`` into two topic names known to ``space``.

    Names may contain spaces, so every split point is tried; the split must
    be unambiguous.
    """
    candidates = []
    for i, ch in enumerate(rest):
        if ch != " ":
            continue
        left, right = rest[:i], rest[i + 1 :]
        if left in space and right in space:
            candidates.append((left, right))
    if not candidates:
        raise DataError(f"{where}: cannot resolve {rest!r} into two known topics")
    if len(candidates) > 1:
        options = "; ".join(f"{l!r} + {r!r}" for l, r in candidates)
        raise DataError(f"{where}: ambiguous topic pair {rest!r} ({options})")
    left, right = candidates[0]
    return space.index[left], space.index[right]


def parse_constraints(lines, space: TopicSpace, source: str = "<constraints>") -> ConstraintSet:
    """Parse ``includes <Broader> <Narrower>`` / ``excludes <A> <B>`` lines."""
    inclusions: list[tuple[int, int]] = []
    exclusions: list[tuple[int, int]] = []
    for lineno, line in enumerate(lines, start=1):
        where = f"{source}:{lineno}"
        stripped = line.strip()
        if stripped == "" or stripped.startswith("#"):
            continue
        keyword, _, rest = stripped.partition(" ")
        rest = rest.strip()
        if keyword == "includes":
            inclusions.append(_resolve_pair(rest, space, where))
        elif keyword == "excludes":
            exclusions.append(_resolve_pair(rest, space, where))
        else:
            raise DataError(
                f"{where}: expected 'includes' or 'excludes', got {keyword!r}"
            )
    return ConstraintSet(tuple(inclusions), tuple(exclusions))


def load_constraint_file(path, space: TopicSpace) -> ConstraintSet:
    with open(path, encoding="utf-8") as f:
        return parse_constraints(f, space, source=str(path))
