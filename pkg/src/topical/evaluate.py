"""Evaluation harness: ranking quality, chatter leakage, constraint violations.

Per-topic average precision is computed over a full prediction matrix, with
chatter documents (empty gold label set) acting as negatives everywhere.
Topics with no positive gold document are excluded from the median rather
than scored zero.  Threshold comparisons are strict (``>``) throughout.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .constraints import ConstraintSet
from .errors import DataError
from .topics import TopicSpace

__all__ = [
    "EvalReport",
    "average_precision",
    "median_aps",
    "chatter_count",
    "violation_count",
    "evaluate_predictions",
    "report_to_json",
    "report_to_table",
]


@dataclass(frozen=True)
class EvalReport:
    """Everything one evaluation run produces.

    ``per_topic_ap`` maps topic name to AP for topics with at least one
    positive; ``median_aps`` is their median on a 0-1 scale; ``chatter_count``
    is the number of (chatter document, topic) scores strictly above
    ``threshold``; ``violations`` holds inclusion/exclusion counts at the
    same threshold.
    """

    per_topic_ap: dict[str, float]
    median_aps: float
    chatter_count: int
    threshold: float
    violations: dict[str, int]


def average_precision(scores, labels) -> float:
    """AP of one topic's ranking: mean of precision@k over positive ranks.

    Ties are broken by original index (ascending), which keeps the metric
    deterministic under score ties.
    """
    score_arr = np.asarray(scores, dtype=np.float64)
    label_arr = np.asarray(labels, dtype=np.float64)
    if score_arr.shape != label_arr.shape or score_arr.ndim != 1:
        raise DataError(
            f"scores and labels must be equal-length 1-D sequences, "
            f"got shapes {score_arr.shape} and {label_arr.shape}"
        )
    n_pos = int(label_arr.sum())
    if n_pos == 0:
        raise DataError("average precision is undefined without a positive label")
    order = np.lexsort((np.arange(score_arr.size), -score_arr))
    ranked = label_arr[order]
    cumulative = np.cumsum(ranked)
    positives = np.flatnonzero(ranked)
    precision_at_hit = cumulative[positives] / (positives + 1)
    return float(precision_at_hit.mean())


def median_aps(values: Iterable[float]) -> float:
    """Median of per-topic APs (even count: mean of the two middle values)."""
    values = list(values)
    if not values:
        raise DataError("median over an empty AP list is undefined")
    return float(statistics.median(values))


def _check_threshold(threshold: float) -> float:
    if not 0.0 < threshold < 1.0:
        raise DataError(f"threshold must be in (0, 1), got {threshold}")
    return float(threshold)


def _prediction_matrix(predictions) -> np.ndarray:
    arr = np.asarray(predictions, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DataError(f"predictions must be a 2-D matrix, got shape {arr.shape}")
    return arr


def chatter_count(predictions, threshold: float) -> int:
    """Number of prediction entries strictly above ``threshold``."""
    t = _check_threshold(threshold)
    arr = _prediction_matrix(predictions)
    return int((arr > t).sum())


def violation_count(
    predictions, constraints: ConstraintSet, threshold: float
) -> dict[str, int]:
    """Constraint violations at a threshold, summed over documents.

    An inclusion (broader b, narrower n) is violated when the narrower
    topic fires (> t) while the broader one does not (<= t); an exclusion
    is violated when both sides fire.
    """
    t = _check_threshold(threshold)
    arr = _prediction_matrix(predictions)
    if constraints.max_index() >= arr.shape[1]:
        raise DataError(
            f"constraint references topic index {constraints.max_index()}, "
            f"but predictions have {arr.shape[1]} columns"
        )
    inclusion = 0
    if constraints.inclusions:
        broader = np.array([p for p, _ in constraints.inclusions])
        narrower = np.array([c for _, c in constraints.inclusions])
        inclusion = int(((arr[:, narrower] > t) & (arr[:, broader] <= t)).sum())
    exclusion = 0
    if constraints.exclusions:
        left = np.array([a for a, _ in constraints.exclusions])
        right = np.array([b for _, b in constraints.exclusions])
        exclusion = int(((arr[:, left] > t) & (arr[:, right] > t)).sum())
    return {"inclusion": inclusion, "exclusion": exclusion}


def evaluate_predictions(
    predictions,
    labels,
    space: TopicSpace,
    constraints: Optional[ConstraintSet] = None,
    threshold: float = 0.9,
) -> EvalReport:
    """Full report over a prediction matrix and gold multi-hot labels.

    Rows whose gold label set is empty are the chatter documents; only
    their entries feed ``chatter_count``.  Every row (chatter included)
    participates in per-topic AP as negatives.
    """
    t = _check_threshold(threshold)
    preds = _prediction_matrix(predictions)
    gold = np.asarray(labels, dtype=np.float64)
    if gold.ndim == 1:
        gold = gold.reshape(1, -1)
    if gold.shape != preds.shape:
        raise DataError(
            f"predictions {preds.shape} and labels {gold.shape} differ in shape"
        )
    if preds.shape[1] != len(space):
        raise DataError(
            f"predictions have {preds.shape[1]} columns, topic space has {len(space)}"
        )

    per_topic: dict[str, float] = {}
    for i, name in enumerate(space.names):
        if gold[:, i].sum() == 0:
            continue
        per_topic[name] = average_precision(preds[:, i], gold[:, i])
    if not per_topic:
        raise DataError("no topic has a positive gold label; nothing to evaluate")

    chatter_rows = gold.sum(axis=1) == 0
    chatter = chatter_count(preds[chatter_rows], t) if chatter_rows.any() else 0

    if constraints is None or len(constraints) == 0:
        violations = {"inclusion": 0, "exclusion": 0}
    else:
        violations = violation_count(preds, constraints, t)

    return EvalReport(
        per_topic_ap=per_topic,
        median_aps=median_aps(per_topic.values()),
        chatter_count=chatter,
        threshold=t,
        violations=violations,
    )


def report_to_json(report: EvalReport) -> str:
    """Serialize a report as a deterministic JSON object document."""
    payload = {
        "median_aps": report.median_aps,
        "chatter_count": report.chatter_count,
        "threshold": report.threshold,
        "violations": report.violations,
        "per_topic_ap": report.per_topic_ap,
        "topics_scored": len(report.per_topic_ap),
    }
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2)


def report_to_table(report: EvalReport) -> str:
    """Flat ``topic<TAB>ap`` table, one line per scored topic, for diffing."""
    lines = ["topic\tap"]
    lines += [f"{name}\t{ap:.6f}" for name, ap in report.per_topic_ap.items()]
    return "\n".join(lines) + "\n"
