"""Binary classification evaluation: confusion matrix, threshold metrics,
ROC curve and AUC.

AUC uses the rank (Mann-Whitney) formulation with ties counted one half,
accumulated in exact integer arithmetic so it agrees with the trapezoidal
area under the ROC curve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricsValues:
    accuracy: float
    precision: float
    recall: float
    f1: float
    degenerate: frozenset[str] = frozenset()


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    roc_auc: float
    confusion: ConfusionMatrix
    threshold: float
    degenerate: frozenset[str] = frozenset()

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "roc_auc": self.roc_auc,
            "threshold": self.threshold,
            "confusion": {
                "tp": self.confusion.tp,
                "tn": self.confusion.tn,
                "fp": self.confusion.fp,
                "fn": self.confusion.fn,
            },
            "degenerate": sorted(self.degenerate),
        }

    def to_text(self) -> str:
        lines = [
            f"accuracy: {self.accuracy:.6f}",
            f"precision: {self.precision:.6f}",
            f"recall: {self.recall:.6f}",
            f"f1: {self.f1:.6f}",
            f"roc_auc: {self.roc_auc:.6f}",
            f"threshold: {self.threshold}",
            f"tp: {self.confusion.tp}",
            f"tn: {self.confusion.tn}",
            f"fp: {self.confusion.fp}",
            f"fn: {self.confusion.fn}",
        ]
        if self.degenerate:
            lines.append("degenerate: " + ",".join(sorted(self.degenerate)))
        return "\n".join(lines)


def confusion_at_threshold(
    scores, labels, threshold: float = 0.5
) -> ConfusionMatrix:
    """Counts with predicted-positive iff score >= threshold."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels must have the same length")
    if scores.size == 0:
        raise ValueError("cannot evaluate an empty sample")
    pred = scores >= threshold
    pos = labels == 1
    return ConfusionMatrix(
        tp=int(np.sum(pred & pos)),
        tn=int(np.sum(~pred & ~pos)),
        fp=int(np.sum(pred & ~pos)),
        fn=int(np.sum(~pred & pos)),
    )


def classification_metrics(cm: ConfusionMatrix) -> MetricsValues:
    """Accuracy, precision, recall, F1 from counts.

    A zero denominator yields 0 for that metric and flags it as degenerate
    instead of raising, so batch evaluation never aborts.
    """
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    degenerate = set()
    accuracy = (cm.tp + cm.tn) / cm.total
    if cm.tp + cm.fp > 0:
        precision = cm.tp / (cm.tp + cm.fp)
    else:
        precision = 0.0
        degenerate.add("precision")
    if cm.tp + cm.fn > 0:
        recall = cm.tp / (cm.tp + cm.fn)
    else:
        recall = 0.0
        degenerate.add("recall")
    if precision + recall > 0:
        f1 = 2.0 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
        degenerate.add("f1")
    return MetricsValues(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        degenerate=frozenset(degenerate),
    )


def _score_groups(scores: np.ndarray, labels: np.ndarray):
    """Distinct scores in descending order with per-group (pos, neg) counts."""
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    boundaries = np.nonzero(np.diff(s))[0] + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [len(s)]])
    for a, b in zip(starts, ends):
        seg = y[a:b]
        p = int(np.sum(seg == 1))
        yield p, (b - a) - p


def roc_auc(scores, labels) -> float:
    """Probability a random positive outranks a random negative, ties half.

    Computed from integer pair counts (O(n log n) after sorting) so the value
    matches the trapezoidal area under roc_curve.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n_pos = int(np.sum(labels == 1))
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("roc_auc requires both classes present")
    # descending over distinct scores: positives in a group beat every
    # negative with a strictly lower score and tie the group's negatives
    wins2 = 0  # doubled pair count so ties stay integral
    neg_seen = 0
    for p, q in _score_groups(scores, labels):
        wins2 += 2 * p * (n_neg - neg_seen - q) + p * q
        neg_seen += q
    return wins2 / (2 * n_pos * n_neg)


def roc_curve(scores, labels) -> list[tuple[float, float]]:
    """(fpr, tpr) points, one per distinct threshold, from (0,0) to (1,1)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n_pos = int(np.sum(labels == 1))
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("roc_curve requires both classes present")
    points = [(0.0, 0.0)]
    tp = fp = 0
    for p, q in _score_groups(scores, labels):
        tp += p
        fp += q
        points.append((fp / n_neg, tp / n_pos))
    return points


def evaluate(scores, labels, threshold: float = 0.5) -> MetricsReport:
    """Full report at a threshold: confusion counts, rates and ROC-AUC."""
    cm = confusion_at_threshold(scores, labels, threshold)
    vals = classification_metrics(cm)
    return MetricsReport(
        accuracy=vals.accuracy,
        precision=vals.precision,
        recall=vals.recall,
        f1=vals.f1,
        roc_auc=roc_auc(scores, labels),
        confusion=cm,
        threshold=threshold,
        degenerate=vals.degenerate,
    )
