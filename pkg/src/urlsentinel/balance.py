"""SMOTE oversampling of the minority class in feature space.

Synthetic points are linear interpolations s = x + lam * (x_nn - x) between a
minority sample and one of its k nearest minority neighbors, lam uniform on
[0, 1). Neighbor search is exact brute force (Euclidean); at desk scale that
is fast enough and keeps the behavior directly verifiable.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SmoteConfig:
    k_neighbors: int = 5
    target_ratio: float = 1.0  # desired minority/majority after resampling
    seed: int = 0

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        if not (0.0 < self.target_ratio <= 1.0):
            raise ValueError("target_ratio must be in (0, 1]")


@dataclass(frozen=True)
class SmoteAuditEntry:
    """Provenance of one synthetic sample, for exact segment verification."""

    base_index: int  # row in the minority matrix
    neighbor_index: int  # row in the minority matrix
    lam: float


def knn_minority(
    x: np.ndarray,
    minority: np.ndarray,
    k: int,
    self_index: int | None = None,
) -> np.ndarray:
    """Indices of the k nearest minority rows to x, excluding x itself.

    Ties break toward the lower index. When self_index is None the first row
    exactly equal to x (if any) is treated as self.
    """
    minority = np.asarray(minority, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    m = minority.shape[0]
    if self_index is None:
        eq = np.nonzero(np.all(minority == x, axis=1))[0]
        self_index = int(eq[0]) if eq.size else -1
    avail = m - (1 if 0 <= self_index < m else 0)
    if avail < k:
        raise ValueError(f"need at least {k} minority samples besides x, have {avail}")
    dist = np.linalg.norm(minority - x, axis=1)
    if 0 <= self_index < m:
        dist[self_index] = np.inf
    order = np.argsort(dist, kind="stable")  # stable sort = lower index wins ties
    return order[:k]


def _neighbor_table(minority: np.ndarray, k: int) -> np.ndarray:
    """k nearest neighbor indices for every minority row (self excluded)."""
    m = minority.shape[0]
    table = np.empty((m, k), dtype=np.int64)
    for i in range(m):
        table[i] = knn_minority(minority[i], minority, k, self_index=i)
    return table


def smote_resample(
    features: np.ndarray,
    labels: np.ndarray,
    cfg: SmoteConfig,
    audit: bool = False,
):
    """Append synthetic minority rows until minority/majority hits target_ratio.

    Returns (features, labels) or, with audit=True, (features, labels, entries)
    where entries record the (base, neighbor, lam) triple behind each synthetic
    row. Originals are returned unchanged and first. Already-balanced input is
    a logged no-op.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if features.shape[0] != labels.shape[0]:
        raise ValueError("features and labels length mismatch")
    counts = {c: int(np.sum(labels == c)) for c in (0, 1)}
    if counts[0] == 0 or counts[1] == 0:
        raise ValueError("SMOTE requires both classes present")

    minority_cls = 0 if counts[0] < counts[1] else 1
    n_min = counts[minority_cls]
    n_maj = counts[1 - minority_cls]
    n_synth = int(round(cfg.target_ratio * n_maj)) - n_min
    if n_synth <= 0:
        log.info(
            "SMOTE no-op: class counts %d/%d already meet target ratio %.3f",
            counts[0], counts[1], cfg.target_ratio,
        )
        return (features, labels, []) if audit else (features, labels)

    if n_min < cfg.k_neighbors + 1:
        raise ValueError(
            f"minority class has {n_min} samples, need > k_neighbors={cfg.k_neighbors}"
        )

    minority = features[labels == minority_cls]
    neighbors = _neighbor_table(minority, cfg.k_neighbors)

    rng = np.random.default_rng(cfg.seed)
    synth = np.empty((n_synth, features.shape[1]), dtype=np.float64)
    entries = []
    for j in range(n_synth):
        base = int(rng.integers(0, n_min))
        pick = int(rng.integers(0, cfg.k_neighbors))
        nn = int(neighbors[base, pick])
        lam = float(rng.random())
        synth[j] = minority[base] + lam * (minority[nn] - minority[base])
        entries.append(SmoteAuditEntry(base_index=base, neighbor_index=nn, lam=lam))

    out_features = np.vstack([features, synth])
    out_labels = np.concatenate(
        [labels, np.full(n_synth, minority_cls, dtype=np.int64)]
    )
    if audit:
        return out_features, out_labels, entries
    return out_features, out_labels
