"""Isolation Forest: random-partition trees for anomaly scoring and
training-set outlier filtering.

Each tree grows on an independent uniform subsample (size psi) with recursive
random (feature, threshold) splits until node size 1 or the depth limit
ceil(log2 psi). Scores follow s(x) = 2^(-E[h(x)] / c(psi)) where h adds the
average-path correction c(leaf size) at the leaf and c(n) = 2 H(n-1) - 2(n-1)/n
with H(i) = ln(i) + Euler-Mascheroni gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.5772156649


@dataclass(frozen=True)
class IsoLeaf:
    size: int


@dataclass(frozen=True)
class IsoSplit:
    feature: int
    value: float
    left: "IsoLeaf | IsoSplit"
    right: "IsoLeaf | IsoSplit"


IsoNode = IsoLeaf | IsoSplit


@dataclass
class IsolationForestModel:
    trees: list[IsoNode]
    psi: int  # requested subsample size
    sample_size: int  # effective subsample size actually used
    n_features: int
    seed: int


@dataclass(frozen=True)
class AnomalyConfig:
    contamination: float = 0.05

    def __post_init__(self):
        if not (0.0 <= self.contamination < 0.5):
            raise ValueError("contamination must be in [0, 0.5)")


def avg_path_c(n: int) -> float:
    """Expected unsuccessful-BST search path length; normalizes isolation depth."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return 0.0
    return 2.0 * (math.log(n - 1) + EULER_GAMMA) - 2.0 * (n - 1) / n


def _grow(
    data: np.ndarray, rows: np.ndarray, depth: int, limit: int, rng: np.random.Generator
) -> IsoNode:
    if rows.size <= 1 or depth >= limit:
        return IsoLeaf(size=int(rows.size))
    sub = data[rows]
    lo = sub.min(axis=0)
    hi = sub.max(axis=0)
    candidates = np.nonzero(hi > lo)[0]
    if candidates.size == 0:
        return IsoLeaf(size=int(rows.size))  # all points identical on every axis
    feature = int(candidates[int(rng.integers(0, candidates.size))])
    f_lo, f_hi = float(lo[feature]), float(hi[feature])
    value = f_lo + rng.random() * (f_hi - f_lo)
    while not (f_lo < value < f_hi):  # keep split strictly inside the range
        value = f_lo + rng.random() * (f_hi - f_lo)
    mask = sub[:, feature] < value
    return IsoSplit(
        feature=feature,
        value=float(value),
        left=_grow(data, rows[mask], depth + 1, limit, rng),
        right=_grow(data, rows[~mask], depth + 1, limit, rng),
    )


def fit_forest(
    features: np.ndarray, t: int = 100, psi: int = 256, seed: int = 0
) -> IsolationForestModel:
    """Grow t isolation trees on independent subsamples of size min(psi, n).

    Per-tree RNG streams derive from (seed, tree index) so serial and
    parallel fits produce the identical forest.
    """
    features = np.asarray(features, dtype=np.float64)
    n = features.shape[0]
    if t < 1 or psi < 2:
        raise ValueError("need t >= 1 and psi >= 2")
    if n < 2:
        raise ValueError("need at least 2 samples to fit a forest")
    sample_size = min(psi, n)
    limit = math.ceil(math.log2(psi))
    trees = []
    for i in range(t):
        rng = np.random.default_rng([seed, i])
        rows = rng.choice(n, size=sample_size, replace=False)
        trees.append(_grow(features, rows, 0, limit, rng))
    return IsolationForestModel(
        trees=trees,
        psi=psi,
        sample_size=sample_size,
        n_features=features.shape[1],
        seed=seed,
    )


def path_length(x: np.ndarray, tree: IsoNode) -> float:
    """Isolation depth of x in one tree, with c(size) added at the leaf."""
    x = np.asarray(x, dtype=np.float64)
    depth = 0
    node = tree
    while isinstance(node, IsoSplit):
        if node.feature >= x.shape[0]:
            raise ValueError(
                f"tree splits on feature {node.feature}, input has {x.shape[0]}"
            )
        node = node.left if x[node.feature] < node.value else node.right
        depth += 1
    return depth + (avg_path_c(node.size) if node.size >= 1 else 0.0)


def _route_depths(data: np.ndarray, node: IsoNode, rows: np.ndarray, depth: int, out: np.ndarray):
    if isinstance(node, IsoLeaf):
        out[rows] = depth + (avg_path_c(node.size) if node.size >= 1 else 0.0)
        return
    mask = data[rows, node.feature] < node.value
    left_rows = rows[mask]
    right_rows = rows[~mask]
    if left_rows.size:
        _route_depths(data, node.left, left_rows, depth + 1, out)
    if right_rows.size:
        _route_depths(data, node.right, right_rows, depth + 1, out)


def score_batch(features: np.ndarray, model: IsolationForestModel) -> np.ndarray:
    """Anomaly scores for a matrix of samples; identical to per-point scoring."""
    features = np.asarray(features, dtype=np.float64)
    if features.shape[1] != model.n_features:
        raise ValueError(
            f"model fitted on {model.n_features} features, got {features.shape[1]}"
        )
    n = features.shape[0]
    total = np.zeros(n, dtype=np.float64)
    depths = np.empty(n, dtype=np.float64)
    all_rows = np.arange(n)
    for tree in model.trees:
        _route_depths(features, tree, all_rows, 0, depths)
        total += depths
    mean_depth = total / len(model.trees)
    return np.exp2(-mean_depth / avg_path_c(model.sample_size))


def anomaly_score(x: np.ndarray, model: IsolationForestModel) -> float:
    """s(x) = 2^(-E[h(x)]/c(psi)); 0.5 exactly when E[h] equals c(psi)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != model.n_features:
        raise ValueError(
            f"model fitted on {model.n_features} features, got {x.shape[0]}"
        )
    mean_depth = sum(path_length(x, t) for t in model.trees) / len(model.trees)
    return float(np.exp2(-mean_depth / avg_path_c(model.sample_size)))


def filter_outliers(
    features: np.ndarray,
    labels: np.ndarray,
    model: IsolationForestModel,
    cfg: AnomalyConfig,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Drop the ceil(contamination * n) highest-scoring samples.

    Returns (kept_features, kept_labels, removed_indices); removal order is
    score-descending with lower index first among ties. Evaluation data must
    never pass through here - the filter is for training sets only.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels)
    n = features.shape[0]
    if labels.shape[0] != n:
        raise ValueError("features and labels length mismatch")
    m = math.ceil(cfg.contamination * n)
    if m == 0:
        return features, labels, np.empty(0, dtype=np.int64)
    scores = score_batch(features, model)
    # lexsort: primary key -scores, ties resolved by ascending index
    order = np.lexsort((np.arange(n), -scores))
    removed = order[:m].astype(np.int64)
    keep_mask = np.ones(n, dtype=bool)
    keep_mask[removed] = False
    return features[keep_mask], labels[keep_mask], removed
