"""Feedforward binary classifier trained from scratch: He init, ReLU hidden
layers with inverted dropout, sigmoid output, binary cross-entropy loss,
backpropagation and Adam updates. All training math is float64.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

BCE_EPS = 1e-7


@dataclass
class MlpModel:
    layer_dims: list[int]
    weights: list[np.ndarray]  # weights[l] has shape (dims[l], dims[l+1])
    biases: list[np.ndarray]
    activations: list[str]  # per layer: "relu" ... "sigmoid"

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def param_count(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def copy(self) -> "MlpModel":
        return MlpModel(
            layer_dims=list(self.layer_dims),
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            activations=list(self.activations),
        )


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 5
    batch_size: int = 64
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    dropout_rate: float = 0.2
    early_stop_patience: int | None = None
    validation_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not (0.0 <= self.dropout_rate < 1.0):
            raise ValueError("dropout_rate must be in [0, 1)")


@dataclass
class AdamState:
    mw: list[np.ndarray]
    vw: list[np.ndarray]
    mb: list[np.ndarray]
    vb: list[np.ndarray]
    step: int = 0

    @classmethod
    def zeros_like(cls, model: MlpModel) -> "AdamState":
        return cls(
            mw=[np.zeros_like(w) for w in model.weights],
            vw=[np.zeros_like(w) for w in model.weights],
            mb=[np.zeros_like(b) for b in model.biases],
            vb=[np.zeros_like(b) for b in model.biases],
        )


def init_weights(layer_dims: list[int], seed: int = 0) -> MlpModel:
    """He initialization: normal(0, sqrt(2/fan_in)) weights, zero biases."""
    if len(layer_dims) < 2 or any(d < 1 for d in layer_dims):
        raise ValueError("layer_dims needs >= 2 positive entries")
    rng = np.random.default_rng(seed)
    weights = []
    biases = []
    for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
        weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out, dtype=np.float64))
    activations = ["relu"] * (len(layer_dims) - 2) + ["sigmoid"]
    return MlpModel(
        layer_dims=list(layer_dims),
        weights=weights,
        biases=biases,
        activations=activations,
    )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class ForwardCache:
    x: np.ndarray  # (batch, d_in)
    zs: list[np.ndarray]  # pre-activations per layer
    acts: list[np.ndarray]  # post-activation (and post-dropout) per layer
    masks: list[np.ndarray | None]  # dropout keep-masks already scaled by 1/(1-r)


def forward_batch(
    model: MlpModel,
    x: np.ndarray,
    dropout_rate: float = 0.0,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, ForwardCache]:
    """Probabilities for a (batch, d_in) matrix plus the cache backward needs.

    Inverted dropout: hidden activations are masked and divided by (1-rate)
    during training; inference (rate 0) applies no mask and no scaling.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] != model.layer_dims[0]:
        raise ValueError(
            f"input dim {x.shape[1]} != model input {model.layer_dims[0]}"
        )
    if dropout_rate > 0.0 and rng is None:
        raise ValueError("dropout requires an RNG")
    a = x
    zs, acts, masks = [], [], []
    last = model.n_layers - 1
    for l in range(model.n_layers):
        z = a @ model.weights[l] + model.biases[l]
        zs.append(z)
        if model.activations[l] == "relu":
            a = np.maximum(z, 0.0)
        elif model.activations[l] == "sigmoid":
            a = _sigmoid(z)
        else:
            raise ValueError(f"unknown activation {model.activations[l]!r}")
        if l != last and dropout_rate > 0.0:
            mask = (rng.random(a.shape) >= dropout_rate) / (1.0 - dropout_rate)
            a = a * mask
            masks.append(mask)
        else:
            masks.append(None)
        if l == last:
            # sigmoid underflows to exact 0/1 in float64 for |z| > ~745;
            # keep probabilities strictly inside (0,1)
            a = np.clip(a, 1e-12, 1.0 - 1e-12)
        acts.append(a)
    probs = acts[-1][:, 0]
    return probs, ForwardCache(x=x, zs=zs, acts=acts, masks=masks)


def forward(
    model: MlpModel,
    x: np.ndarray,
    dropout_rate: float = 0.0,
    rng: np.random.Generator | None = None,
) -> tuple[float, ForwardCache]:
    """Single-sample probability in (0,1) plus cache."""
    probs, cache = forward_batch(model, x, dropout_rate, rng)
    return float(probs[0]), cache


def bce_loss(p, y):
    """Binary cross-entropy with probabilities clamped to [eps, 1-eps].

    Elementwise over arrays; scalar in, scalar out.
    """
    p_arr = np.clip(np.asarray(p, dtype=np.float64), BCE_EPS, 1.0 - BCE_EPS)
    y_arr = np.asarray(y, dtype=np.float64)
    loss = -(y_arr * np.log(p_arr) + (1.0 - y_arr) * np.log(1.0 - p_arr))
    return float(loss) if np.isscalar(p) or loss.ndim == 0 else loss


@dataclass
class Gradients:
    dw: list[np.ndarray]
    db: list[np.ndarray]


def backward(model: MlpModel, cache: ForwardCache, y: np.ndarray) -> Gradients:
    """Gradients of mean BCE over the cached batch.

    Sigmoid + BCE collapse: the output-layer pre-activation delta is
    (p - y) / batch.
    """
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    batch = cache.x.shape[0]
    if y.shape[0] != batch:
        raise ValueError("labels do not match cached batch size")
    if len(cache.zs) != model.n_layers:
        raise ValueError("cache does not match model depth")
    probs = cache.acts[-1]
    delta = (probs - y[:, None]) / batch
    dw = [None] * model.n_layers
    db = [None] * model.n_layers
    for l in range(model.n_layers - 1, -1, -1):
        a_prev = cache.acts[l - 1] if l > 0 else cache.x
        dw[l] = a_prev.T @ delta
        db[l] = delta.sum(axis=0)
        if l > 0:
            delta = delta @ model.weights[l].T
            if cache.masks[l - 1] is not None:
                delta = delta * cache.masks[l - 1]
            delta = delta * (cache.zs[l - 1] > 0.0)  # ReLU derivative
    return Gradients(dw=dw, db=db)


def adam_step(
    model: MlpModel, grads: Gradients, state: AdamState, cfg: TrainConfig
) -> tuple[MlpModel, AdamState]:
    """One bias-corrected Adam update, in place."""
    for g in grads.dw + grads.db:
        if not np.all(np.isfinite(g)):
            raise ValueError("non-finite gradient")
    state.step += 1
    t = state.step
    bc1 = 1.0 - cfg.beta1**t
    bc2 = 1.0 - cfg.beta2**t
    for l in range(model.n_layers):
        state.mw[l] = cfg.beta1 * state.mw[l] + (1.0 - cfg.beta1) * grads.dw[l]
        state.vw[l] = cfg.beta2 * state.vw[l] + (1.0 - cfg.beta2) * grads.dw[l] ** 2
        state.mb[l] = cfg.beta1 * state.mb[l] + (1.0 - cfg.beta1) * grads.db[l]
        state.vb[l] = cfg.beta2 * state.vb[l] + (1.0 - cfg.beta2) * grads.db[l] ** 2
        model.weights[l] -= (
            cfg.learning_rate * (state.mw[l] / bc1) / (np.sqrt(state.vw[l] / bc2) + cfg.epsilon)
        )
        model.biases[l] -= (
            cfg.learning_rate * (state.mb[l] / bc1) / (np.sqrt(state.vb[l] / bc2) + cfg.epsilon)
        )
    return model, state


def train(
    model: MlpModel,
    features: np.ndarray,
    labels: np.ndarray,
    cfg: TrainConfig,
) -> tuple[MlpModel, list[float]]:
    """Mini-batch Adam training; returns the model and per-epoch mean loss.

    Shuffles every epoch, deterministic by cfg.seed. With early_stop_patience
    set, a validation_fraction holdout is carved out up front and the
    best-validation parameters are restored at the end.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    n = features.shape[0]
    if n == 0:
        raise ValueError("empty training set")
    if not np.all((labels == 0) | (labels == 1)):
        raise ValueError("labels must be 0/1")

    rng = np.random.default_rng(cfg.seed)
    val_x = val_y = None
    if cfg.early_stop_patience is not None:
        n_val = max(1, int(round(cfg.validation_fraction * n)))
        if n_val >= n:
            raise ValueError("validation holdout would consume the whole set")
        perm = rng.permutation(n)
        val_idx, tr_idx = perm[:n_val], perm[n_val:]
        val_x, val_y = features[val_idx], labels[val_idx]
        features, labels = features[tr_idx], labels[tr_idx]
        n = features.shape[0]

    state = AdamState.zeros_like(model)
    history: list[float] = []
    best_val = np.inf
    best_params: MlpModel | None = None
    stale = 0

    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            xb, yb = features[idx], labels[idx]
            probs, cache = forward_batch(model, xb, cfg.dropout_rate, rng)
            epoch_loss += float(np.sum(bce_loss(probs, yb)))
            grads = backward(model, cache, yb)
            model, state = adam_step(model, grads, state, cfg)
        history.append(epoch_loss / n)

        if cfg.early_stop_patience is not None:
            val_probs, _ = forward_batch(model, val_x)
            val_loss = float(np.mean(bce_loss(val_probs, val_y)))
            if val_loss < best_val:
                best_val = val_loss
                best_params = model.copy()
                stale = 0
            else:
                stale += 1
                if stale > cfg.early_stop_patience:
                    log.info("early stop after epoch %d (val %.6f)", epoch + 1, best_val)
                    break

    if best_params is not None:
        model = best_params
    return model, history


def predict_proba(model: MlpModel, x: np.ndarray) -> float:
    """Inference-mode probability for one feature vector."""
    p, _ = forward(model, x)
    return p


def predict_proba_batch(model: MlpModel, x: np.ndarray) -> np.ndarray:
    probs, _ = forward_batch(model, x)
    return probs
