"""End-to-end orchestration: training, evaluation, single/batch prediction
and the complexity benchmark harness.

Stage order is fixed: split -> featurize (scaler fit on train only) ->
SMOTE(train) -> isolation-forest filter(train) -> train network -> evaluate
on the untouched test split. Test data never passes through SMOTE or the
outlier filter.
"""

from __future__ import annotations

import logging
import os
import platform
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone

import numpy as np

from . import anomaly, balance, ingest, metrics, neuralnet
from .errors import DegenerateInputError, PipelineStageError
from .features import (
    DEFAULT_MAX_LEN,
    FeatureScaler,
    StatFeatures,
    VectorizerConfig,
    feature_dim,
    featurize,
    featurize_all,
    fit_scaler,
    fnv1a_32,
    ngram_count,
    normalize_url,
    stat_features,
)
from .model_store import ModelBundle

log = logging.getLogger(__name__)


def derive_seed(master: int, tag: str) -> int:
    """Stable per-component seed from the master seed and a component tag."""
    return fnv1a_32(f"{master}:{tag}".encode("utf-8"))


@dataclass(frozen=True)
class PipelineConfig:
    vectorizer: VectorizerConfig = field(default_factory=VectorizerConfig)
    smote: balance.SmoteConfig = field(default_factory=balance.SmoteConfig)
    anomaly: anomaly.AnomalyConfig = field(default_factory=anomaly.AnomalyConfig)
    train: neuralnet.TrainConfig = field(default_factory=neuralnet.TrainConfig)
    split: ingest.SplitConfig = field(default_factory=ingest.SplitConfig)
    forest_trees: int = 100
    forest_psi: int = 256
    hidden_dims: tuple[int, ...] = (512, 256)
    seed: int = 0

    def resolve_seeds(self) -> "PipelineConfig":
        """Fill every component seed from the master seed."""
        return replace(
            self,
            smote=replace(self.smote, seed=derive_seed(self.seed, "smote")),
            train=replace(self.train, seed=derive_seed(self.seed, "train")),
            split=replace(self.split, seed=derive_seed(self.seed, "split")),
        )

    @property
    def forest_seed(self) -> int:
        return derive_seed(self.seed, "forest")

    @property
    def init_seed(self) -> int:
        return derive_seed(self.seed, "init")

    def to_dict(self) -> dict:
        d = {
            "vectorizer": asdict(self.vectorizer),
            "smote": asdict(self.smote),
            "anomaly": asdict(self.anomaly),
            "train": asdict(self.train),
            "split": asdict(self.split),
            "forest_trees": self.forest_trees,
            "forest_psi": self.forest_psi,
            "hidden_dims": list(self.hidden_dims),
            "seed": self.seed,
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        kwargs = {}
        if "vectorizer" in d:
            kwargs["vectorizer"] = VectorizerConfig(**d["vectorizer"])
        if "smote" in d:
            kwargs["smote"] = balance.SmoteConfig(**d["smote"])
        if "anomaly" in d:
            kwargs["anomaly"] = anomaly.AnomalyConfig(**d["anomaly"])
        if "train" in d:
            kwargs["train"] = neuralnet.TrainConfig(**d["train"])
        if "split" in d:
            kwargs["split"] = ingest.SplitConfig(**d["split"])
        for key in ("forest_trees", "forest_psi", "seed"):
            if key in d:
                kwargs[key] = d[key]
        if "hidden_dims" in d:
            kwargs["hidden_dims"] = tuple(d["hidden_dims"])
        return cls(**kwargs)


@dataclass(frozen=True)
class PredictionResult:
    url: str
    label: str  # "benign" | "malicious"
    score: float
    stat_features: StatFeatures
    latency_us: float

    def to_dict(self) -> dict:
        return {
            "url": self.url,
            "label": self.label,
            "score": self.score,
            "stat_features": {
                "length": self.stat_features.length,
                "dot_count": self.stat_features.dot_count,
                "slash_count": self.stat_features.slash_count,
                "entropy": self.stat_features.entropy,
            },
            "latency_us": self.latency_us,
        }


@contextmanager
def _stage(name: str):
    """Tag failures inside a pipeline stage with the stage name."""
    log.debug("stage %s start", name)
    try:
        yield
    except PipelineStageError:
        raise
    except Exception as exc:
        raise PipelineStageError(name, exc) from exc


def _normalize_records(records: list[ingest.LabeledUrl]) -> tuple[list[str], np.ndarray]:
    urls = [normalize_url(r.url) for r in records]
    labels = np.array([r.label for r in records], dtype=np.int64)
    return urls, labels


def train_pipeline(
    dataset: ingest.Dataset,
    cfg: PipelineConfig,
    created_at: str | None = None,
) -> tuple[ModelBundle, metrics.MetricsReport]:
    """Train the full hybrid pipeline and evaluate on the held-out split.

    created_at defaults to the current UTC time; pass a fixed value when
    byte-identical bundles across runs are required.
    """
    cfg = cfg.resolve_seeds()
    benign_n, malicious_n = dataset.class_counts()
    if benign_n == 0 or malicious_n == 0:
        raise PipelineStageError("split", ValueError("dataset needs both classes"))

    with _stage("split"):
        train_ds, test_ds = ingest.stratified_split(dataset, cfg.split)

    with _stage("featurize"):
        train_urls, train_labels = _normalize_records(train_ds.records)
        test_urls, test_labels = _normalize_records(test_ds.records)
        scaler = fit_scaler([stat_features(u) for u in train_urls])
        x_train = featurize_all(train_urls, cfg.vectorizer, scaler)
        x_test = featurize_all(test_urls, cfg.vectorizer, scaler)

    with _stage("smote"):
        x_train, y_train = balance.smote_resample(x_train, train_labels, cfg.smote)

    with _stage("anomaly"):
        forest = anomaly.fit_forest(
            x_train, t=cfg.forest_trees, psi=cfg.forest_psi, seed=cfg.forest_seed
        )
        x_train, y_train, removed = anomaly.filter_outliers(
            x_train, y_train, forest, cfg.anomaly
        )
        log.info("outlier filter removed %d training samples", len(removed))

    with _stage("train"):
        dims = [feature_dim(cfg.vectorizer), *cfg.hidden_dims, 1]
        model = neuralnet.init_weights(dims, seed=cfg.init_seed)
        model, history = neuralnet.train(model, x_train, y_train, cfg.train)

    with _stage("evaluate"):
        scores = neuralnet.predict_proba_batch(model, x_test)
        report = metrics.evaluate(scores, test_labels)

    if created_at is None:
        created_at = datetime.now(timezone.utc).isoformat()
    sources = sorted({r.source for r in dataset.records})
    bundle = ModelBundle(
        vectorizer=cfg.vectorizer,
        scaler=scaler,
        network=model,
        forest=forest,
        metadata={
            "created_at": created_at,
            "model_version": f"usnl1-{cfg.seed:08x}",
            "corpus": {
                "records": len(dataset),
                "benign": benign_n,
                "malicious": malicious_n,
                "sources": sources,
            },
            "metrics": report.to_dict(),
            "seed": cfg.seed,
            "loss_history": history,
        },
    )
    return bundle, report


def classify_url(raw: str, bundle: ModelBundle) -> PredictionResult:
    """Normalize, featurize with the stored scaler, and score one URL.

    Raises DegenerateInputError with a display-ready message for empty or
    unusable input.
    """
    t0 = time.perf_counter()
    if not raw or not raw.strip():
        raise DegenerateInputError("URL is empty")
    url = normalize_url(raw)
    stats = stat_features(url)
    vec = featurize(url, bundle.vectorizer, bundle.scaler)
    score = neuralnet.predict_proba(bundle.network, vec)
    latency_us = (time.perf_counter() - t0) * 1e6
    return PredictionResult(
        url=raw,
        label="malicious" if score >= 0.5 else "benign",
        score=score,
        stat_features=stats,
        latency_us=latency_us,
    )


@dataclass
class BatchResult:
    results: list[PredictionResult]
    line_errors: list[tuple[int, str]]  # (1-based line number, message)


def classify_batch(path: str, bundle: ModelBundle) -> BatchResult:
    """Classify every line of a file; failures are recorded, not fatal."""
    results = []
    errors = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            raw = line.strip()
            if not raw:
                errors.append((lineno, "blank line"))
                continue
            try:
                results.append(classify_url(raw, bundle))
            except DegenerateInputError as exc:
                errors.append((lineno, str(exc)))
    return BatchResult(results=results, line_errors=errors)


@dataclass
class BenchReport:
    params: dict[str, float]  # N, L, d, k, E, B, h, M, t
    stage_seconds: dict[str, float]
    ops_per_second: dict[str, float]
    prediction_ms: dict[str, float]  # p50/p95 latency, full and half corpus
    scaling: dict[str, float]
    hardware: str

    def to_dict(self) -> dict:
        return asdict(self)

    def to_text(self) -> str:
        lines = ["== parameters =="]
        lines += [f"{k}: {v}" for k, v in self.params.items()]
        lines.append("== stage wall time (s) ==")
        lines += [f"{k}: {v:.4f}" for k, v in self.stage_seconds.items()]
        lines.append("== estimated ops/s ==")
        lines += [f"{k}: {v:.3e}" for k, v in self.ops_per_second.items()]
        lines.append("== prediction latency (ms) ==")
        lines += [f"{k}: {v:.3f}" for k, v in self.prediction_ms.items()]
        lines.append("== scaling ==")
        lines += [f"{k}: {v:.4f}" for k, v in self.scaling.items()]
        lines.append(f"hardware: {self.hardware}")
        return "\n".join(lines)


def _featurize_stage_seconds(
    urls: list[str], cfg: VectorizerConfig
) -> tuple[float, float, FeatureScaler, np.ndarray]:
    """Timed preprocessing (normalize + stats) and vectorization passes."""
    t0 = time.perf_counter()
    stats = [stat_features(u) for u in urls]
    t_pre = time.perf_counter() - t0
    scaler = fit_scaler(stats)
    t0 = time.perf_counter()
    x = featurize_all(urls, cfg, scaler)
    t_vec = time.perf_counter() - t0
    return t_pre, t_vec, scaler, x


def _latency_profile(bundle: ModelBundle, urls: list[str], calls: int = 200) -> dict:
    samples = []
    for i in range(calls):
        res = classify_url(urls[i % len(urls)], bundle)
        samples.append(res.latency_us / 1000.0)
    arr = np.array(samples)
    return {"p50": float(np.percentile(arr, 50)), "p95": float(np.percentile(arr, 95))}


def run_bench(cfg: PipelineConfig, dataset: ingest.Dataset) -> BenchReport:
    """Measure the cost model stage by stage and the scaling behavior.

    Featurization is timed at full and half corpus size (linear-scaling
    check) and prediction latency is profiled on models trained at both
    sizes (N-independence check).
    """
    if len(dataset) < 1000:
        raise ValueError("benchmark needs at least 1000 records")
    cfg = cfg.resolve_seeds()
    records = dataset.records
    n = len(records)
    urls, labels = _normalize_records(records)
    l_avg = float(np.mean([len(u) for u in urls]))
    d = cfg.vectorizer.n_features

    t_pre, t_vec, scaler, x = _featurize_stage_seconds(urls, cfg.vectorizer)

    half = records[::2]  # every other record keeps the class mix
    half_urls = [normalize_url(r.url) for r in half]
    t_pre_h, t_vec_h, _, _ = _featurize_stage_seconds(half_urls, cfg.vectorizer)

    t0 = time.perf_counter()
    x_s, y_s = balance.smote_resample(x, labels, cfg.smote)
    t_smote = time.perf_counter() - t0
    m_synth = x_s.shape[0] - n

    t0 = time.perf_counter()
    forest = anomaly.fit_forest(
        x_s, t=cfg.forest_trees, psi=cfg.forest_psi, seed=cfg.forest_seed
    )
    x_f, y_f, _ = anomaly.filter_outliers(x_s, y_s, forest, cfg.anomaly)
    t_forest = time.perf_counter() - t0

    dims = [feature_dim(cfg.vectorizer), *cfg.hidden_dims, 1]
    model = neuralnet.init_weights(dims, seed=cfg.init_seed)
    t0 = time.perf_counter()
    model, _ = neuralnet.train(model, x_f, y_f, cfg.train)
    t_train = time.perf_counter() - t0

    bundle = ModelBundle(
        vectorizer=cfg.vectorizer, scaler=scaler, network=model, forest=forest,
        metadata={"created_at": "bench", "model_version": "bench"},
    )
    t0 = time.perf_counter()
    lat_full = _latency_profile(bundle, urls)
    t_pred = time.perf_counter() - t0

    # model trained on the half corpus: prediction cost must not move
    half_ds = ingest.Dataset(records=half, seed=dataset.seed)
    half_bundle, _ = train_pipeline(half_ds, cfg)
    lat_half = _latency_profile(half_bundle, half_urls)

    h = model.param_count()
    e, b = cfg.train.epochs, cfg.train.batch_size
    grams = sum(ngram_count(len(u), cfg.vectorizer) for u in urls)
    est_ops = {
        "preprocessing": 4.0 * n * l_avg,
        "vectorization": 32.0 * grams,
        "smote": 7.0 * d * max(m_synth, 1),
        "isolation_forest": 10.0 * n * d * cfg.forest_trees,
        "training": float(e * np.ceil(x_f.shape[0] / b) * b * 2 * h),
        "prediction": float(h),
    }
    stage_seconds = {
        "preprocessing": max(t_pre, 1e-9),
        "vectorization": max(t_vec, 1e-9),
        "smote": max(t_smote, 1e-9),
        "isolation_forest": max(t_forest, 1e-9),
        "training": max(t_train, 1e-9),
        "prediction": max(t_pred, 1e-9),
    }
    return BenchReport(
        params={
            "N": float(n), "L": l_avg, "d": float(d),
            "k": float(cfg.vectorizer.ngram_max), "E": float(e), "B": float(b),
            "h": float(h), "M": float(m_synth), "t": float(cfg.forest_trees),
        },
        stage_seconds=stage_seconds,
        ops_per_second={k: est_ops[k] / stage_seconds[k] for k in est_ops},
        prediction_ms={
            "full_p50": lat_full["p50"], "full_p95": lat_full["p95"],
            "half_p50": lat_half["p50"], "half_p95": lat_half["p95"],
        },
        scaling={
            "featurize_full_s": t_pre + t_vec,
            "featurize_half_s": t_pre_h + t_vec_h,
            "featurize_ratio": (t_pre + t_vec) / max(t_pre_h + t_vec_h, 1e-9),
            "prediction_ratio": lat_full["p50"] / max(lat_half["p50"], 1e-9),
        },
        hardware=f"{platform.processor() or platform.machine()}, "
        f"{os.cpu_count()} cores, {platform.system()}",
    )
