"""Acceptance suite: one test per release criterion, each printing a
[PASS] line with the measured numbers. Run with `pytest tests/test_acceptance.py -v -s`.
"""

import io
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from urlsentinel import (
    ConfusionMatrix,
    PipelineConfig,
    SmoteConfig,
    VectorizerConfig,
    anomaly_score,
    classification_metrics,
    classify_url,
    fit_forest,
    hash_vectorize,
    load_bundle,
    roc_auc,
    save_bundle,
    score_batch,
    smote_resample,
    synthetic_corpus,
    train_pipeline,
)
from urlsentinel.anomaly import IsoLeaf, IsolationForestModel
from urlsentinel.features import ngram_count
from urlsentinel.neuralnet import backward, bce_loss, forward_batch, init_weights

from test_metrics import pairwise_auc
from test_model_store import tiny_bundle
from test_neuralnet import finite_difference_check, random_check_point


# ---------------------------------------------------------------- shared runs

DESK_SEED = 2024


@pytest.fixture(scope="module")
def desk_run():
    """Full-size training run: 6000 benign + 6000 malicious, default config."""
    dataset = synthetic_corpus(6000, 6000, seed=DESK_SEED)
    cfg = PipelineConfig(seed=DESK_SEED)
    t0 = time.perf_counter()
    bundle, report = train_pipeline(dataset, cfg, created_at="acceptance")
    wall = time.perf_counter() - t0
    return dataset, cfg, bundle, report, wall


# ------------------------------------------------------------------ criteria


def test_gradient_oracle():
    """Analytic gradients vs central finite differences on 20 random nets."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for trial in range(20):
        n_hidden = int(rng.integers(1, 3))
        dims = [int(rng.integers(2, 9))]
        dims += [int(rng.integers(2, 9)) for _ in range(n_hidden)]
        dims += [1]
        batch = int(rng.integers(1, 9))
        model, x, y = random_check_point(dims, seed=100 + trial, batch=batch)
        worst = max(worst, finite_difference_check(model, x, y, step=1e-5))
    elapsed = time.perf_counter() - t0
    assert worst < 1e-4, f"max relative error {worst}"
    assert elapsed < 10.0, f"took {elapsed:.1f}s"
    print(f"[PASS] gradient oracle: max rel err {worst:.2e} over 20 nets in {elapsed:.1f}s")


def test_smote_geometry():
    """Exact segment membership for every synthetic sample on 500 points."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    n_maj, n_min = 350, 150
    x = np.vstack(
        [rng.normal(0, 1, (n_maj, 12)), rng.normal(2.5, 0.8, (n_min, 12))]
    )
    y = np.concatenate([np.zeros(n_maj, dtype=int), np.ones(n_min, dtype=int)])
    x2, y2, audit = smote_resample(x, y, SmoteConfig(seed=17), audit=True)

    assert int(np.sum(y2 == 0)) == int(np.sum(y2 == 1)) == n_maj
    minority = x[y == 1]
    assert len(audit) == n_maj - n_min
    for j, entry in enumerate(audit):
        base = minority[entry.base_index]
        nn = minority[entry.neighbor_index]
        recomputed = base + entry.lam * (nn - base)
        assert np.array_equal(x2[len(x) + j], recomputed)  # exact, bit-level
        assert 0.0 <= entry.lam < 1.0
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0, f"took {elapsed:.1f}s"
    print(
        f"[PASS] SMOTE geometry: {len(audit)} synthetics verified exactly, "
        f"classes balanced at {n_maj}/{n_maj}, in {elapsed:.1f}s"
    )


def test_isolation_forest_planted_outliers():
    """Score ranking separates planted outliers; midpoint identity is exact."""
    t0 = time.perf_counter()
    aucs = []
    for seed in range(5):
        rng = np.random.default_rng(300 + seed)
        inliers = rng.normal(0.0, 0.05, (950, 2)) + 0.5
        outliers = rng.uniform(-4.0, 4.0, (50, 2))
        x = np.vstack([inliers, outliers])
        y = np.concatenate([np.zeros(950, dtype=int), np.ones(50, dtype=int)])
        model = fit_forest(x, t=100, psi=256, seed=seed)
        aucs.append(roc_auc(score_batch(x, model), y))
    assert all(a > 0.9 for a in aucs), f"AUCs {aucs}"

    # every tree a single psi-sized leaf: E[h] = c(psi) for any input
    psi = 256
    flat = IsolationForestModel(
        trees=[IsoLeaf(size=psi)] * 7, psi=psi, sample_size=psi,
        n_features=2, seed=0,
    )
    assert anomaly_score(np.zeros(2), flat) == 0.5
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, f"took {elapsed:.1f}s"
    print(
        f"[PASS] isolation forest: planted-outlier AUC "
        f"{min(aucs):.3f}..{max(aucs):.3f} over 5 seeds, midpoint s=0.5 exact, "
        f"in {elapsed:.1f}s"
    )


def test_metric_oracles():
    """Reported-count metrics against direct formulas; AUC against pair counts."""
    t0 = time.perf_counter()
    m = classification_metrics(ConfusionMatrix(tp=5247, fn=47, tn=14416, fp=485))
    assert abs(m.accuracy - 0.97366) < 1e-5
    assert abs(m.precision - 0.91539) < 1e-5
    assert abs(m.recall - 0.99112) < 1e-5
    assert abs(m.f1 - 0.95175) < 1e-5

    rng = np.random.default_rng(23)
    worst = 0.0
    for _ in range(50):
        scores = np.round(rng.random(500), 2)  # ties included
        labels = rng.integers(0, 2, 500)
        if labels.sum() in (0, 500):
            continue
        worst = max(worst, abs(roc_auc(scores, labels) - pairwise_auc(scores, labels)))
    assert worst < 1e-12, f"rank vs pairwise gap {worst}"
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, f"took {elapsed:.1f}s"
    print(
        f"[PASS] metric oracles: count-derived metrics to 1e-5, rank AUC vs "
        f"pairwise gap {worst:.2e} over 50 instances, in {elapsed:.1f}s"
    )


def test_end_to_end_desk_analog(desk_run):
    """Full pipeline on the 12k synthetic corpus: accuracy, AUC, wall time,
    and run-to-run determinism."""
    dataset, cfg, bundle, report, wall = desk_run
    assert report.accuracy >= 0.95, f"accuracy {report.accuracy:.4f}"
    assert report.roc_auc >= 0.96, f"roc_auc {report.roc_auc:.4f}"
    assert wall <= 120.0, f"training took {wall:.1f}s"

    bundle2, report2 = train_pipeline(dataset, cfg, created_at="acceptance")
    assert report2.to_dict() == report.to_dict()
    buf1, buf2 = io.BytesIO(), io.BytesIO()
    save_bundle(bundle, buf1)
    save_bundle(bundle2, buf2)
    assert buf1.getvalue() == buf2.getvalue()
    print(
        f"[PASS] end-to-end desk analog: accuracy {report.accuracy:.4f}, "
        f"roc_auc {report.roc_auc:.4f}, wall {wall:.1f}s, bundle bytes identical "
        f"across two runs"
    )


def test_prediction_latency(desk_run):
    """p95 under 20 ms warm, and independent of training-set size."""
    dataset, cfg, bundle, _, _ = desk_run
    probe = [r.url for r in dataset.records[:200]]

    def profile(b):
        warm = [classify_url(u, b) for u in probe[:50]]  # warm caches
        lats = []
        for i in range(1000):
            lats.append(classify_url(probe[i % len(probe)], b).latency_us / 1000.0)
        arr = np.array(lats)
        return float(np.percentile(arr, 95)), float(np.percentile(arr, 50))

    p95_full, p50_full = profile(bundle)
    assert p95_full <= 20.0, f"p95 {p95_full:.2f} ms"

    half = synthetic_corpus(3000, 3000, seed=DESK_SEED + 1)
    bundle_half, _ = train_pipeline(half, cfg, created_at="acceptance")
    p95_half, p50_half = profile(bundle_half)
    ratio = abs(p50_full - p50_half) / p50_half
    assert ratio <= 0.20, f"median latency moved {ratio:.1%} with training size"
    print(
        f"[PASS] latency: p95 {p95_full:.2f} ms (half-corpus {p95_half:.2f} ms), "
        f"median shift {ratio:.1%} across training sizes"
    )


def test_persistence(desk_run):
    """Bit-identical predictions after round-trip; corruption always detected."""
    dataset, _, bundle, _, _ = desk_run
    raw = io.BytesIO()
    save_bundle(bundle, raw)
    loaded = load_bundle(raw.getvalue())
    probe = [r.url for r in dataset.records[::121]][:100]
    assert len(probe) == 100
    before = [classify_url(u, bundle).score for u in probe]
    after = [classify_url(u, loaded).score for u in probe]
    assert before == after  # bit-identical

    compact = tiny_bundle()
    buf = io.BytesIO()
    save_bundle(compact, buf)
    blob = buf.getvalue()
    rng = np.random.default_rng(41)
    detected = 0
    for _ in range(1000):
        pos = int(rng.integers(0, len(blob)))
        flip = int(rng.integers(1, 256))
        corrupted = bytearray(blob)
        corrupted[pos] ^= flip
        try:
            load_bundle(bytes(corrupted))
        except Exception:
            detected += 1
    assert detected == 1000, f"only {detected}/1000 corruptions detected"
    print(
        "[PASS] persistence: 100-URL probe bit-identical after round-trip, "
        "1000/1000 single-byte corruptions detected"
    )


_HASH_DIGEST_SCRIPT = r"""
import hashlib
import random
from urlsentinel import VectorizerConfig, hash_vectorize

rng = random.Random(90210)
alphabet = "abcdefghijklmnopqrstuvwxyz0123456789./:?&=%@-_"
cfg = VectorizerConfig()
digest = hashlib.sha256()
for _ in range(1000):
    url = "".join(rng.choice(alphabet) for _ in range(rng.randint(5, 150)))
    hv = hash_vectorize(url, cfg)
    digest.update(repr(hv.dim).encode())
    for idx, w in hv.entries:
        digest.update(idx.to_bytes(4, "little"))
        import struct
        digest.update(struct.pack("<d", w))
print(digest.hexdigest())
"""


def test_vectorizer_determinism():
    """Identical hashed vectors across independent processes; weight sums
    conserve the n-gram count."""
    outs = []
    for _ in range(2):
        proc = subprocess.run(
            [sys.executable, "-c", _HASH_DIGEST_SCRIPT],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 0, proc.stderr
        outs.append(proc.stdout.strip())
    assert outs[0] == outs[1], "hash digests differ across processes"

    rng = np.random.default_rng(55)
    alphabet = "abcdefghijklmnopqrstuvwxyz0123456789./:?&=%@-_"
    cfg = VectorizerConfig(l2_normalize=False)
    for _ in range(1000):
        n = int(rng.integers(5, 151))
        url = "".join(alphabet[i] for i in rng.integers(0, len(alphabet), n))
        hv = hash_vectorize(url, cfg)
        total = sum(w for _, w in hv.entries)
        assert total == ngram_count(len(url), cfg)
    print(
        f"[PASS] vectorizer determinism: process digests equal "
        f"({outs[0][:12]}...), bucket sums conserve n-gram counts on 1000 URLs"
    )
