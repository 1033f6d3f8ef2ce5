"""URL feature extraction.

Turns a raw URL string into the fixed-length numeric vector the rest of the
pipeline consumes: 4 z-scaled statistical features (length, dot count, slash
count, Shannon entropy) followed by a d-dimensional hashed character n-gram
block. Hashing uses FNV-1a 32-bit over UTF-8 bytes so vectors are bit-identical
across runs, processes and platforms.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DegenerateInputError

DEFAULT_MAX_LEN = 200

FNV_OFFSET_BASIS = 2166136261
FNV_PRIME = 16777619

_MASK32 = np.uint64(0xFFFFFFFF)
# ASCII control chars 0x00-0x1F plus DEL; printable specials stay verbatim
_CONTROL_CHARS = {chr(c) for c in range(0x20)} | {chr(0x7F)}
_CONTROL_TABLE = str.maketrans("", "", "".join(_CONTROL_CHARS))


def normalize_url(raw: str, max_len: int = DEFAULT_MAX_LEN) -> str:
    """Canonicalize a raw URL: drop control chars, lowercase, strip, truncate.

    Idempotent. Raises DegenerateInputError if nothing survives.
    """
    text = raw.translate(_CONTROL_TABLE)
    text = text.lower().strip()
    text = text[:max_len].rstrip()  # truncation may expose trailing whitespace
    if not text:
        raise DegenerateInputError("URL is empty after normalization")
    return text


def shannon_entropy(s: str) -> float:
    """Shannon entropy in bits over character relative frequencies."""
    if not s:
        raise DegenerateInputError("entropy of empty string is undefined")
    n = len(s)
    h = 0.0
    for count in Counter(s).values():
        p = count / n
        h -= p * math.log2(p)
    return max(h, 0.0)


@dataclass(frozen=True)
class StatFeatures:
    length: int
    dot_count: int
    slash_count: int
    entropy: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.length, self.dot_count, self.slash_count, self.entropy],
            dtype=np.float64,
        )


def stat_features(url: str) -> StatFeatures:
    """Exact per-character statistics of a normalized URL."""
    return StatFeatures(
        length=len(url),
        dot_count=url.count("."),
        slash_count=url.count("/"),
        entropy=shannon_entropy(url),
    )


@dataclass(frozen=True)
class VectorizerConfig:
    ngram_min: int = 2
    ngram_max: int = 5
    n_features: int = 1000
    l2_normalize: bool = True
    signed: bool = False

    def __post_init__(self):
        if not (1 <= self.ngram_min <= self.ngram_max):
            raise ValueError("require 1 <= ngram_min <= ngram_max")
        if self.n_features < 1:
            raise ValueError("n_features must be >= 1")


def char_ngrams(url: str, cfg: VectorizerConfig) -> list[str]:
    """All contiguous substrings of length ngram_min..ngram_max, per-length
    in position order. Strings shorter than ngram_min yield []."""
    out = []
    ln = len(url)
    for n in range(cfg.ngram_min, cfg.ngram_max + 1):
        for i in range(ln - n + 1):
            out.append(url[i : i + n])
    return out


def ngram_count(length: int, cfg: VectorizerConfig) -> int:
    return sum(
        max(0, length - n + 1) for n in range(cfg.ngram_min, cfg.ngram_max + 1)
    )


def fnv1a_32(data: bytes) -> int:
    """FNV-1a 32-bit hash (offset basis 2166136261, prime 16777619)."""
    h = FNV_OFFSET_BASIS
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & 0xFFFFFFFF
    return h


@dataclass(frozen=True)
class HashedVector:
    dim: int
    entries: tuple[tuple[int, float], ...]  # (index, weight), indices increasing

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dim, dtype=np.float64)
        for idx, w in self.entries:
            dense[idx] = w
        return dense


def _accumulate_buckets(url: str, cfg: VectorizerConfig) -> np.ndarray:
    """Per n-gram, add +1 (or the hash-sign with signed on) into bucket
    FNV-1a(ngram) mod d. Dense float64 output."""
    d = cfg.n_features
    vec = np.zeros(d, dtype=np.float64)
    if url.isascii():
        # all n-grams are pure byte windows: hash every window of each
        # length in one vectorized sweep
        codes = np.frombuffer(url.encode("utf-8"), dtype=np.uint8).astype(np.uint64)
        prime = np.uint64(FNV_PRIME)
        for n in range(cfg.ngram_min, cfg.ngram_max + 1):
            if len(codes) < n:
                continue
            win = sliding_window_view(codes, n)
            h = np.full(win.shape[0], FNV_OFFSET_BASIS, dtype=np.uint64)
            for j in range(n):
                h = ((h ^ win[:, j]) * prime) & _MASK32
            if cfg.signed:
                # top hash bit picks the sign, remaining entropy the bucket
                contrib = np.where(h >> np.uint64(31), -1.0, 1.0)
            else:
                contrib = 1.0
            np.add.at(vec, (h % np.uint64(d)).astype(np.intp), contrib)
    else:
        # multi-byte characters break the byte-window shortcut
        for gram in char_ngrams(url, cfg):
            h = fnv1a_32(gram.encode("utf-8"))
            sign = -1.0 if cfg.signed and h >> 31 else 1.0
            vec[h % d] += sign
    return vec


def hash_vectorize(url: str, cfg: VectorizerConfig) -> HashedVector:
    """Hashed n-gram vector of a normalized URL.

    Each n-gram adds +1 to bucket FNV-1a-32(utf-8 bytes) mod d; the result is
    L2-normalized when configured and at least one bucket is nonzero.
    """
    vec = _accumulate_buckets(url, cfg)
    if cfg.l2_normalize:
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
    idx = np.nonzero(vec)[0]
    return HashedVector(
        dim=cfg.n_features,
        entries=tuple((int(i), float(vec[i])) for i in idx),
    )


@dataclass(frozen=True)
class FeatureScaler:
    """Per-feature mean/std of the 4 statistical features, fit on train only."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        if self.mean.shape != (4,) or self.std.shape != (4,):
            raise ValueError("scaler expects exactly 4 statistical features")
        if np.any(self.std <= 0):
            raise ValueError("scaler std components must be > 0")

    def transform(self, stats: StatFeatures) -> np.ndarray:
        return (stats.as_array() - self.mean) / self.std


def fit_scaler(stats: list[StatFeatures]) -> FeatureScaler:
    """Population mean/std per statistical feature; zero variance maps to std 1."""
    if not stats:
        raise ValueError("cannot fit scaler on an empty sample")
    mat = np.stack([s.as_array() for s in stats])
    mean = mat.mean(axis=0)
    std = mat.std(axis=0)  # population (ddof=0)
    std = np.where(std == 0.0, 1.0, std)
    return FeatureScaler(mean=mean, std=std)


def feature_dim(cfg: VectorizerConfig) -> int:
    return cfg.n_features + 4


def featurize(url: str, cfg: VectorizerConfig, scaler: FeatureScaler) -> np.ndarray:
    """Dense feature vector of length d+4: scaled stats first, hashed block after.

    `url` must already be normalized (featurize_raw handles raw input).
    """
    scaled = scaler.transform(stat_features(url))
    hashed = _accumulate_buckets(url, cfg)
    if cfg.l2_normalize:
        norm = float(np.linalg.norm(hashed))
        if norm > 0.0:
            hashed /= norm
    return np.concatenate([scaled, hashed])


def featurize_raw(
    raw: str,
    cfg: VectorizerConfig,
    scaler: FeatureScaler,
    max_len: int = DEFAULT_MAX_LEN,
) -> np.ndarray:
    """normalize_url then featurize; propagates DegenerateInputError."""
    return featurize(normalize_url(raw, max_len), cfg, scaler)


def featurize_all(
    urls: list[str], cfg: VectorizerConfig, scaler: FeatureScaler
) -> np.ndarray:
    """Feature matrix (n, d+4) for already-normalized URLs."""
    out = np.empty((len(urls), feature_dim(cfg)), dtype=np.float64)
    for i, u in enumerate(urls):
        out[i] = featurize(u, cfg, scaler)
    return out
