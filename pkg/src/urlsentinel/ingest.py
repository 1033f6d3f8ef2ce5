"""Dataset acquisition: threat-feed parsing, synthetic URL generation,
deduplication, train/test splitting and local TSV persistence.

All parsers work on local text so the test suite never touches the network;
fetch_feed is the optional live transport in front of them.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass

import numpy as np
import requests

from .errors import (
    DegenerateInputError,
    FeedFormatError,
    FeedNetworkError,
    FeedStatusError,
    FeedTimeoutError,
)
from .features import normalize_url

log = logging.getLogger(__name__)

URLHAUS_FEED = "https://urlhaus.abuse.ch/downloads/text/"
PHISHTANK_FEED = "https://www.phishtank.com/phishers/data/urls.csv"

BENIGN = 0
MALICIOUS = 1


@dataclass(frozen=True)
class LabeledUrl:
    url: str
    label: int  # 0 benign, 1 malicious
    source: str  # urlhaus | phishtank | synthetic | user_file

    def __post_init__(self):
        if not self.url:
            raise ValueError("url must be non-empty")
        if self.label not in (0, 1):
            raise ValueError("label must be 0 or 1")


@dataclass
class Dataset:
    records: list[LabeledUrl]
    seed: int = 0

    def __len__(self) -> int:
        return len(self.records)

    def class_counts(self) -> tuple[int, int]:
        mal = sum(r.label for r in self.records)
        return len(self.records) - mal, mal


@dataclass
class ParseResult:
    records: list[LabeledUrl]
    skipped: int = 0
    data_lines: int = 0


def parse_urlhaus_text(body: str) -> ParseResult:
    """One malicious record per non-comment, non-blank line.

    Lines with internal whitespace are treated as corrupt and counted as
    skipped; records + skipped always equals the number of data lines.
    """
    records = []
    skipped = 0
    data_lines = 0
    for line in body.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        data_lines += 1
        if any(ch.isspace() for ch in line):
            skipped += 1
            continue
        records.append(LabeledUrl(url=line, label=MALICIOUS, source="urlhaus"))
    return ParseResult(records=records, skipped=skipped, data_lines=data_lines)


def parse_phishtank_csv(body: str) -> ParseResult:
    """One malicious record per CSV data row with a non-empty 'url' cell."""
    reader = csv.DictReader(io.StringIO(body))
    if reader.fieldnames is None or "url" not in reader.fieldnames:
        raise FeedFormatError("CSV feed is missing the required 'url' column")
    records = []
    rejected = 0
    rows = 0
    for row in reader:
        rows += 1
        url = (row.get("url") or "").strip()
        if not url:
            rejected += 1
            continue
        records.append(LabeledUrl(url=url, label=MALICIOUS, source="phishtank"))
    return ParseResult(records=records, skipped=rejected, data_lines=rows)


@dataclass(frozen=True)
class BenignGenConfig:
    domains: tuple[str, ...] = ("google.com", "wikipedia.org", "github.com")
    path_segments: tuple[int, int] = (1, 4)
    query_params: tuple[int, int] = (0, 3)
    seed: int = 0

    def __post_init__(self):
        if not self.domains:
            raise ValueError("domains must be non-empty")


_ALNUM = "abcdefghijklmnopqrstuvwxyz0123456789"
_WORDS = (
    "search", "index", "docs", "watch", "wiki", "blog", "user", "img",
    "page", "view", "list", "item", "news", "help", "repo", "issues",
)


def _token(rng: np.random.Generator, lo: int, hi: int) -> str:
    length = int(rng.integers(lo, hi + 1))
    return "".join(_ALNUM[i] for i in rng.integers(0, len(_ALNUM), size=length))


def generate_benign(n: int, cfg: BenignGenConfig) -> list[LabeledUrl]:
    """n synthetic benign URLs over mainstream domains, deterministic by seed."""
    rng = np.random.default_rng(cfg.seed)
    records = []
    for _ in range(n):
        domain = cfg.domains[int(rng.integers(0, len(cfg.domains)))]
        n_seg = int(rng.integers(cfg.path_segments[0], cfg.path_segments[1] + 1))
        segs = []
        for _ in range(n_seg):
            if rng.random() < 0.5:
                segs.append(_WORDS[int(rng.integers(0, len(_WORDS)))])
            else:
                segs.append(_token(rng, 3, 10))
        url = "https://" + domain + "/" + "/".join(segs)
        n_q = int(rng.integers(cfg.query_params[0], cfg.query_params[1] + 1))
        if n_q:
            params = [
                f"{_token(rng, 1, 5)}={_token(rng, 1, 8)}" for _ in range(n_q)
            ]
            url += "?" + "&".join(params)
        records.append(LabeledUrl(url=url, label=BENIGN, source="synthetic"))
    return records


_BAD_TLDS = ("tk", "ru", "xyz", "top", "cc", "info", "zip")
_BAD_FILES = ("update.exe", "invoice.php", "load.js", "setup.scr", "doc.zip")


def generate_malicious(n: int, seed: int = 0) -> list[LabeledUrl]:
    """n malicious-style URLs: IP hosts, long random paths, encoded params.

    Mirrors the obfuscation patterns seen in real feeds so a desk-scale
    corpus can be built without network access.
    """
    rng = np.random.default_rng(seed)
    records = []
    for _ in range(n):
        kind = int(rng.integers(0, 4))
        if kind == 0:
            # raw IP host with a port and a dropper-style filename
            host = ".".join(str(int(rng.integers(1, 255))) for _ in range(4))
            port = f":{int(rng.integers(1024, 65535))}" if rng.random() < 0.4 else ""
            path = _token(rng, 12, 40)
            fname = _BAD_FILES[int(rng.integers(0, len(_BAD_FILES)))]
            url = f"http://{host}{port}/{path}/{fname}"
        elif kind == 1:
            # throwaway domain with a long high-entropy path
            host = _token(rng, 8, 20) + "." + _BAD_TLDS[int(rng.integers(0, len(_BAD_TLDS)))]
            path = "/".join(_token(rng, 10, 30) for _ in range(int(rng.integers(2, 5))))
            url = f"http://{host}/{path}"
        elif kind == 2:
            # percent-encoded query blob
            host = _token(rng, 6, 14) + "." + _BAD_TLDS[int(rng.integers(0, len(_BAD_TLDS)))]
            blob = "".join(
                f"%{int(b):02x}" for b in rng.integers(32, 127, size=int(rng.integers(8, 24)))
            )
            url = f"http://{host}/{_token(rng, 4, 12)}?id={blob}&s={_token(rng, 6, 16)}"
        else:
            # credential-phish lookalike with an @ redirect
            lure = _WORDS[int(rng.integers(0, len(_WORDS)))]
            host = _token(rng, 10, 24) + "." + _BAD_TLDS[int(rng.integers(0, len(_BAD_TLDS)))]
            url = (
                f"http://{lure}.secure-login.com@{host}/"
                f"{_token(rng, 16, 48)}?auth={_token(rng, 8, 20)}"
            )
        records.append(LabeledUrl(url=url, label=MALICIOUS, source="synthetic"))
    return records


def _unique_fill(target: int, seen: set, make_batch) -> list[LabeledUrl]:
    """Draw batches until `target` records with distinct normalized text exist."""
    out = []
    round_no = 0
    while len(out) < target:
        for rec in make_batch(target - len(out), round_no):
            key = normalize_url(rec.url)
            if key in seen:
                continue
            seen.add(key)
            out.append(rec)
            if len(out) == target:
                break
        round_no += 1
    return out


def synthetic_corpus(
    n_benign: int = 6000, n_malicious: int = 6000, seed: int = 0
) -> Dataset:
    """Desk-scale corpus used when live feeds are unavailable.

    Exactly n_benign + n_malicious records, already unique under
    normalization (short word-built benign paths collide, so generation
    tops up until the counts are exact).
    """
    seen: set[str] = set()
    benign = _unique_fill(
        n_benign,
        seen,
        lambda k, r: generate_benign(k, BenignGenConfig(seed=seed + 1000 * r)),
    )
    malicious = _unique_fill(
        n_malicious,
        seen,
        lambda k, r: generate_malicious(k, seed=seed + 1000 * r + 1),
    )
    return Dataset(records=benign + malicious, seed=seed)


def dedup(records: list[LabeledUrl], seed: int = 0) -> Dataset:
    """First occurrence wins, keyed by normalized URL text; order preserved.

    Records that normalize to nothing are dropped (feed corruption)."""
    seen = set()
    kept = []
    dropped = 0
    for rec in records:
        try:
            key = normalize_url(rec.url)
        except DegenerateInputError:
            dropped += 1
            continue
        if key in seen:
            continue
        seen.add(key)
        kept.append(rec)
    if dropped:
        log.warning("dedup dropped %d records empty after normalization", dropped)
    return Dataset(records=kept, seed=seed)


@dataclass(frozen=True)
class SplitConfig:
    train_fraction: float = 0.8
    stratified: bool = True
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.train_fraction < 1.0):
            raise ValueError("train_fraction must be in (0, 1)")


def stratified_split(ds: Dataset, cfg: SplitConfig) -> tuple[Dataset, Dataset]:
    """Disjoint train/test partition, per-class proportions within one record.

    Deterministic given cfg.seed; record order inside each side follows the
    original dataset order.
    """
    rng = np.random.default_rng(cfg.seed)
    n = len(ds.records)
    if n == 0:
        raise ValueError("cannot split an empty dataset")
    if cfg.stratified:
        labels = {r.label for r in ds.records}
        if labels != {0, 1}:
            raise ValueError("stratified split needs at least one record per class")
        train_idx = set()
        for cls in (0, 1):
            cls_idx = [i for i, r in enumerate(ds.records) if r.label == cls]
            k = int(round(cfg.train_fraction * len(cls_idx)))
            chosen = rng.permutation(len(cls_idx))[:k]
            train_idx.update(cls_idx[i] for i in chosen)
    else:
        k = int(round(cfg.train_fraction * n))
        train_idx = set(int(i) for i in rng.permutation(n)[:k])
    train = [r for i, r in enumerate(ds.records) if i in train_idx]
    test = [r for i, r in enumerate(ds.records) if i not in train_idx]
    return Dataset(records=train, seed=cfg.seed), Dataset(records=test, seed=cfg.seed)


def fetch_feed(endpoint: str, timeout: float = 30.0) -> str:
    """GET a feed body; distinct retryable errors for status/network/timeout."""
    try:
        resp = requests.get(endpoint, timeout=timeout)
    except requests.exceptions.Timeout as exc:
        raise FeedTimeoutError(f"feed {endpoint} timed out after {timeout}s") from exc
    except requests.exceptions.RequestException as exc:
        raise FeedNetworkError(f"feed {endpoint} unreachable: {exc}") from exc
    if resp.status_code != 200:
        raise FeedStatusError(resp.status_code, endpoint)
    return resp.text


def save_dataset(ds: Dataset, path: str) -> None:
    """One '<label>\\t<url>' line per record, UTF-8."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in ds.records:
            fh.write(f"{rec.label}\t{rec.url}\n")


def load_dataset(path: str) -> Dataset:
    """Read the local TSV corpus format written by save_dataset."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            try:
                label_s, url = line.split("\t", 1)
                records.append(
                    LabeledUrl(url=url, label=int(label_s), source="user_file")
                )
            except (ValueError, TypeError) as exc:
                raise FeedFormatError(f"{path}:{lineno}: bad record: {exc}") from exc
    return Dataset(records=records)
