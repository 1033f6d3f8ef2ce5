"""Versioned binary persistence for the full pipeline.

Layout: 8-byte magic "URLSNTL1", u32 format version, then length-prefixed
sections (4-byte tag + u64 payload length), and a trailing CRC-32 over every
preceding byte. Floats are little-endian 64-bit by default; an optional 32-bit
parameter encoding shrinks deployment bundles at the cost of bit-exactness.
File extension: .usnl
"""

from __future__ import annotations

import io
import json
import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from .anomaly import IsoLeaf, IsoNode, IsoSplit, IsolationForestModel
from .errors import (
    BundleChecksumError,
    BundleMagicError,
    BundleTruncationError,
    BundleVersionError,
)
from .features import FeatureScaler, VectorizerConfig
from .neuralnet import MlpModel

MAGIC = b"URLSNTL1"
FORMAT_VERSION = 1

_TAG_VECTORIZER = b"VCFG"
_TAG_SCALER = b"SCLR"
_TAG_NETWORK = b"NNET"
_TAG_FOREST = b"FRST"
_TAG_METADATA = b"META"


@dataclass
class ModelBundle:
    vectorizer: VectorizerConfig
    scaler: FeatureScaler
    network: MlpModel
    forest: IsolationForestModel | None = None
    metadata: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def validate(self) -> None:
        if self.network.layer_dims[0] != self.vectorizer.n_features + 4:
            raise ValueError(
                f"network input {self.network.layer_dims[0]} != "
                f"n_features+4 = {self.vectorizer.n_features + 4}"
            )


def _pack_section(tag: bytes, payload: bytes) -> bytes:
    return tag + struct.pack("<Q", len(payload)) + payload


def _floats(arr: np.ndarray, dtype: str) -> bytes:
    return np.ascontiguousarray(arr, dtype=dtype).tobytes()


def _vectorizer_payload(cfg: VectorizerConfig) -> bytes:
    return struct.pack(
        "<IIIBB", cfg.ngram_min, cfg.ngram_max, cfg.n_features,
        int(cfg.l2_normalize), int(cfg.signed),
    )


def _scaler_payload(scaler: FeatureScaler) -> bytes:
    return _floats(scaler.mean, "<f8") + _floats(scaler.std, "<f8")


def _network_payload(net: MlpModel, dtype: str) -> bytes:
    buf = io.BytesIO()
    buf.write(struct.pack("<B", 4 if dtype == "<f4" else 8))
    buf.write(struct.pack("<I", len(net.layer_dims)))
    buf.write(struct.pack(f"<{len(net.layer_dims)}I", *net.layer_dims))
    for act in net.activations:
        raw = act.encode("utf-8")
        buf.write(struct.pack("<B", len(raw)))
        buf.write(raw)
    for w, b in zip(net.weights, net.biases):
        buf.write(_floats(w, dtype))
        buf.write(_floats(b, dtype))
    return buf.getvalue()


def _write_tree(buf: io.BytesIO, node: IsoNode) -> None:
    if isinstance(node, IsoLeaf):
        buf.write(struct.pack("<BI", 0, node.size))
    else:
        buf.write(struct.pack("<BId", 1, node.feature, node.value))
        _write_tree(buf, node.left)
        _write_tree(buf, node.right)


def _forest_payload(forest: IsolationForestModel) -> bytes:
    buf = io.BytesIO()
    buf.write(
        struct.pack(
            "<IIIIq", len(forest.trees), forest.psi, forest.sample_size,
            forest.n_features, forest.seed,
        )
    )
    for tree in forest.trees:
        _write_tree(buf, tree)
    return buf.getvalue()


def save_bundle(bundle: ModelBundle, destination, float32: bool = False) -> None:
    """Serialize to a path or binary file object. float32 halves parameter
    storage; the default keeps every bit of the trained parameters."""
    bundle.validate()
    dtype = "<f4" if float32 else "<f8"
    body = io.BytesIO()
    body.write(MAGIC)
    body.write(struct.pack("<I", bundle.format_version))
    body.write(_pack_section(_TAG_VECTORIZER, _vectorizer_payload(bundle.vectorizer)))
    body.write(_pack_section(_TAG_SCALER, _scaler_payload(bundle.scaler)))
    body.write(_pack_section(_TAG_NETWORK, _network_payload(bundle.network, dtype)))
    if bundle.forest is not None:
        body.write(_pack_section(_TAG_FOREST, _forest_payload(bundle.forest)))
    meta = json.dumps(
        bundle.metadata, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")
    body.write(_pack_section(_TAG_METADATA, meta))
    raw = body.getvalue()
    raw += struct.pack("<I", zlib.crc32(raw) & 0xFFFFFFFF)
    if hasattr(destination, "write"):
        destination.write(raw)
    else:
        with open(destination, "wb") as fh:
            fh.write(raw)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise BundleTruncationError(
                f"wanted {n} bytes at offset {self.pos}, have {len(self.data) - self.pos}"
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    @property
    def exhausted(self) -> bool:
        return self.pos >= len(self.data)


def _read_tree(r: _Reader) -> IsoNode:
    (kind,) = r.unpack("<B")
    if kind == 0:
        (size,) = r.unpack("<I")
        return IsoLeaf(size=size)
    if kind == 1:
        feature, value = r.unpack("<Id")
        left = _read_tree(r)
        right = _read_tree(r)
        return IsoSplit(feature=feature, value=value, left=left, right=right)
    raise BundleTruncationError(f"unknown tree node kind {kind}")


def _parse_vectorizer(payload: bytes) -> VectorizerConfig:
    nmin, nmax, nfeat, l2, signed = struct.unpack("<IIIBB", payload)
    return VectorizerConfig(
        ngram_min=nmin, ngram_max=nmax, n_features=nfeat,
        l2_normalize=bool(l2), signed=bool(signed),
    )


def _parse_scaler(payload: bytes) -> FeatureScaler:
    vals = np.frombuffer(payload, dtype="<f8")
    if vals.size != 8:
        raise BundleTruncationError("scaler section malformed")
    return FeatureScaler(mean=vals[:4].copy(), std=vals[4:].copy())


def _parse_network(payload: bytes) -> MlpModel:
    r = _Reader(payload)
    (width,) = r.unpack("<B")
    dtype = "<f4" if width == 4 else "<f8"
    (n_dims,) = r.unpack("<I")
    dims = list(r.unpack(f"<{n_dims}I"))
    activations = []
    for _ in range(n_dims - 1):
        (alen,) = r.unpack("<B")
        activations.append(r.take(alen).decode("utf-8"))
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        w = np.frombuffer(r.take(width * fan_in * fan_out), dtype=dtype)
        b = np.frombuffer(r.take(width * fan_out), dtype=dtype)
        weights.append(w.astype(np.float64).reshape(fan_in, fan_out))
        biases.append(b.astype(np.float64).copy())
    return MlpModel(
        layer_dims=dims, weights=weights, biases=biases, activations=activations
    )


def _parse_forest(payload: bytes) -> IsolationForestModel:
    r = _Reader(payload)
    n_trees, psi, sample_size, n_features, seed = r.unpack("<IIIIq")
    trees = [_read_tree(r) for _ in range(n_trees)]
    return IsolationForestModel(
        trees=trees, psi=psi, sample_size=sample_size,
        n_features=n_features, seed=seed,
    )


def load_bundle(source) -> ModelBundle:
    """Load from a path, bytes, or binary file object.

    Raises distinct errors for bad magic, unsupported version, checksum
    mismatch and truncation; never returns a partial model.
    """
    if isinstance(source, (bytes, bytearray)):
        raw = bytes(source)
    elif hasattr(source, "read"):
        raw = source.read()
    else:
        with open(source, "rb") as fh:
            raw = fh.read()

    if len(raw) < len(MAGIC) or raw[: len(MAGIC)] != MAGIC:
        raise BundleMagicError("stream does not begin with the bundle magic")
    if len(raw) < len(MAGIC) + 4:
        raise BundleTruncationError("stream ends inside the version field")
    (version,) = struct.unpack_from("<I", raw, len(MAGIC))
    if version != FORMAT_VERSION:
        raise BundleVersionError(f"unsupported format version {version}")
    if len(raw) < len(MAGIC) + 8:
        raise BundleTruncationError("stream too short for a checksum")
    (stored_crc,) = struct.unpack_from("<I", raw, len(raw) - 4)
    if zlib.crc32(raw[:-4]) & 0xFFFFFFFF != stored_crc:
        raise BundleChecksumError("CRC-32 mismatch: bundle corrupted")

    r = _Reader(raw[len(MAGIC) + 4 : -4])
    sections: dict[bytes, bytes] = {}
    while not r.exhausted:
        tag = r.take(4)
        (length,) = r.unpack("<Q")
        sections[tag] = r.take(length)

    for required in (_TAG_VECTORIZER, _TAG_SCALER, _TAG_NETWORK, _TAG_METADATA):
        if required not in sections:
            raise BundleTruncationError(f"missing section {required!r}")

    bundle = ModelBundle(
        vectorizer=_parse_vectorizer(sections[_TAG_VECTORIZER]),
        scaler=_parse_scaler(sections[_TAG_SCALER]),
        network=_parse_network(sections[_TAG_NETWORK]),
        forest=_parse_forest(sections[_TAG_FOREST]) if _TAG_FOREST in sections else None,
        metadata=json.loads(sections[_TAG_METADATA].decode("utf-8")),
        format_version=version,
    )
    bundle.validate()
    return bundle
