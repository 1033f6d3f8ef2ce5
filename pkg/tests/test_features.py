import math
import random
from collections import Counter

import numpy as np
import pytest

from urlsentinel import (
    DegenerateInputError,
    FeatureScaler,
    VectorizerConfig,
    char_ngrams,
    featurize,
    fit_scaler,
    fnv1a_32,
    hash_vectorize,
    normalize_url,
    shannon_entropy,
    stat_features,
)
from urlsentinel.features import ngram_count


def ref_fnv1a(data: bytes) -> int:
    """Independent FNV-1a 32 evaluation for hash oracle checks."""
    h = 0x811C9DC5
    for byte in data:
        h = ((h ^ byte) * 0x01000193) % (1 << 32)
    return h


class TestNormalize:
    def test_lowercases(self):
        assert normalize_url("HTTP://Example.COM/A") == "http://example.com/a"

    def test_strips_whitespace(self):
        assert normalize_url("  http://a.b  ") == "http://a.b"

    def test_truncates(self):
        assert normalize_url("a" * 500, max_len=200) == "a" * 200

    def test_removes_control_chars(self):
        assert normalize_url("http://a\x00\x1f.b\x7f/c") == "http://a.b/c"

    def test_preserves_specials(self):
        assert normalize_url("http://a/@=%?&") == "http://a/@=%?&"

    def test_empty_raises(self):
        with pytest.raises(DegenerateInputError):
            normalize_url("   ")
        with pytest.raises(DegenerateInputError):
            normalize_url("\x00\x01")

    def test_idempotent_random(self):
        rng = random.Random(42)
        alphabet = [chr(c) for c in range(256)] + ["Ü", "ß", "İ", "ا"]
        for _ in range(300):
            s = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 240)))
            try:
                once = normalize_url(s)
            except DegenerateInputError:
                continue
            assert normalize_url(once) == once
            assert len(once) <= 200
            assert not any("A" <= ch <= "Z" for ch in once)


class TestEntropy:
    def test_single_symbol(self):
        assert shannon_entropy("aaaa") == 0.0

    def test_two_equiprobable(self):
        assert shannon_entropy("abab") == 1.0

    def test_against_frequency_oracle(self):
        s = "http://x.co/q?id=1"
        counts = Counter(s)
        expected = -sum(
            (c / len(s)) * math.log2(c / len(s)) for c in counts.values()
        )
        assert abs(shannon_entropy(s) - expected) < 1e-12

    def test_bounds_random(self):
        rng = random.Random(7)
        for _ in range(200):
            s = "".join(rng.choice("abcdefgh012./:") for _ in range(rng.randint(1, 80)))
            h = shannon_entropy(s)
            assert 0.0 <= h <= math.log2(len(set(s))) + 1e-12
            assert (h == 0.0) == (len(set(s)) == 1)

    def test_empty_raises(self):
        with pytest.raises(DegenerateInputError):
            shannon_entropy("")


class TestStatFeatures:
    def test_counts(self):
        st = stat_features("http://a.b.c/d")
        assert (st.length, st.dot_count, st.slash_count) == (14, 2, 3)

    def test_entropy_of_constant(self):
        assert stat_features("aaaa").entropy == 0.0

    def test_against_scan_oracle(self):
        u = "http://google.com/search?q=x"
        length = sum(1 for _ in u)
        dots = sum(1 for ch in u if ch == ".")
        slashes = sum(1 for ch in u if ch == "/")
        counts = Counter(u)
        ent = -sum((c / length) * math.log2(c / length) for c in counts.values())
        st = stat_features(u)
        assert st.length == length
        assert st.dot_count == dots
        assert st.slash_count == slashes
        assert abs(st.entropy - ent) < 1e-12


class TestCharNgrams:
    def test_enumeration(self):
        cfg = VectorizerConfig(ngram_min=2, ngram_max=3)
        assert char_ngrams("abc", cfg) == ["ab", "bc", "abc"]

    def test_too_short(self):
        assert char_ngrams("a", VectorizerConfig()) == []

    def test_count_identity_random(self):
        cfg = VectorizerConfig()
        rng = random.Random(3)
        for _ in range(100):
            u = "".join(rng.choice("abcxyz./") for _ in range(rng.randint(0, 60)))
            if not u:
                continue
            grams = char_ngrams(u, cfg)
            expected = sum(max(0, len(u) - n + 1) for n in range(2, 6))
            assert len(grams) == expected == ngram_count(len(u), cfg)

    def test_bad_config(self):
        with pytest.raises(ValueError):
            VectorizerConfig(ngram_min=0)
        with pytest.raises(ValueError):
            VectorizerConfig(ngram_min=4, ngram_max=2)
        with pytest.raises(ValueError):
            VectorizerConfig(n_features=0)


class TestHashVectorize:
    def test_single_ngram_bucket(self):
        cfg = VectorizerConfig(l2_normalize=False)
        hv = hash_vectorize("ab", cfg)
        assert hv.entries == ((ref_fnv1a(b"ab") % 1000, 1.0),)

    def test_fnv_reference_vectors(self):
        # classic published FNV-1a values
        assert fnv1a_32(b"") == 0x811C9DC5
        assert fnv1a_32(b"a") == 0xE40C292C
        assert fnv1a_32(b"foobar") == 0xBF9CF968
        for s in [b"ab", b"http://x", "ü".encode()]:
            assert fnv1a_32(s) == ref_fnv1a(s)

    def test_manual_accumulation(self):
        cfg = VectorizerConfig(ngram_min=2, ngram_max=3, l2_normalize=False)
        hv = hash_vectorize("aaa", cfg)
        # "aa" occurs twice, "aaa" once; sum if the buckets collide
        expected = {}
        for g in ["aa", "aa", "aaa"]:
            b = ref_fnv1a(g.encode()) % 1000
            expected[b] = expected.get(b, 0.0) + 1.0
        assert dict(hv.entries) == expected

    def test_empty_string_zero_vector(self):
        hv = hash_vectorize("", VectorizerConfig())
        assert hv.entries == ()

    def test_l2_norm(self):
        hv = hash_vectorize("http://example.com/path", VectorizerConfig())
        norm = math.sqrt(sum(w * w for _, w in hv.entries))
        assert abs(norm - 1.0) < 1e-9

    def test_collision_conservation_random(self):
        cfg = VectorizerConfig(n_features=50, l2_normalize=False)
        rng = random.Random(11)
        for _ in range(50):
            u = "".join(rng.choice("abc./:%=") for _ in range(rng.randint(2, 120)))
            hv = hash_vectorize(u, cfg)
            total = sum(w for _, w in hv.entries)
            assert total == ngram_count(len(u), cfg)
            assert all(0 <= i < 50 for i, _ in hv.entries)
            assert all(w >= 0 for _, w in hv.entries)

    def test_indices_strictly_increasing(self):
        hv = hash_vectorize("http://example.com/q?a=1", VectorizerConfig())
        idx = [i for i, _ in hv.entries]
        assert idx == sorted(set(idx))

    def test_non_ascii_matches_per_ngram_reference(self):
        cfg = VectorizerConfig(n_features=97, l2_normalize=False)
        u = "http://exämple.com/ü"
        hv = hash_vectorize(u, cfg)
        expected = np.zeros(97)
        for g in char_ngrams(u, cfg):
            expected[ref_fnv1a(g.encode("utf-8")) % 97] += 1.0
        assert np.array_equal(hv.to_dense(), expected)

    def test_deterministic(self):
        cfg = VectorizerConfig()
        a = hash_vectorize("http://x.co/q?id=1", cfg)
        b = hash_vectorize("http://x.co/q?id=1", cfg)
        assert a == b

    def test_signed_mode(self):
        cfg = VectorizerConfig(n_features=64, l2_normalize=False, signed=True)
        u = "http://example.com/q?a=1"
        hv = hash_vectorize(u, cfg)
        expected = np.zeros(64)
        for g in char_ngrams(u, cfg):
            h = ref_fnv1a(g.encode())
            expected[h % 64] += -1.0 if h >> 31 else 1.0
        assert np.array_equal(hv.to_dense(), expected)
        assert any(w < 0 for _, w in hv.entries)  # signs actually mix


class TestScaler:
    def test_single_sample(self):
        st = stat_features("http://a.b/c")
        scaler = fit_scaler([st])
        assert np.array_equal(scaler.mean, st.as_array())
        assert np.array_equal(scaler.std, np.ones(4))

    def test_two_point_population_std(self):
        a = stat_features("aa")  # length 2
        b = stat_features("aaaa")  # length 4
        scaler = fit_scaler([a, b])
        assert scaler.mean[0] == 3.0
        assert scaler.std[0] == 1.0  # population std of {2, 4}

    def test_against_two_pass_oracle(self):
        rng = random.Random(5)
        samples = []
        for _ in range(100):
            u = "".join(rng.choice("abcdef./:") for _ in range(rng.randint(5, 150)))
            samples.append(stat_features(u))
        scaler = fit_scaler(samples)
        cols = list(zip(*[s.as_array() for s in samples]))
        for j, col in enumerate(cols):
            mean = sum(col) / len(col)
            var = sum((v - mean) ** 2 for v in col) / len(col)
            std = math.sqrt(var) if var > 0 else 1.0
            assert abs(scaler.mean[j] - mean) < 1e-10
            assert abs(scaler.std[j] - std) < 1e-10

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            fit_scaler([])


class TestFeaturize:
    def test_stats_at_mean_are_zero(self):
        u = "http://a.b/c"
        scaler = fit_scaler([stat_features(u)])
        vec = featurize(u, VectorizerConfig(), scaler)
        assert np.array_equal(vec[:4], np.zeros(4))

    def test_length(self):
        cfg = VectorizerConfig(n_features=256)
        scaler = fit_scaler([stat_features("http://a.b/c")])
        vec = featurize("http://a.b/c", cfg, scaler)
        assert vec.shape == (260,)
        assert np.all(np.isfinite(vec))

    def test_sparse_dense_equivalence(self):
        cfg = VectorizerConfig()
        urls = ["http://a.b/c", "https://github.com/x/y?q=1", "http://1.2.3.4/%2fz"]
        scaler = fit_scaler([stat_features(u) for u in urls])
        for u in urls:
            dense_tail = featurize(u, cfg, scaler)[4:]
            assert np.array_equal(hash_vectorize(u, cfg).to_dense(), dense_tail)

    def test_bit_identical_across_calls(self):
        cfg = VectorizerConfig()
        scaler = FeatureScaler(mean=np.array([10.0, 1, 2, 3.5]), std=np.ones(4))
        v1 = featurize("http://x.co/q?id=1", cfg, scaler)
        v2 = featurize("http://x.co/q?id=1", cfg, scaler)
        assert np.array_equal(v1, v2)
