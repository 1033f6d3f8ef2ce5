import threading
import time
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from urlsentinel import (
    BenignGenConfig,
    Dataset,
    FeedFormatError,
    FeedStatusError,
    FeedTimeoutError,
    LabeledUrl,
    SplitConfig,
    dedup,
    fetch_feed,
    generate_benign,
    generate_malicious,
    load_dataset,
    normalize_url,
    parse_phishtank_csv,
    parse_urlhaus_text,
    save_dataset,
    stratified_split,
    synthetic_corpus,
)


class TestUrlhausParser:
    def test_comments_skipped(self):
        res = parse_urlhaus_text("# header\nhttp://evil.example/x\n")
        assert len(res.records) == 1
        assert res.records[0].label == 1
        assert res.records[0].source == "urlhaus"

    def test_empty_body(self):
        assert parse_urlhaus_text("").records == []

    def test_counts(self):
        body = "# c1\nhttp://a/1\nhttp://a/2\n# c2\nhttp://a/3\n\n"
        res = parse_urlhaus_text(body)
        assert len(res.records) == 3

    def test_crlf(self):
        res = parse_urlhaus_text("http://a/1\r\nhttp://a/2\r\n")
        assert len(res.records) == 2

    def test_totals_invariant(self):
        body = "# x\nhttp://ok/1\nbroken line with spaces\nhttp://ok/2\n"
        res = parse_urlhaus_text(body)
        assert len(res.records) + res.skipped == res.data_lines == 3
        assert res.skipped == 1


class TestPhishtankParser:
    def test_basic(self):
        res = parse_phishtank_csv("phish_id,url\n1,http://bad.example/\n")
        assert len(res.records) == 1
        assert res.records[0].label == 1
        assert res.records[0].source == "phishtank"

    def test_quoted_comma(self):
        res = parse_phishtank_csv('phish_id,url\n1,"http://bad.example/?a=1,2"\n')
        assert res.records[0].url == "http://bad.example/?a=1,2"

    def test_missing_url_column(self):
        with pytest.raises(FeedFormatError):
            parse_phishtank_csv("id,link\n1,http://x/\n")

    def test_totals_invariant(self):
        res = parse_phishtank_csv("url\nhttp://a/\n\nhttp://b/\n,\n")
        assert len(res.records) + res.skipped == res.data_lines


class TestBenignGenerator:
    def test_zero(self):
        assert generate_benign(0, BenignGenConfig()) == []

    def test_deterministic(self):
        cfg = BenignGenConfig(seed=99)
        assert generate_benign(100, cfg) == generate_benign(100, cfg)

    def test_properties_over_1000(self):
        cfg = BenignGenConfig(seed=5)
        records = generate_benign(1000, cfg)
        assert len(records) == 1000
        for rec in records:
            assert rec.label == 0
            assert rec.source == "synthetic"
            assert rec.url.startswith("https://")
            host = rec.url.split("/")[2]
            assert host in cfg.domains
            # survives normalization unchanged (already lowercase)
            assert normalize_url(rec.url) == rec.url

    def test_empty_domains_rejected(self):
        with pytest.raises(ValueError):
            BenignGenConfig(domains=())


class TestMaliciousGenerator:
    def test_labels_and_shape(self):
        records = generate_malicious(500, seed=2)
        assert len(records) == 500
        assert all(r.label == 1 for r in records)
        assert all(normalize_url(r.url) == r.url for r in records)

    def test_deterministic(self):
        assert generate_malicious(50, seed=4) == generate_malicious(50, seed=4)

    def test_pattern_mix(self):
        urls = [r.url for r in generate_malicious(400, seed=8)]
        assert any("%" in u for u in urls)  # encoded params
        assert any("@" in u for u in urls)  # credential trick
        assert any(u.split("/")[2].split(":")[0].replace(".", "").isdigit() for u in urls)


class TestDedup:
    def test_exact_duplicate(self):
        a = LabeledUrl(url="http://x.c/a", label=1, source="urlhaus")
        ds = dedup([a, a])
        assert len(ds) == 1

    def test_normalization_equal(self):
        recs = [
            LabeledUrl(url="HTTP://X.c", label=1, source="urlhaus"),
            LabeledUrl(url="http://x.c", label=1, source="phishtank"),
        ]
        ds = dedup(recs)
        assert len(ds) == 1
        assert ds.records[0].source == "urlhaus"  # first wins

    def test_bulk_against_set_oracle(self):
        base = [r.url for r in generate_malicious(9000, seed=1)]
        dup = base[:1000]
        records = [
            LabeledUrl(url=u, label=1, source="urlhaus") for u in base + dup
        ]
        ds = dedup(records)
        assert len(ds) == len({normalize_url(u) for u in base + dup})


class TestSplit:
    def _dataset(self, n_benign, n_malicious):
        recs = [
            LabeledUrl(url=f"https://b.example/{i}", label=0, source="synthetic")
            for i in range(n_benign)
        ] + [
            LabeledUrl(url=f"http://m.example/{i}", label=1, source="synthetic")
            for i in range(n_malicious)
        ]
        return Dataset(records=recs)

    def test_exact_arithmetic(self):
        train, test = stratified_split(self._dataset(10, 10), SplitConfig(seed=1))
        assert train.class_counts() == (8, 8)
        assert test.class_counts() == (2, 2)

    def test_deterministic(self):
        ds = self._dataset(50, 30)
        cfg = SplitConfig(seed=77)
        t1, e1 = stratified_split(ds, cfg)
        t2, e2 = stratified_split(ds, cfg)
        assert t1.records == t2.records
        assert e1.records == e2.records

    def test_paper_scale_counts(self):
        train, test = stratified_split(self._dataset(6000, 6000), SplitConfig(seed=3))
        assert train.class_counts() == (4800, 4800)
        assert test.class_counts() == (1200, 1200)

    def test_partition_property(self):
        ds = self._dataset(83, 47)
        for seed in range(5):
            for frac in (0.5, 0.7, 0.8):
                train, test = stratified_split(
                    ds, SplitConfig(train_fraction=frac, seed=seed)
                )
                assert len(train) + len(test) == len(ds)
                train_set = {r.url for r in train.records}
                test_set = {r.url for r in test.records}
                assert not train_set & test_set
                for cls, count in ((0, 83), (1, 47)):
                    got = sum(1 for r in train.records if r.label == cls)
                    assert abs(got - round(frac * count)) <= 1

    def test_single_class_stratified_raises(self):
        ds = self._dataset(10, 0)
        with pytest.raises(ValueError):
            stratified_split(ds, SplitConfig())

    def test_unstratified(self):
        ds = self._dataset(10, 0)
        train, test = stratified_split(ds, SplitConfig(stratified=False, seed=1))
        assert len(train) == 8 and len(test) == 2

    def test_bad_fraction(self):
        with pytest.raises(ValueError):
            SplitConfig(train_fraction=1.0)


class _FeedHandler(BaseHTTPRequestHandler):
    def do_GET(self):
        if self.path == "/ok":
            body = b"http://evil.example/1\nhttp://evil.example/2\n"
            self.send_response(200)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
        elif self.path == "/missing":
            self.send_response(404)
            self.send_header("Content-Length", "0")
            self.end_headers()
        elif self.path == "/slow":
            time.sleep(2.0)
            self.send_response(200)
            self.send_header("Content-Length", "0")
            self.end_headers()

    def log_message(self, *args):
        pass


@pytest.fixture
def feed_server():
    httpd = HTTPServer(("127.0.0.1", 0), _FeedHandler)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{httpd.server_address[1]}"
    httpd.shutdown()
    httpd.server_close()


class TestFetchFeed:
    def test_ok_roundtrip(self, feed_server):
        body = fetch_feed(feed_server + "/ok", timeout=5)
        assert len(parse_urlhaus_text(body).records) == 2

    def test_status_error(self, feed_server):
        with pytest.raises(FeedStatusError) as exc:
            fetch_feed(feed_server + "/missing", timeout=5)
        assert exc.value.status == 404

    def test_timeout_error(self, feed_server):
        with pytest.raises(FeedTimeoutError):
            fetch_feed(feed_server + "/slow", timeout=0.2)


class TestLocalDatasetFile:
    def test_roundtrip(self, tmp_path):
        ds = synthetic_corpus(20, 20, seed=9)
        path = tmp_path / "corpus.tsv"
        save_dataset(ds, str(path))
        loaded = load_dataset(str(path))
        assert [(r.url, r.label) for r in loaded.records] == [
            (r.url, r.label) for r in ds.records
        ]
        assert all(r.source == "user_file" for r in loaded.records)

    def test_bad_line(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("not a record\n")
        with pytest.raises(FeedFormatError):
            load_dataset(str(path))


class TestSyntheticCorpus:
    def test_exact_counts_and_uniqueness(self):
        ds = synthetic_corpus(500, 400, seed=3)
        assert ds.class_counts() == (500, 400)
        keys = {normalize_url(r.url) for r in ds.records}
        assert len(keys) == 900

    def test_deterministic(self):
        a = synthetic_corpus(100, 100, seed=6)
        b = synthetic_corpus(100, 100, seed=6)
        assert a.records == b.records
