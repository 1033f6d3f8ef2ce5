"""Command-line interface.

Verbs: fetch-data, gen-benign, train, evaluate, predict, batch, serve, bench.
Configuration comes from a JSON file (--config or the URLSENTINEL_CONFIG
environment variable) with per-flag overrides. Exit code 0 on success,
nonzero on any stage failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import ingest
from .errors import UrlSentinelError
from .ingest import (
    BenignGenConfig,
    Dataset,
    PHISHTANK_FEED,
    URLHAUS_FEED,
    dedup,
    fetch_feed,
    generate_benign,
    load_dataset,
    parse_phishtank_csv,
    parse_urlhaus_text,
    save_dataset,
    synthetic_corpus,
)
from .metrics import evaluate
from .model_store import load_bundle, save_bundle
from .neuralnet import predict_proba_batch
from .pipeline import (
    PipelineConfig,
    classify_batch,
    classify_url,
    run_bench,
    train_pipeline,
)
from .service import serve_http

log = logging.getLogger("urlsentinel")


def _load_config(path: str | None, seed: int | None) -> PipelineConfig:
    path = path or os.environ.get("URLSENTINEL_CONFIG")
    if path:
        with open(path, encoding="utf-8") as fh:
            cfg = PipelineConfig.from_dict(json.load(fh))
    else:
        cfg = PipelineConfig()
    if seed is not None:
        cfg = PipelineConfig.from_dict({**cfg.to_dict(), "seed": seed})
    return cfg


def _dataset_from_args(args, cfg: PipelineConfig) -> Dataset:
    if getattr(args, "data", None):
        return dedup(load_dataset(args.data).records, seed=cfg.seed)
    log.info(
        "no --data given: generating synthetic corpus (%d benign + %d malicious)",
        args.benign, args.malicious,
    )
    return synthetic_corpus(args.benign, args.malicious, seed=cfg.seed)


def cmd_fetch_data(args) -> int:
    records = []
    if args.urlhaus_file:
        with open(args.urlhaus_file, encoding="utf-8") as fh:
            records += parse_urlhaus_text(fh.read()).records
    elif args.urlhaus:
        records += parse_urlhaus_text(fetch_feed(args.urlhaus, args.timeout)).records
    if args.phishtank_file:
        with open(args.phishtank_file, encoding="utf-8") as fh:
            records += parse_phishtank_csv(fh.read()).records
    elif args.phishtank:
        records += parse_phishtank_csv(fetch_feed(args.phishtank, args.timeout)).records
    if args.benign > 0:
        records += generate_benign(args.benign, BenignGenConfig(seed=args.seed or 0))
    ds = dedup(records)
    save_dataset(ds, args.out)
    print(f"wrote {len(ds)} records to {args.out}")
    return 0


def cmd_gen_benign(args) -> int:
    records = generate_benign(args.count, BenignGenConfig(seed=args.seed or 0))
    save_dataset(Dataset(records=records), args.out)
    print(f"wrote {len(records)} benign URLs to {args.out}")
    return 0


def cmd_train(args) -> int:
    cfg = _load_config(args.config, args.seed)
    ds = _dataset_from_args(args, cfg)
    bundle, report = train_pipeline(ds, cfg)
    save_bundle(bundle, args.out, float32=args.float32)
    print(report.to_text())
    print(f"model written to {args.out}")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
    return 0


def cmd_evaluate(args) -> int:
    bundle = load_bundle(args.model)
    ds = load_dataset(args.data)
    from .features import featurize_all, normalize_url

    urls = [normalize_url(r.url) for r in ds.records]
    labels = [r.label for r in ds.records]
    x = featurize_all(urls, bundle.vectorizer, bundle.scaler)
    scores = predict_proba_batch(bundle.network, x)
    report = evaluate(scores, labels)
    print(report.to_text())
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
    return 0


def cmd_predict(args) -> int:
    bundle = load_bundle(args.model)
    result = classify_url(args.url, bundle)
    if args.json:
        print(json.dumps(result.to_dict(), ensure_ascii=False))
    else:
        print(f"{result.label}\t{result.score:.4f}\t{args.url}")
    return 0


def cmd_batch(args) -> int:
    bundle = load_bundle(args.model)
    batch = classify_batch(args.input, bundle)
    out = sys.stdout if args.output == "-" else open(args.output, "w", encoding="utf-8")
    try:
        for res in batch.results:
            out.write(json.dumps(res.to_dict(), ensure_ascii=False) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    for lineno, msg in batch.line_errors:
        print(f"line {lineno}: {msg}", file=sys.stderr)
    print(
        f"classified {len(batch.results)} URLs, "
        f"{len(batch.line_errors)} line errors",
        file=sys.stderr,
    )
    return 0


def cmd_serve(args) -> int:
    bundle = load_bundle(args.model) if args.model else None
    server = serve_http(bundle, args.bind, worker_count=args.workers)
    host, port = server.address
    print(f"serving on http://{host}:{port} (ctrl-c to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.stop()
    return 0


def cmd_bench(args) -> int:
    cfg = _load_config(args.config, args.seed)
    ds = _dataset_from_args(args, cfg)
    report = run_bench(cfg, ds)
    print(report.to_text())
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="urlsentinel",
        description="Hybrid malicious-URL detector: train, evaluate, predict, serve.",
    )
    parser.add_argument("--verbose", "-v", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON pipeline config (or URLSENTINEL_CONFIG)")
        p.add_argument("--seed", type=int, help="master seed override")

    p = sub.add_parser("fetch-data", help="pull threat feeds into a local TSV corpus")
    p.add_argument("--urlhaus", default=URLHAUS_FEED, help="URLHaus text feed URL")
    p.add_argument("--phishtank", default=PHISHTANK_FEED, help="PhishTank CSV feed URL")
    p.add_argument("--urlhaus-file", help="parse a local URLHaus text dump instead")
    p.add_argument("--phishtank-file", help="parse a local PhishTank CSV instead")
    p.add_argument("--benign", type=int, default=0, help="also generate N benign URLs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timeout", type=float, default=30.0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_fetch_data)

    p = sub.add_parser("gen-benign", help="generate synthetic benign URLs")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gen_benign)

    p = sub.add_parser("train", help="train the full pipeline and save a bundle")
    common(p)
    p.add_argument("--data", help="TSV corpus; omit to use a synthetic corpus")
    p.add_argument("--benign", type=int, default=6000)
    p.add_argument("--malicious", type=int, default=6000)
    p.add_argument("--out", default="model.usnl")
    p.add_argument("--report", help="also write the metrics report as JSON")
    p.add_argument("--float32", action="store_true", help="store parameters as 32-bit")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a saved model on a TSV corpus")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--report")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("predict", help="classify one URL")
    p.add_argument("--model", required=True)
    p.add_argument("--url", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_predict)

    p = sub.add_parser("batch", help="classify a file of URLs, one per line")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", default="-", help="JSONL output path, '-' for stdout")
    p.set_defaults(fn=cmd_batch)

    p = sub.add_parser("serve", help="run the HTTP prediction service")
    p.add_argument("--model", help="bundle to serve; /health answers 503 without one")
    p.add_argument("--bind", default="127.0.0.1:8080")
    p.add_argument("--workers", type=int, default=8)
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("bench", help="measure the pipeline cost model")
    common(p)
    p.add_argument("--data")
    p.add_argument("--benign", type=int, default=2000)
    p.add_argument("--malicious", type=int, default=2000)
    p.add_argument("--report")
    p.set_defaults(fn=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        return args.fn(args)
    except (UrlSentinelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
