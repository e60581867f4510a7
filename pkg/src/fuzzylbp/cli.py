"""Batch command line: synth -> extract -> bench.

    fuzzylbp synth   --out data/ --classes 10 --per-class 10
    fuzzylbp extract --root data/ --out run/
    fuzzylbp bench   --out run/

Every command also takes ``--config FILE``; flags given on the command line
override values from the file.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import synth
from .classify import save_model
from .config import RunConfig, parse_degrees, parse_descriptors, parse_dims
from .dataset import FeatureStore, load_features, save_features, scan
from .errors import FuzzyLbpError, ParameterError
from .evaluate import ClassifierConfig, run_protocol
from .features import DESCRIPTOR_NAMES, extract
from .image_io import load_gray
from .report import format_table, roc_table, summary_table, write_reports


def store_path(out, name: str) -> Path:
    return Path(out) / "features" / f"{DESCRIPTOR_NAMES[name].value}.flbp"


def report_dir(out) -> Path:
    return Path(out) / "report"


def _extraction_params(cfg: RunConfig, name: str) -> str:
    params = f"lbp={cfg.lbp_weights}"
    if DESCRIPTOR_NAMES[name].value == "RMS":
        params += f";iref={cfg.iref}"
    return params


def _extract_one(job):
    path, dims, kinds, lbp_weights, iref = job
    img = load_gray(path, *dims)
    values, seconds = [], []
    for kind in kinds:
        t0 = time.perf_counter()
        values.append(extract(img, kind, lbp_weights, iref).values)
        seconds.append(time.perf_counter() - t0)
    return values, seconds


def _pool_map(fn, jobs, workers: int):
    if workers <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order, so results do not depend on scheduling
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def cmd_extract(cfg: RunConfig, force: bool = False, log=print) -> list:
    if cfg.root is None:
        raise ParameterError("extract needs --root")
    manifest = scan(cfg.root, cfg.dims)
    todo = []
    for name in cfg.descriptors:
        path = store_path(cfg.out, name)
        if path.exists() and not force:
            log(f"{path}: exists, skipping (use --force to overwrite)")
        else:
            todo.append(name)
    written = []
    if todo:
        kinds = [DESCRIPTOR_NAMES[n] for n in todo]
        jobs = [(p, cfg.dims, kinds, cfg.lbp_weights, cfg.iref) for p in manifest.paths]
        results = _pool_map(_extract_one, jobs, cfg.workers)
        (Path(cfg.out) / "features").mkdir(parents=True, exist_ok=True)
        digest = manifest.digest()
        for k, name in enumerate(todo):
            matrix = np.stack([values[k] for values, _ in results])
            seconds = sum(sec[k] for _, sec in results)
            store = FeatureStore(
                DESCRIPTOR_NAMES[name].value,
                matrix,
                manifest.labels,
                cfg.dims,
                digest,
                _extraction_params(cfg, name),
            )
            path = store_path(cfg.out, name)
            save_features(store, path)
            written.append(path)
            log(f"{store.descriptor:8s} {matrix.shape[0]}x{matrix.shape[1]} features in {seconds:.2f}s -> {path}")
    Path(cfg.out).mkdir(parents=True, exist_ok=True)
    (Path(cfg.out) / "config.txt").write_text(cfg.to_text(), encoding="utf-8")
    return written


def _classifier_config(cfg: RunConfig) -> ClassifierConfig:
    return ClassifierConfig(
        degrees=cfg.svm_degrees,
        C=cfg.svm_c,
        gamma=cfg.svm_gamma,
        coef0=cfg.svm_coef0,
        tol=cfg.svm_tol,
        max_passes=cfg.svm_max_passes,
        knn_k=cfg.knn_k,
        kfold=cfg.kfold,
        seed=cfg.seed,
    )


def _bench_one(job):
    descriptor, values, labels, ccfg = job
    t0 = time.perf_counter()
    report = run_protocol(descriptor, values, labels, ccfg)
    return report, time.perf_counter() - t0


def cmd_bench(cfg: RunConfig, save_models: bool = False, log=print) -> list:
    paths = {name: store_path(cfg.out, name) for name in cfg.descriptors}
    missing = [str(p) for p in paths.values() if not p.exists()]
    if missing:
        raise FuzzyLbpError(f"missing feature stores (run extract first): {', '.join(missing)}")
    expected = scan(cfg.root, cfg.dims).digest() if cfg.root is not None else None
    stores = [load_features(p, expected) for p in paths.values()]
    first = stores[0]
    for s in stores[1:]:
        if s.manifest_hash != first.manifest_hash or not np.array_equal(s.labels, first.labels):
            raise FuzzyLbpError("feature stores come from different datasets; re-run extract with --force")

    ccfg = _classifier_config(cfg)
    jobs = [(s.descriptor, s.values, s.labels, ccfg) for s in stores]
    results = _pool_map(_bench_one, jobs, cfg.workers)
    reports = [r for r, _ in results]
    for r, seconds in results:
        log(f"{r.descriptor:8s} evaluated in {seconds:.2f}s")

    out = report_dir(cfg.out)
    written = write_reports(reports, out)
    (out / "config.txt").write_text(cfg.to_text(), encoding="utf-8")
    if save_models:
        (out / "models").mkdir(exist_ok=True)
        for r in reports:
            for name, model in r.models.items():
                path = out / "models" / f"{r.descriptor}_{name.split()[-1].lower()}.json"
                save_model(model, path)
                written.append(path)
    log("")
    log("Recognition rate (%), first-half split and k-fold")
    log(format_table(summary_table(reports, cfg.svm_degrees)))
    log("")
    log(format_table(roc_table(reports)))
    return written


def cmd_synth(out, n_classes: int, per_class: int, dims, seed: int, log=print) -> list:
    paths = synth.generate(out, n_classes, per_class, dims, seed)
    log(f"wrote {len(paths)} images in {n_classes} class folders under {out}")
    return paths


# --------------------------------------------------------------------------
# argument parsing


def _wrap(parse):
    def convert(text):
        try:
            return parse(text)
        except ParameterError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    convert.__name__ = parse.__name__.removeprefix("parse_")
    return convert


def _gamma(text):
    return "auto" if text == "auto" else float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuzzylbp", description="Fuzzy LBP feature extraction and evaluation")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file; flags override it")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int)
    common.add_argument("--dims", type=_wrap(parse_dims), help="target image size WxH (multiples of 3)")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--root", help="dataset root with one folder per class")
    data.add_argument("--descriptors", type=_wrap(parse_descriptors), help=f"comma list of {','.join(DESCRIPTOR_NAMES)}")
    data.add_argument("--workers", type=int, help="worker processes")

    p = sub.add_parser("extract", parents=[common, data], help="compute feature stores")
    p.add_argument("--lbp-weights", choices=("paper", "classic"))
    p.add_argument("--iref", choices=("avg", "min", "max"))
    p.add_argument("--force", action="store_true", help="overwrite existing stores")

    p = sub.add_parser("bench", parents=[common, data], help="train, evaluate and write reports")
    p.add_argument("--svm-c", type=float)
    p.add_argument("--svm-degrees", type=_wrap(parse_degrees))
    p.add_argument("--svm-gamma", type=_gamma, help="kernel scale, or 'auto' for 1/features")
    p.add_argument("--svm-coef0", type=float)
    p.add_argument("--svm-tol", type=float)
    p.add_argument("--svm-max-passes", type=int)
    p.add_argument("--knn-k", type=int)
    p.add_argument("--kfold", type=int, help="fold count, 0 disables k-fold")
    p.add_argument("--save-models", action="store_true", help="write split SVM models as JSON")

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic texture dataset")
    p.add_argument("--classes", type=int, default=10)
    p.add_argument("--per-class", type=int, default=10)
    return parser


_CONFIG_FLAGS = (
    "root", "dims", "descriptors", "lbp_weights", "iref", "svm_c", "svm_degrees", "svm_gamma",
    "svm_coef0", "svm_tol", "svm_max_passes", "knn_k", "kfold", "seed", "out", "workers",
)


def resolve_config(args) -> RunConfig:
    base = RunConfig.load(args.config) if args.config else RunConfig()
    overrides = {k: getattr(args, k, None) for k in _CONFIG_FLAGS}
    auto_gamma = overrides.get("svm_gamma") == "auto"
    if auto_gamma:
        overrides["svm_gamma"] = None
    cfg = base.with_overrides(**overrides)
    return replace(cfg, svm_gamma=None) if auto_gamma else cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "synth":
            out = args.out or cfg.out
            cmd_synth(out, args.classes, args.per_class, cfg.dims, cfg.seed)
        elif args.command == "extract":
            cmd_extract(cfg, force=args.force)
        else:
            cmd_bench(cfg, save_models=args.save_models)
    except (FuzzyLbpError, OSError) as exc:
        print(f"fuzzylbp: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
