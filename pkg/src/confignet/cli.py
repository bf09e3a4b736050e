"""Command-line entry point: ``confignet {train,bench,synth,predict}``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import bench, kernels
from .dataset import GENERATORS, denormalize_targets, normalize_inputs, save_csv
from .harness import DataSpec, dumps, run_trials, train, write_residual_csv
from .network import NetworkModel

EXIT_OK, EXIT_TRAINING_FAILURE, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("confignet")


class UsageError(Exception):
    pass


def _read_json(path):
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"file not found: {p}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{p}: invalid JSON ({exc})") from None


def cmd_train(args):
    cfg = _read_json(args.config)
    if "dataset" not in cfg or "algorithm" not in cfg:
        raise UsageError("config needs 'algorithm' and 'dataset'")
    data = DataSpec.from_dict(cfg["dataset"], base_dir=Path(args.config).parent)
    if data.path and not Path(data.path).is_file():
        raise UsageError(f"dataset file not found: {data.path}")
    trials = int(cfg.get("trials", 1))
    base_seed = int(cfg.get("base_seed", 0))
    node_count = cfg.get("node_count")
    res = run_trials(data, cfg, trials, base_seed, node_count=node_count, label=cfg["algorithm"])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(dumps(res.to_dict()))
    write_residual_csv([res], out / "residuals.csv")
    (out / "timings.json").write_text(json.dumps({"wall_time_seconds": res.timings}))

    # deployable model from the first trial, with the normalization it expects
    tr, _ = data.trial_data(base_seed, data.load())
    model, _ = train(tr, cfg, base_seed, node_count)
    doc = model.to_dict()
    doc["normalization"] = {k: np.asarray(v).tolist() for k, v in tr.norm_meta.items()}
    (out / "model.json").write_text(json.dumps(doc))
    s = res.summary
    print(f"{res.algorithm}: {len(res.trials)} trial(s), {len(res.failed_trials)} failed")
    for key in ("nodes_used", "train_rmse", "test_rmse", "train_accuracy", "test_accuracy"):
        if key in s:
            print(f"  {key:15s} AVE {s[key]['ave']:.4f}  DEV {s[key]['dev']:.4f}")
    print(f"report written to {out / 'report.json'}")
    return EXIT_TRAINING_FAILURE if res.failed_trials else EXIT_OK


def cmd_bench(args):
    if args.data_dir is not None and not Path(args.data_dir).is_dir():
        raise UsageError(f"data directory not found: {args.data_dir}")
    try:
        results, skipped = bench.run_suite(args.suite, args.data_dir, args.trials, args.base_seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = bench.table_rows(args.suite, results)
    report = {
        "suite": args.suite,
        "trials": args.trials,
        "base_seed": args.base_seed,
        "skipped_missing_data": skipped,
        "results": [r.to_dict() for r in results],
    }
    (out / f"{args.suite}.json").write_text(dumps(report))
    bench.write_table_csv(rows, out / f"{args.suite}_table.csv")
    write_residual_csv(results, out / f"{args.suite}_residuals.csv")
    (out / f"{args.suite}_timings.json").write_text(
        json.dumps({f"{r.label}/{r.algorithm}": r.timings for r in results}, indent=1)
    )
    print(bench.format_table(rows))
    if skipped:
        print(f"skipped (no CSV in data dir): {', '.join(skipped)}")
    print(f"kernel backend: {kernels.BACKEND}; report written to {out / (args.suite + '.json')}")
    failed = any(r.failed_trials for r in results)
    return EXIT_TRAINING_FAILURE if failed and args.strict else EXIT_OK


def cmd_synth(args):
    ds = GENERATORS[args.which](args.n, args.seed)
    save_csv(ds, args.out)
    print(f"wrote {ds.n} rows to {args.out}")
    return EXIT_OK


def cmd_predict(args):
    doc = _read_json(args.model)
    model = NetworkModel.from_dict(doc)
    path = Path(args.data)
    if not path.is_file():
        raise UsageError(f"data file not found: {path}")
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows:
        try:
            [float(c) for c in rows[0][: model.d]]
        except ValueError:
            rows = rows[1:]
    try:
        X = np.array([[float(c) for c in r[: model.d]] for r in rows]).reshape(-1, model.d)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None
    meta = doc.get("normalization")
    if meta:
        meta = {k: np.asarray(v) for k, v in meta.items()}
        X = normalize_inputs(X, meta)
    Y = model.predict(X)
    if meta:
        Y = denormalize_targets(Y, meta)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"y{q + 1}" for q in range(model.m)])
        for row in Y:
            w.writerow([repr(float(v)) for v in row])
    print(f"wrote {len(Y)} predictions to {args.out}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="confignet", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train from a JSON config")
    t.add_argument("--config", required=True)
    t.add_argument("--out", default="confignet_out")
    t.set_defaults(func=cmd_train)

    b = sub.add_parser(
        "bench",
        help="run a comparison suite",
        description="Run IRVFLN / SCN / OSCN side by side. Note that sigma is compared "
        "against the unnormalized norm of the orthogonalized activation vector, so its "
        "effective strictness scales with sqrt(N).",
    )
    b.add_argument("--suite", required=True, choices=bench.SUITES)
    b.add_argument("--data-dir", default=None, help="directory holding <name>.csv files")
    b.add_argument("--trials", type=int, default=50)
    b.add_argument("--base-seed", type=int, default=0)
    b.add_argument("--out", default="bench_out")
    b.add_argument("--strict", action="store_true", help="exit 1 if any trial failed")
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("synth", help="write a synthetic dataset as CSV")
    s.add_argument("--which", required=True, choices=sorted(GENERATORS))
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    q = sub.add_parser("predict", help="evaluate a saved model on a CSV")
    q.add_argument("--model", required=True)
    q.add_argument("--data", required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_predict)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
