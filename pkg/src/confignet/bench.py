"""Benchmark suites with reference results for side-by-side comparison.

Each suite is a list of cases; a case pairs a data source with per-algorithm
settings. Reference numbers travel with the cases so the emitted
table can show them side by side.
"""
from __future__ import annotations

import csv
from pathlib import Path

from .harness import DataSpec, run_trials

# name: (train, test, stop RMSE, L_max, IRVFLN scope, SCN scope, OSCN scope)
REGRESSION_CASES = {
    "abalone": (2000, 2177, 0.09, 10, "1", "1:0.5:10", "1:0.5:10"),
    "forestfire": (300, 217, 0.06, 150, "1", "1:0.5:10", "1:0.5:10"),
    "concrete": (772, 258, 0.05, 250, "1", "1:5:50", "1:5:50"),
    "winequality": (3428, 1470, 0.13, 10, "10", "10:5:50", "10:5:50"),
    "compactiv": (6144, 2048, 0.05, 50, "10", "10:1:20", "10:1:20"),
    "stock": (750, 200, 0.11, 10, "10", "1:0.5:10", "1:0.5:10"),
    "plastic": (1320, 330, 0.07, 200, "10", "10:1:20", "10:1:20"),
    "pumadyn": (6553, 1639, 0.09, 100, "10", "10:1:20", "10:1:20"),
    "mortgage": (839, 210, 0.05, 250, "1", "1:5:50", "1:5:50"),
    "ankara": (1287, 322, 0.09, 10, "1", "1:0.5:10", "1:0.5:10"),
}

# reference (nodes, train AVE, train DEV, test AVE, test DEV) per algorithm; None = unavailable
REGRESSION_REFERENCE = {
    "abalone": {"irvfln": (10, .1234, .0153, .1209, .0152), "sc3": (4.6, .0886, .0011, .0881, .0027), "oscn": (3.84, .0885, .0010, .0878, None)},
    "forestfire": {"irvfln": (150, .0712, 7.46e-5, .0315, .0408), "sc3": (120.04, .0598, .0010, .1077, .0252), "oscn": (98.02, .0599, .0001, .0481, .0012)},
    "concrete": {"irvfln": (250, .1479, .0059, .1629, .0058), "sc3": (172.66, .0499, .0001, .1169, .0216), "oscn": (156.64, .0499, .0001, .1029, .0055)},
    "winequality": {"irvfln": (10, .1949, .0487, .2574, .3712), "sc3": (7.78, .1295, .0012, .1303, .0044), "oscn": (6.36, .1292, .0007, .1289, .0012)},
    "compactiv": {"irvfln": (50, .1941, .0767, .2505, .2085), "sc3": (43.8, .0494, .0009, .0771, .0905), "oscn": (22.86, .0493, .0008, .0636, .0415)},
    "stock": {"irvfln": (10, .1478, .0325, .2062, .2334), "sc3": (8.25, .1054, .0006, .1158, .0982), "oscn": (7.31, .1047, .0004, .1011, .0930)},
    "plastic": {"irvfln": (200, .1507, .0033, .1825, .1226), "sc3": (162.48, .0632, .0014, .0847, .0511), "oscn": (132.72, .0524, .0002, .0768, .0517)},
    "pumadyn": {"irvfln": (100, .1390, .0228, .1271, .0325), "sc3": (96.62, .0622, .0010, .0896, .0025), "oscn": (75.42, .0772, .0004, .0839, .0012)},
    "mortgage": {"irvfln": (250, .1254, .0047, .1552, .0079), "sc3": (168.89, .0478, .0009, .0758, .0036), "oscn": (156, .0485, .0001, .0426, .0023)},
    "ankara": {"irvfln": (10, .0920, .0151, .0924, .0163), "sc3": (7.56, .0812, .0010, .0809, .0044), "oscn": (4.2, .0743, .0012, .0779, .0032)},
}

# name: (train, test, classes, L_max, IRVFLN scope, SCN/OSCN scope, T_max, sigma)
CLASSIFICATION_CASES = {
    "iris": (120, 30, 3, 10, "0.5", "0.5:0.5:10", 10, 1e-6),
    "breast": (340, 229, 2, 50, "1", "1:0.5:10", 10, 1e-4),
    "pima": (537, 231, 2, 50, "1", "1:0.5:50", 10, 1e-4),
    "satimage": (4504, 1931, 6, 200, "1", "1:1:10", 10, 1e-4),
    "pageblocks": (1315, 800, 5, 200, "1", "1:1:10", 10, 1e-6),
    "banana": (3200, 800, 2, 150, "1", "1:1:10", 10, 1e-6),
    "segment": (2079, 231, 7, 200, "2", "1:1:10", 10, 1e-6),
    "vehicle": (716, 80, 4, 100, "1", "1:1:10", 10, 1e-6),
    "penbased": (9490, 1050, 10, 300, "1", "1:1:10", 10, 1e-6),
    "imagesegmentation": (1386, 924, 7, 200, "1", "1:1:10", 10, 1e-6),
}

# reference (train acc AVE, DEV, test acc AVE, DEV)
CLASSIFICATION_REFERENCE = {
    "iris": {"irvfln": (.4921, .1838, .4806, .1732), "sc3": (.9823, .0052, .9360, .0334), "oscn": (.9805, .0047, .9413, .0432)},
    "breast": {"irvfln": (.9204, .0198, .9286, .0223), "sc3": (.9898, .0035, .9549, .0101), "oscn": (.9928, .0032, .9593, .0088)},
    "pima": {"irvfln": (.6572, .0043, .6439, .0068), "sc3": (.8102, .0057, .7677, .0115), "oscn": (.8140, .0057, .7720, .0132)},
    "satimage": {"irvfln": (.7626, .0151, .7795, .0151), "sc3": (.9121, .0018, .8819, .0036), "oscn": (.9165, .0026, .8857, .0032)},
    "pageblocks": {"irvfln": (.9624, .0027, .8750, .0150), "sc3": (.9673, .0043, .8862, .0076), "oscn": (.9722, .0016, .8869, .0133)},
    "banana": {"irvfln": (.8325, .0036, .7923, .0152), "sc3": (.9000, .0024, .8963, .0025), "oscn": (.9006, .0020, .8978, .0016)},
    "segment": {"irvfln": (.9596, .0018, .8961, .0064), "sc3": (.9702, .0021, .9134, .0042), "oscn": (.9822, .0019, .9394, .0031)},
    "vehicle": {"irvfln": (.8743, .0091, .7625, .0347), "sc3": (.9018, .0088, .8455, .0275), "oscn": (.9134, .0057, .8750, .0177)},
    "penbased": {"irvfln": (.9934, .0005, .9923, .0032), "sc3": (.9942, .0005, .9930, .0024), "oscn": (.9953, .0002, .9933, .0015)},
    "imagesegmentation": {"irvfln": (.7813, .0068, .7182, .0067), "sc3": (.9773, .0019, .9498, .0053), "oscn": (.9800, .0017, .9528, .0051)},
}

TABLE1_REFERENCE = {
    "irvfln": (100, .1253, .0062, .1255, .0062),
    "sc3": (25.46, .0438, .0063, .0437, .0063),
    "oscn": (15.75, .0429, .0061, .0428, .0060),
}

TABLE2_REFERENCE = {
    # (algorithm, output): {nodes: (AVE, DEV)}
    ("irvfln", 1): {4: (.3502, .1202), 6: (.3207, .1071), 8: (.3022, .1127)},
    ("irvfln", 2): {4: (.3477, .0263), 6: (.3232, .0307), 8: (.3149, .0315)},
    ("sc3", 1): {4: (.1442, .0311), 6: (.1221, .0281), 8: (.1047, .0220)},
    ("sc3", 2): {4: (.2561, .0474), 6: (.2050, .0404), 8: (.1688, .0344)},
    ("oscn", 1): {4: (.1426, .0305), 6: (.1113, .0217), 8: (.0897, .0169)},
    ("oscn", 2): {4: (.2215, .0425), 6: (.1692, .0326), 8: (.1273, .0306)},
}

SUITES = ("table1", "table2", "regression", "classification")


def table1_cases():
    data = {"synth": "eq26", "n": 1000, "split": {"train": 800, "test": 200}}
    common = {"epsilon": 0.05, "L_max": 100}
    algos = [
        {"algorithm": "irvfln", "lambda_grid": [150.0], **common},
        {"algorithm": "sc3", "T_max": 20, "lambda_grid": "150:10:200", "r": 0.999, **common},
        {"algorithm": "oscn", "T_max": 20, "lambda_grid": "150:10:200", "sigma": 1e-6, **common},
    ]
    return [("eq26", data, algos, None)]


def table2_cases():
    data = {"synth": "eq27", "n": 1000, "split": {"train": 600, "test": 400}}
    algos = [
        {"algorithm": "irvfln", "lambda_grid": [10.0]},
        {"algorithm": "sc3", "T_max": 10, "lambda_grid": "10:5:50", "r": 0.999},
        {"algorithm": "oscn", "T_max": 10, "lambda_grid": "10:5:50", "sigma": 1e-8},
    ]
    return [(f"eq27-{k}", data, algos, k) for k in (4, 6, 8)]


def regression_cases(data_dir):
    out = []
    for name, (n_tr, n_te, eps, L_max, s_irv, s_scn, s_oscn) in REGRESSION_CASES.items():
        path = Path(data_dir) / f"{name}.csv"
        data = {"path": str(path), "task": "regression", "split": {"train": n_tr, "test": n_te, "seed": 0}}
        common = {"epsilon": eps, "L_max": L_max}
        algos = [
            {"algorithm": "irvfln", "lambda_grid": s_irv, **common},
            {"algorithm": "sc3", "T_max": 10, "lambda_grid": s_scn, "r": 0.999, **common},
            {"algorithm": "oscn", "T_max": 10, "lambda_grid": s_oscn, "sigma": 1e-6, **common},
        ]
        out.append((name, data, algos, None))
    return out


def classification_cases(data_dir):
    out = []
    for name, (n_tr, n_te, _, L_max, s_irv, s_sc, t_max, sigma) in CLASSIFICATION_CASES.items():
        path = Path(data_dir) / f"{name}.csv"
        data = {"path": str(path), "task": "classification", "split": {"train": n_tr, "test": n_te, "seed": 0}}
        algos = [
            {"algorithm": "irvfln", "lambda_grid": s_irv, "L_max": L_max},
            {"algorithm": "sc3", "T_max": t_max, "lambda_grid": s_sc, "r": 0.999, "L_max": L_max},
            {"algorithm": "oscn", "T_max": t_max, "lambda_grid": s_sc, "sigma": sigma, "L_max": L_max},
        ]
        out.append((name, data, algos, None))
    return out


def suite_cases(suite, data_dir=None):
    if suite == "table1":
        return table1_cases()
    if suite == "table2":
        return table2_cases()
    if suite in ("regression", "classification"):
        if data_dir is None:
            raise ValueError(f"suite {suite!r} needs --data-dir")
        return regression_cases(data_dir) if suite == "regression" else classification_cases(data_dir)
    raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")


def run_suite(suite, data_dir=None, trials=50, base_seed=0, skip_missing=True):
    """Run every case of a suite; returns (results, skipped case names)."""
    results, skipped = [], []
    for name, data, algos, nodes in suite_cases(suite, data_dir):
        path = data.get("path")
        if path is not None and not Path(path).is_file():
            if not skip_missing:
                raise FileNotFoundError(f"dataset file not found: {path}")
            skipped.append(name)
            continue
        for algo in algos:
            res = run_trials(data, algo, trials, base_seed, node_count=nodes, label=name)
            results.append(res)
    return results, skipped


def _fmt(x):
    if x is None:
        return "n/a"
    if isinstance(x, float):
        return f"{x:.4f}"
    return str(x)


def _stat(res, key):
    s = res.summary.get(key)
    return (s["ave"], s["dev"]) if s else (None, None)


def table_rows(suite, results):
    """Flat rows (list of dicts) for the CSV / text table."""
    rows = []
    for res in results:
        a = res.algorithm
        base = {"case": res.label, "algorithm": a, "trials": len(res.trials), "failed": len(res.failed_trials)}
        mean_t = sum(res.timings) / len(res.timings) if res.timings else 0.0
        if suite == "table2":
            k = int(res.label.split("-")[1])
            for q in (1, 2):
                ave, dev = _stat(res, f"train_rmse_y{q}")
                ref = TABLE2_REFERENCE.get((a, q), {}).get(k, (None, None))
                rows.append({**base, "nodes": k, "output": f"y{q}", "ave": ave, "dev": dev,
                             "ref_ave": ref[0], "ref_dev": ref[1]})
            continue
        if suite == "classification":
            ref = CLASSIFICATION_REFERENCE.get(res.label, {}).get(a, (None,) * 4)
            tr, te = _stat(res, "train_accuracy"), _stat(res, "test_accuracy")
            rows.append({**base, "nodes": _stat(res, "nodes_used")[0], "t_s": mean_t,
                         "train_ave": tr[0], "train_dev": tr[1], "test_ave": te[0], "test_dev": te[1],
                         "ref_train_ave": ref[0], "ref_train_dev": ref[1],
                         "ref_test_ave": ref[2], "ref_test_dev": ref[3]})
            continue
        ref = (TABLE1_REFERENCE.get(a) if suite == "table1" else REGRESSION_REFERENCE.get(res.label, {}).get(a)) or (None,) * 5
        tr, te = _stat(res, "train_rmse"), _stat(res, "test_rmse")
        rows.append({**base, "nodes": _stat(res, "nodes_used")[0], "t_s": mean_t,
                     "train_ave": tr[0], "train_dev": tr[1], "test_ave": te[0], "test_dev": te[1],
                     "ref_nodes": ref[0], "ref_train_ave": ref[1], "ref_train_dev": ref[2],
                     "ref_test_ave": ref[3], "ref_test_dev": ref[4]})
    return rows


def write_table_csv(rows, path):
    if not rows:
        Path(path).write_text("")
        return
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if v is None else v) for k, v in r.items()})


def format_table(rows):
    if not rows:
        return "(no rows)"
    cols = list(rows[0])
    cells = [[_fmt(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(x[i]) for x in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(x.ljust(w) for x, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)
