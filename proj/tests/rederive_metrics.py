"""Recompute metrics.csv from estimates.csv with numpy and compare.

usage: rederive_metrics.py BRE_SIM WORKDIR
"""
import csv
import math
import pathlib
import subprocess
import sys

import numpy as np

TOL = 1e-12

CONFIG = """\
master_seed = 314159
rho_levels = 0.1, 0.55
n_levels = 300, 500
replications = 25
"""


def overlap(comp, ref):
    q1c, q3c = np.quantile(comp, [0.25, 0.75])
    q1r, q3r = np.quantile(ref, [0.25, 0.75])
    ic, ir = q3c - q1c, q3r - q1r
    if q1c >= q1r and q3c <= q3r and ic < ir:
        return ir / ic, "CONTAINMENT"
    inter = min(q3c, q3r) - max(q1c, q1r)
    if inter <= 0:
        return 0.0, "DISJOINT"
    return 2 * inter / (ic + ir), "PARTIAL"


def close(a, b):
    return abs(a - b) <= TOL * max(1.0, abs(b))


def main():
    exe, work = sys.argv[1], pathlib.Path(sys.argv[2])
    work.mkdir(parents=True, exist_ok=True)
    cfg = work / "run.cfg"
    cfg.write_text(CONFIG)
    out = work / "out"
    rc = subprocess.run([exe, "simulate", "--config", str(cfg), "--out", str(out)]).returncode
    if rc not in (0, 3):
        sys.exit(f"bre_sim exited {rc}")

    arms = {}
    with open(out / "estimates.csv", newline="") as f:
        for row in csv.DictReader(f):
            key = (row["condition_id"], row["param"])
            entry = arms.setdefault(key, {"rho": float(row["rho"]), "reference": [], "comparison": []})
            est = float(row["estimate"])
            if row["converged"] == "1" and row["admissible"] == "1" and math.isfinite(est):
                entry[row["arm"]].append(est)

    failures = 0
    checked = 0
    with open(out / "metrics.csv", newline="") as f:
        for row in csv.DictReader(f):
            e = arms[(row["condition_id"], row["param"])]
            ref, comp = np.array(e["reference"]), np.array(e["comparison"])
            assert int(row["n_ref"]) == len(ref) and int(row["n_comp"]) == len(comp)
            if row["overlap_case"] == "NA":
                assert min(len(ref), len(comp)) < 10
                continue
            theta = e["rho"]
            rb = (np.median(comp) - theta) / theta
            ov, kind = overlap(comp, ref)
            expected = {
                "re_percent": 100 * np.var(ref, ddof=1) / np.var(comp, ddof=1),
                "iqr_overlap": ov,
                "median_rb": rb,
                "amrb": abs(rb),
                "bre": ov * (1 - abs(rb)),
            }
            if row["overlap_case"] != kind:
                print(f"condition {row['condition_id']}: case {row['overlap_case']} != {kind}")
                failures += 1
            for k, v in expected.items():
                if not close(float(row[k]), v):
                    print(f"condition {row['condition_id']}: {k} {row[k]} != {v!r}")
                    failures += 1
            checked += 1

    print(f"{checked} condition rows re-derived, {failures} mismatches")
    sys.exit(1 if failures or checked == 0 else 0)


if __name__ == "__main__":
    main()
