#!/usr/bin/env python3
"""Recompute every `_ok` flag in agsp-lab CSV output from the stored columns.

Usage: check_flags.py OUT_DIR [OUT_DIR ...]

Exits 1 if any stored flag disagrees with its recomputed value or a table
has an unexpected schema line.
"""

import csv
import math
import sys
from pathlib import Path


def num(row, key):
    return float(row[key])


def flag(value):
    return value == "true"


def error_ratio(r):
    tol = num(r, "tol")
    return {
        "ratio_ok": num(r, "epsilon_after") <= num(r, "shrink") * num(r, "epsilon") + tol,
        "viability_ok": num(r, "delta_after") <= num(r, "shrink") * num(r, "delta") / num(r, "mu") + tol,
    }


def lifting(r):
    tol = num(r, "tol")
    return {
        "identity_ok": num(r, "lift_residual") <= tol,
        "norm_ok": num(r, "lift_norm") <= num(r, "mu") ** -0.5 + tol,
        "perp_ok": num(r, "perp_norm") <= math.sqrt(num(r, "epsilon")) + tol,
    }


def symmetry(r):
    return {"symmetric_ok": abs(num(r, "mu_vz") - num(r, "mu_zv")) <= num(r, "sym_tol")}


def amplification(r):
    applies = num(r, "mu") >= num(r, "shrink")
    return {"amplified_ok": (not applies) or num(r, "mu_after") >= 0.5 - num(r, "tol")}


def tail(r):
    return {"tail_ok": num(r, "tail") <= math.sqrt(num(r, "delta")) + num(r, "tol")}


def dyadic(r):
    out = {"dyadic_ok": num(r, "entropy") <= num(r, "bound") + num(r, "tol")}
    if r["equality_ok"] != "":
        out["equality_ok"] = abs(num(r, "entropy") - num(r, "bound")) <= 1e-12
    return out


def formulas(r):
    w, d, nu, v = num(r, "w"), num(r, "d"), num(r, "nu"), num(r, "reduced_v")
    log_eta_tilde = d / 2 * math.log(9 / nu) + math.log(w) - v / 16
    return {
        "reduced_ok": v == w or log_eta_tilde <= 0,
        "loose_ok": num(r, "nu_sampled") >= 1 or num(r, "log_eta_loose") >= num(r, "log_eta"),
    }


def sharpness(r):
    return {
        "sharp_ok": abs(num(r, "ratio") - 1) <= 1e-12,
        "lift_ok": abs(num(r, "lift_norm") - math.sqrt(2)) <= 1e-10,
    }


def chain(r):
    if r["status"] != "ok":
        return {}
    tol = num(r, "tol")
    return {
        "nu_ok": num(r, "mu_v") >= num(r, "nu") - tol,
        "v2_ok": num(r, "delta_v2") <= num(r, "shrink") + tol,
        "bound_ok": num(r, "s_max") <= num(r, "bound"),
    }


def frustrated(r):
    tol = num(r, "tol")
    return {
        "viability_ok": num(r, "viability") <= num(r, "viability_bound") + tol,
        "tail_ok": num(r, "tail") <= math.sqrt(num(r, "tail_delta")) + tol,
    }


def frustrated_summary(r):
    return {"bound_ok": num(r, "s_max") <= num(r, "bound")}


CHECKS = {
    "error_ratio": error_ratio,
    "lifting": lifting,
    "symmetry": symmetry,
    "amplification": amplification,
    "tail": tail,
    "dyadic": dyadic,
    "formulas": formulas,
    "sharpness": sharpness,
    "chain": chain,
    "frustrated": frustrated,
    "frustrated_summary": frustrated_summary,
}


def check_file(path):
    with path.open(newline="") as f:
        if f.readline().rstrip("\n") != "# schema=1":
            return [f"{path}: missing schema line"]
        rows = list(csv.DictReader(f))
    check = CHECKS.get(path.stem)
    if check is None:
        return []
    errors = []
    for i, row in enumerate(rows):
        for key, expected in check(row).items():
            if flag(row[key]) != expected:
                errors.append(f"{path}: row {i} {key} stored {row[key]} recomputed {str(expected).lower()}")
    return errors


def main(argv):
    if len(argv) < 2:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    errors, checked = [], 0
    for root in argv[1:]:
        for path in sorted(Path(root).glob("*.csv")):
            if path.stem in CHECKS:
                checked += 1
            errors += check_file(path)
    for e in errors:
        print(e)
    print(f"checked {checked} tables, {len(errors)} disagreements")
    return 1 if errors else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
