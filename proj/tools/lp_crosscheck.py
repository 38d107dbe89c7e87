#!/usr/bin/env python3
# Copyright 2026 The gridsec Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Cross-check the exact planner against an independent MILP solve.

Runs `gridsec plan --emit-lp` on an instance, parses the emitted CPLEX-LP
subset (objective, linear rows, bounds, binaries), solves it with
scipy.optimize.milp (HiGHS) and compares the optimum with the planner's
reported total cost.
"""

import argparse
import json
import pathlib
import subprocess
import sys
import tempfile

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import lil_matrix

SECTIONS = ("minimize", "subject to", "bounds", "binaries", "end")


def parse_lp(text):
    sections = {name: [] for name in SECTIONS}
    current = None
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("\\"):
            continue
        if stripped.lower() in SECTIONS:
            current = stripped.lower()
            continue
        sections[current].append(stripped)

    def linear_terms(tokens):
        terms, sign, coef = {}, 1.0, None
        for tok in tokens:
            if tok in "+-":
                sign = 1.0 if tok == "+" else -1.0
                continue
            try:
                coef = float(tok)
                continue
            except ValueError:
                pass
            terms[tok] = terms.get(tok, 0.0) + sign * (1.0 if coef is None else coef)
            sign, coef = 1.0, None
        return terms

    objective_tokens = " ".join(sections["minimize"]).split()
    objective = linear_terms(objective_tokens[1:])  # drop the "obj:" label

    rows, row = [], None
    for tok in " ".join(sections["subject to"]).split():
        if tok.endswith(":") and (row is None or row["sense"] is not None):
            row = {"name": tok[:-1], "tokens": [], "sense": None, "rhs": None}
            rows.append(row)
        elif tok in ("<=", ">=", "="):
            row["sense"] = tok
        elif row["sense"] is not None:
            row["rhs"] = float(tok)
        else:
            row["tokens"].append(tok)

    bounds = {}
    for line in sections["bounds"]:
        parts = line.split()
        if len(parts) == 5 and parts[1] == "<=" and parts[3] == "<=":
            bounds[parts[2]] = (float(parts[0]), float(parts[4]))
        elif len(parts) == 3 and parts[1] == "<=":
            bounds[parts[0]] = (0.0, float(parts[2]))
        elif len(parts) == 3 and parts[1] == ">=":
            bounds[parts[0]] = (float(parts[2]), np.inf)
        elif len(parts) == 2 and parts[1].lower() == "free":
            bounds[parts[0]] = (-np.inf, np.inf)
        else:
            raise ValueError(f"unsupported bound line: {line}")

    binaries = " ".join(sections["binaries"]).split()
    return objective, [(r["name"], linear_terms(r["tokens"]), r["sense"], r["rhs"]) for r in rows], bounds, binaries


def solve(objective, rows, bounds, binaries, time_limit):
    names = sorted(set(objective) | {v for _, terms, _, _ in rows for v in terms} | set(bounds) | set(binaries))
    index = {name: k for k, name in enumerate(names)}
    c = np.zeros(len(names))
    for name, coef in objective.items():
        c[index[name]] = coef
    if not rows and not names:
        return 0.0
    lower = np.zeros(len(names))
    upper = np.full(len(names), np.inf)
    for name, (lo, hi) in bounds.items():
        lower[index[name]], upper[index[name]] = lo, hi
    integrality = np.zeros(len(names))
    for name in binaries:
        integrality[index[name]] = 1
        lower[index[name]], upper[index[name]] = 0.0, 1.0
    a = lil_matrix((len(rows), len(names)))
    row_lo = np.full(len(rows), -np.inf)
    row_hi = np.full(len(rows), np.inf)
    for k, (_, terms, sense, rhs) in enumerate(rows):
        for name, coef in terms.items():
            a[k, index[name]] = coef
        if sense in ("<=", "="):
            row_hi[k] = rhs
        if sense in (">=", "="):
            row_lo[k] = rhs
    result = milp(
        c,
        constraints=[LinearConstraint(a.tocsr(), row_lo, row_hi)] if rows else None,
        integrality=integrality,
        bounds=Bounds(lower, upper),
        options={"time_limit": time_limit, "mip_rel_gap": 1e-9},
    )
    if result.status != 0:
        raise RuntimeError(f"MILP solve failed: {result.message}")
    return float(result.fun)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("gridsec", help="path to the gridsec executable")
    parser.add_argument("instance", help="instance JSON")
    parser.add_argument("--security", action="store_true")
    parser.add_argument("--c0", type=float)
    parser.add_argument("--rel-tol", type=float, default=1e-6)
    parser.add_argument("--time-limit", type=float, default=600.0)
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        out = pathlib.Path(tmp)
        cmd = [args.gridsec, "plan", args.instance, "--out", str(out), "--emit-lp", str(out / "model.lp")]
        if args.security:
            cmd.append("--security")
        if args.c0 is not None:
            cmd += ["--c0", repr(args.c0)]
        subprocess.run(cmd, check=True, stdout=subprocess.DEVNULL)
        stem = "plan_secure" if args.security else "plan_insecure"
        planner_total = json.loads((out / f"{stem}_cost.json").read_text())["total_usd"]
        milp_total = solve(*parse_lp((out / "model.lp").read_text()), args.time_limit)

    rel = abs(milp_total - planner_total) / max(abs(planner_total), 1.0)
    verdict = "PASS" if rel <= args.rel_tol else "FAIL"
    print(f"{verdict} planner={planner_total:.6f} milp={milp_total:.6f} rel_diff={rel:.3e}")
    return 0 if verdict == "PASS" else 1


if __name__ == "__main__":
    sys.exit(main())
