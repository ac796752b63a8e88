#!/usr/bin/env python3
# Copyright 2026 The boca-cpp Authors
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

"""Solve exported LP files with an external MILP solver and compare against solve-wdp.

usage: lp_crosscheck.py <boca-binary> <work-dir>
Exits 77 (skipped) when scipy is unavailable.
"""

import json
import os
import random
import re
import subprocess
import sys

try:
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp
except ImportError:
    print("scipy not available, skipping")
    sys.exit(77)

TERM = re.compile(r"([+-]?)\s*([0-9.eE+-]+)\s+([A-Za-z_][A-Za-z0-9_]*)")


def parse_lp(text):
    """Reads the subset of CPLEX-LP the exporter writes."""
    section = None
    objective = {}
    rows = []
    bounds = {}
    binaries = set()
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        low = line.lower()
        if low in ("maximize", "subject to", "bounds", "binaries", "end"):
            section = low
            continue
        if section == "maximize":
            _, expr = line.split(":", 1)
            for sign, coef, name in TERM.findall(expr):
                objective[name] = objective.get(name, 0.0) + (-1 if sign == "-" else 1) * float(coef)
        elif section == "subject to":
            _, body = line.split(":", 1)
            m = re.match(r"(.*?)(<=|>=|=)\s*([0-9.eE+-]+)\s*$", body)
            expr, sense, rhs = m.group(1), m.group(2), float(m.group(3))
            coefs = {}
            for sign, coef, name in TERM.findall(expr):
                coefs[name] = coefs.get(name, 0.0) + (-1 if sign == "-" else 1) * float(coef)
            rows.append((coefs, sense, rhs))
        elif section == "bounds":
            m = re.match(r"([0-9.eE+-]+)\s*<=\s*(\w+)\s*<=\s*([0-9.eE+-]+)$", line)
            if m:
                bounds[m.group(2)] = (float(m.group(1)), float(m.group(3)))
            else:
                m = re.match(r"(\w+)\s*=\s*([0-9.eE+-]+)$", line)
                bounds[m.group(1)] = (float(m.group(2)), float(m.group(2)))
        elif section == "binaries":
            binaries.update(line.split())
    return objective, rows, bounds, binaries


def solve_lp(text):
    objective, rows, bounds, binaries = parse_lp(text)
    names = sorted(set(objective) | set(bounds) | binaries | {v for r in rows for v in r[0]})
    index = {v: k for k, v in enumerate(names)}
    c = np.zeros(len(names))
    for v, w in objective.items():
        c[index[v]] = -w  # milp minimizes
    A = np.zeros((len(rows), len(names)))
    lo = np.full(len(rows), -np.inf)
    hi = np.full(len(rows), np.inf)
    for r, (coefs, sense, rhs) in enumerate(rows):
        for v, w in coefs.items():
            A[r, index[v]] = w
        if sense in ("<=", "="):
            hi[r] = rhs
        if sense in (">=", "="):
            lo[r] = rhs
    lb = np.zeros(len(names))
    ub = np.full(len(names), np.inf)
    integrality = np.zeros(len(names))
    for v, (a, b) in bounds.items():
        lb[index[v]], ub[index[v]] = a, b
    for v in binaries:
        lb[index[v]], ub[index[v]] = 0.0, 1.0
        integrality[index[v]] = 1
    constraints = [LinearConstraint(A, lo, hi)] if rows else []
    res = milp(c, constraints=constraints, bounds=Bounds(lb, ub), integrality=integrality,
               options={"mip_rel_gap": 0.0})
    if res.status != 0:
        raise RuntimeError("external solver failed: " + res.message)
    return -res.fun


def random_net(m, rng, skip):
    dims = [m] + [rng.randint(1, 6) for _ in range(rng.randint(1, 2))] + [1]
    weights, biases, cutoffs = [], [], []
    for k in range(len(dims) - 1):
        weights.append([[rng.uniform(0, 1) for _ in range(dims[k])] for _ in range(dims[k + 1])])
        if k + 2 < len(dims):
            biases.append([rng.uniform(-1, 0) for _ in range(dims[k + 1])])
            cutoffs.append([rng.uniform(0.3, 2) for _ in range(dims[k + 1])])
    return {"dims": dims, "weights": weights, "biases": biases, "cutoffs": cutoffs,
            "skip": [rng.uniform(0, 0.5) for _ in range(m)] if skip else None}


def run(cli, *args):
    out = subprocess.run([cli, *args], check=True, capture_output=True, text=True)
    return out.stdout


def main():
    cli, work = sys.argv[1], sys.argv[2]
    os.makedirs(work, exist_ok=True)
    rng = random.Random(2024)
    worst = 0.0
    for t in range(10):
        n, m = rng.randint(1, 3), rng.randint(2, 6)
        nets = [random_net(m, rng, skip=(t % 3 == 2)) for _ in range(n)]
        net_path = os.path.join(work, f"nets_{t}.json")
        with open(net_path, "w") as f:
            json.dump(nets, f)
        extra = []
        if t % 2 == 1:
            excl = [[[rng.randint(0, 1) for _ in range(m)] for _ in range(2)] for _ in range(n)]
            excl_path = os.path.join(work, f"excl_{t}.json")
            with open(excl_path, "w") as f:
                json.dump(excl, f)
            extra = ["--exclusions", excl_path]
        ours = json.loads(run(cli, "solve-wdp", "--networks", net_path, "--relative-gap", "0", *extra))
        for prune in ([], ["--no-prune"]):
            lp = run(cli, "export-milp", "--networks", net_path, *extra, *prune)
            theirs = solve_lp(lp)
            diff = abs(theirs - ours["objective"])
            worst = max(worst, diff)
            tag = "unpruned" if prune else "pruned"
            print(f"instance {t} n={n} m={m} {tag}: external {theirs:.9f} solve-wdp {ours['objective']:.9f}")
    print(f"max |external - solve-wdp| = {worst:.2e}")
    return 0 if worst <= 1e-6 else 1


if __name__ == "__main__":
    sys.exit(main())
