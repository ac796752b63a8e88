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

"""Runs every CLI subcommand once on tiny inputs and checks the outputs parse.

usage: cli_smoke.py <boca-binary> <work-dir>
"""

import csv
import json
import os
import shutil
import subprocess
import sys


def run(cli, *args, expect=0):
    res = subprocess.run([cli, *args], capture_output=True, text=True, env={**os.environ, "BOCA_LOG": "warn"})
    if res.returncode != expect:
        sys.stderr.write(res.stdout + res.stderr)
        raise SystemExit(f"{' '.join(args)}: exit {res.returncode}, expected {expect}")
    return res.stdout


def main():
    cli, work = sys.argv[1], sys.argv[2]
    shutil.rmtree(work, ignore_errors=True)
    os.makedirs(work)
    p = lambda name: os.path.join(work, name)

    inst_path = p("instance.json")
    run(cli, "--seed", "3", "--out", inst_path, "generate", "--n", "2", "--m", "5")
    inst = json.load(open(inst_path))
    assert inst["n"] == 2 and inst["m"] == 5, inst.keys()
    again = json.loads(run(cli, "--seed", "3", "generate", "--n", "2", "--m", "5"))
    assert again == inst, "generate is not deterministic"

    net_cfg = {"hidden": [8], "mean_train": {"epochs": 50}, "uub_train": {"epochs": 50}}
    json.dump(net_cfg, open(p("net.json"), "w"))
    run(cli, "--out", p("triple.json"), "train", "--instance", inst_path, "--bidder", "1", "--queries", "6",
        "--config", p("net.json"))
    triple = json.load(open(p("triple.json")))
    assert {"mean", "uub", "exact_uub"} <= set(triple), triple.keys()

    json.dump([triple, triple], open(p("nets.json"), "w"))
    sol = json.loads(run(cli, "solve-wdp", "--networks", p("nets.json"), "--relative-gap", "0"))
    assert sol["status"] == "optimal" and len(sol["allocation"]) == 2, sol

    lp = run(cli, "export-milp", "--networks", p("nets.json"))
    assert lp.startswith("\\") and "Maximize" in lp and lp.rstrip().endswith("End")

    mech = {"Q_init": 4, "Q_round": 2, "Q_max": 8, "network": net_cfg}
    json.dump(mech, open(p("mech.json"), "w"))
    run(cli, "--out", p("mlca"), "run-mlca", "--instance", inst_path, "--config", p("mech.json"),
        "--acquisition", "exact-uub")
    outcome = json.load(open(p("mlca/outcome.json")))
    assert all(x >= 0 for x in outcome["payments"]), outcome["payments"]
    rows = list(csv.DictReader(open(p("mlca/path.csv"))))
    assert rows and rows[0]["round"] == "0", rows

    exp = {"generator": {"n": 2, "m": 5}, "seeds": [0, 1],
           "arms": [{"name": "exact", "mechanism": {**mech, "acquisition": "exact-uub"}},
                    {"name": "random", "mechanism": {**mech, "acquisition": "random"}}]}
    json.dump(exp, open(p("exp.json"), "w"))
    out = run(cli, "--out", p("exp"), "experiment", "--config", p("exp.json"))
    assert "exact" in out and "random" in out, out
    for f in ("results.csv", "ttest.csv", "per_seed.csv", "paths/exact.csv", "paths/random.csv"):
        assert os.path.exists(os.path.join(p("exp"), f)), f
    assert run(cli, "--out", p("exp"), "experiment", "--config", p("exp.json")) == out, "resume changed output"

    metric = json.loads(run(cli, "hpo-metric", "--instance", inst_path, "--train", "6", "--test", "10",
                            "--config", p("net.json")))
    assert metric["metric"] >= 0 and metric["q"] == 0.9, metric

    # invalid inputs exit with status 2
    json.dump({"n": 0}, open(p("bad.json"), "w"))
    run(cli, "run-mlca", "--instance", p("bad.json"), expect=2)
    json.dump({"Q_init": 10, "Q_round": 2, "Q_max": 8}, open(p("badmech.json"), "w"))
    run(cli, "run-mlca", "--instance", inst_path, "--config", p("badmech.json"), expect=2)
    print("all subcommands ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
