#!/usr/bin/env python3
# Copyright 2026 The lanegame Authors
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
"""Sweep the risk-field threshold upsilon_sf over the two calibration runs.

The threshold has to stay above the field the HV sees in case5 (so the
lane change there is allowed) and below the peak of the aggressive cut-in
(so that one is aborted). Prints the admissible interval and a table of
candidate thresholds.

    scripts/calibrate_apf.py --cli build/tools/lanegame
"""

import argparse
import csv
import json
import pathlib
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def run(cli, scenario, upsilon_sf, workdir):
    doc = json.loads(scenario.read_text())
    doc.setdefault("apf", {})["upsilon_sf"] = upsilon_sf
    src = workdir / f"{scenario.stem}_{upsilon_sf:g}.json"
    out = workdir / f"{scenario.stem}_{upsilon_sf:g}.csv"
    src.write_text(json.dumps(doc))
    subprocess.run([cli, "simulate", "--scenario", str(src), "--out", str(out)],
                   check=True, stdout=subprocess.DEVNULL)
    with out.open() as f:
        rows = list(csv.DictReader(line for line in f if not line.startswith("#")))
    peak = max(float(r["upsilon"]) for r in rows)
    triggered = sum(r["triggered"] == "1" for r in rows)
    return peak, triggered


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cli", default=str(ROOT / "build" / "tools" / "lanegame"))
    ap.add_argument("--allowed", default=str(ROOT / "scenarios" / "case5.json"))
    ap.add_argument("--aborted", default=str(ROOT / "scenarios" / "cutin.json"))
    ap.add_argument("--candidates", type=float, nargs="*",
                    default=[0.02, 0.04, 0.06, 0.08, 0.1, 0.2, 0.4, 0.8, 1.0])
    args = ap.parse_args()
    allowed = pathlib.Path(args.allowed)
    aborted = pathlib.Path(args.aborted)

    with tempfile.TemporaryDirectory() as tmp:
        work = pathlib.Path(tmp)
        # The field itself does not depend on the threshold; a huge one
        # keeps the gate open so the raw peaks are seen.
        peak_ok, _ = run(args.cli, allowed, 1e9, work)
        peak_bad, _ = run(args.cli, aborted, 1e9, work)
        print(f"field peak, {allowed.stem}: {peak_ok:.4f}")
        print(f"field peak, {aborted.stem}: {peak_bad:.4f}")
        if peak_ok >= peak_bad:
            print("no threshold separates the two runs")
            return 1
        print(f"admissible upsilon_sf: ({peak_ok:.4f}, {peak_bad:.4f})\n")
        print(f"{'upsilon_sf':>10}  {allowed.stem + ' gated':>12}  {aborted.stem + ' gated':>12}  ok")
        for c in args.candidates:
            _, n_ok = run(args.cli, allowed, c, work)
            _, n_bad = run(args.cli, aborted, c, work)
            good = n_ok == 0 and n_bad > 0
            print(f"{c:>10g}  {n_ok:>12d}  {n_bad:>12d}  {'yes' if good else 'no'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
