"""
The command-line workflow
=========================

Simulate a model bundle, cross-validate the penalty, estimate with the
chosen value, score against the truth and produce one-step predictions
from the fitted bundle,
all through ``python3 -m dirvar`` in a scratch directory.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path


def dirvar(*args):
    cmd = [sys.executable, "-m", "dirvar", *map(str, args)]
    print("$ dirvar", " ".join(map(str, args)), flush=True)
    subprocess.run(cmd, check=True)


work = Path(tempfile.mkdtemp(prefix="dirvar-demo-"))
config = work / "sim.json"
config.write_text(json.dumps({"pattern": "band", "d": 10, "t_len": 300, "kappa": 0.7, "seed": 4}))

dirvar("simulate", "--config", config, "--out", work / "sim")
series = work / "sim" / "series.csv"

grid = work / "grid.json"
grid.write_text(json.dumps({"p_grid": [1], "lambda_range": [0.02, 1.0, 8]}))
dirvar("crossval", "--series", series, "--grid", grid, "--n1", 150, "--n2", 150, "--out", work / "cv.json")
best = json.loads((work / "cv.json").read_text())["best"]
print("chosen:", best)

dirvar("estimate", "--series", series, "--method", "direct", "--p", best["p"],
       "--lambda", best["lambda"], "--truth", work / "sim", "--out", work / "fit")
report = json.loads((work / "fit" / "report.json").read_text())
print("errors:", report["errors"])

dirvar("predict", "--model", work / "fit", "--series", series, "--out", work / "pred.csv")
print("predictions written to", work / "pred.csv")
