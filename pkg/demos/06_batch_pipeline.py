"""The batch pipeline end to end: simulate -> solve -> eval -> sweep.

Everything here goes through the command-line entry points (called
in-process), exercising the on-disk matrix container, the manifests, and
the sweep aggregation exactly as a shell user would.
"""

import csv
import json
import tempfile
from pathlib import Path

from rvmix.cli import main

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)

    cfg = tmp / "sim.cfg"
    cfg.write_text("s = 96\nn = 16\nt = 16\nseed = 1\npeak_snr_db = 42\n")
    sim = tmp / "sim"
    assert main(["simulate", "--config", str(cfg), "--out", str(sim)]) == 0
    manifest = json.loads((sim / "manifest.json").read_text())
    print("simulate ->", sorted(p.name for p in sim.iterdir()))
    print(f"  noise sd {manifest['noise_sigma']:.4f}, "
          f"truth sparseness {manifest['truth_sparseness_pct']:.1f}%")

    run = tmp / "run"
    assert main(["solve", "--method", "enet-rvm", "--K", str(sim / "K.mxio"),
                 "--V", str(sim / "V.mxio"), "--out", str(run)]) == 0
    manifest = json.loads((run / "manifest.json").read_text())
    print(f"\nsolve -> converged={manifest['converged']} "
          f"in {manifest['iterations']} sweeps")

    print("\neval ->")
    assert main(["eval", "--mu", str(run / "mu.mxio"),
                 "--truth", str(sim / "J_true.mxio"),
                 "--support", str(sim / "support_true.mxio"),
                 "--method", "enet-rvm"]) == 0

    replay = tmp / "replay"
    assert main(["solve", "--replay", str(run / "manifest.json"),
                 "--out", str(replay)]) == 0
    identical = (run / "mu.mxio").read_bytes() == (replay / "mu.mxio").read_bytes()
    print(f"\nreplay from manifest -> bit-identical solution: {identical}")

    spec = tmp / "sweep.cfg"
    spec.write_text(
        "s = 96\nn = 16\nt = 16\npeak_snr_db = 42\nseeds = 0,1\n"
        "arm = enet-learned | method=enet-rvm\n"
        "arm = enet-fixed-sparse | method=enet-rvm alpha1=1 alpha2=100\n"
        "arm = lasso-gcv | method=lasso-mm lambda_grid=0.1,1,10,100 max_iter=80\n"
    )
    sweep = tmp / "sweep"
    assert main(["sweep", "--spec", str(spec), "--out", str(sweep), "--jobs", "2"]) == 0
    print("\nsweep table:")
    with open(sweep / "sweep.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            print(f"  {row['arm']:18s} seed={row['seed']} "
                  f"1-corr={row['1-corr']:8s} Sp={row['Sp']:8s} AUC={row['AUC']}")
