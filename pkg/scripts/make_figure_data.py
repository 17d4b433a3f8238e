#!/usr/bin/env python3
"""Generate every data product the figure scripts consume.

Runs the CLI (in process) for: the adiabatic sweep path, y-z flow-field
cuts with overlaid averaged-flow trajectories at three damping
strengths, the stereographic flow field with its fixed points on both
sides of the transition, and the two free-energy sweeps.

Usage: python scripts/make_figure_data.py [--out OUT_DIR] [--fast]
"""

import argparse
import json
import sys
import tempfile
from pathlib import Path

from dimer_dpt.cli import main as cli_main


def run(command: str, doc: dict, out_dir: Path) -> None:
    doc = {"command": command, **doc}
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(doc, fh)
        cfg = fh.name
    code = cli_main([command, "--config", cfg, "--out", str(out_dir)])
    if code != 0:
        sys.exit(code)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("out/data"))
    ap.add_argument("--fast", action="store_true", help="coarser grids for a quick look")
    args = ap.parse_args()
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    step = 0.05 if args.fast else 0.02
    res = 20 if args.fast else 32

    # figure 1 style: adiabatic sweep path on the sphere
    run(
        "sweep",
        {
            "params": {"J": 1.0},
            "schedule": {"kind": "linear_ramp", "h0": -20.0, "h1": 20.0, "T": 200.0},
            "output": "adiabatic_sweep.csv",
        },
        out,
    )

    # figure 2 style: y-z cuts of the averaged flow + its trajectory
    for gamma in (1.0, 2.0, 3.0):
        tag = f"gamma{gamma:g}".replace(".", "p")
        run(
            "flowfield",
            {
                "params": {"J": 1.0, "gamma": gamma},
                "flowfield": {"flow": "lindblad", "chart": "yz", "resolution": res},
                "output": f"flow_yz_{tag}.csv",
            },
            out,
        )
        run(
            "trajectory",
            {
                "params": {"J": 1.0, "gamma": gamma},
                "trajectory": {"flow": "lindblad", "t_final": 25.0, "n0": [0.0, 0.0, -1.0]},
                "output": f"traj_ball_{tag}.csv",
            },
            out,
        )

    # figure 3 style: stereographic flow fields + fixed points
    for gamma in (1.0, 2.5):
        tag = f"gamma{gamma:g}".replace(".", "p")
        run(
            "flowfield",
            {
                "params": {"J": 1.0, "gamma": gamma},
                "flowfield": {"flow": "angular", "chart": "stereo", "resolution": res, "extent": 2.5},
                "output": f"flow_stereo_{tag}.csv",
            },
            out,
        )
        run(
            "fixed-points",
            {
                "params": {"J": 1.0, "gamma": gamma},
                "fixed_points": {"flow": "angular"},
                "output": f"fixed_points_{tag}.ndjson",
            },
            out,
        )

    # figure 4 style: free-energy sweeps with transition flags
    run(
        "free-energy",
        {
            "params": {"J": 1.0},
            "free_energy": {"kind": "linear", "s_min": 0.0, "s_max": 2.5, "s_step": step},
            "output": "free_energy_linear.csv",
        },
        out,
    )
    run(
        "free-energy",
        {
            "params": {"J": 1.0},
            "free_energy": {"kind": "variance", "s_min": 0.0, "s_max": 4.0, "s_step": step},
            "output": "free_energy_variance.csv",
        },
        out,
    )
    print(f"all figure data written to {out}")


if __name__ == "__main__":
    main()
