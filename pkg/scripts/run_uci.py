#!/usr/bin/env python3
"""Blended-noise regression benchmark: ELM, GASEN-ELM and LARSEN-ELM under
the seven- and ten-variable noise profiles.

Boston Housing ships with the package. Other datasets are picked up from
--data-dir when present (see fetch_uci.py).
"""

import argparse
import sys
from pathlib import Path

from larsen_elm.bench import ExperimentSpec, render_report, run_experiment

EXTRA = {"abalone": "rings", "redwine": "quality", "waveform": "class"}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--data-dir", default="data")
    parser.add_argument("--out-dir", default="results/uci")
    parser.add_argument("--runs", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--profiles", default="seven,ten")
    args = parser.parse_args(argv)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    datasets = [("boston", None)]
    for name, target in EXTRA.items():
        path = Path(args.data_dir) / f"{name}.csv"
        if path.exists():
            datasets.append((str(path), target))
        else:
            print(f"skipping {name}: {path} not found", file=sys.stderr)

    for profile in args.profiles.split(","):
        reports = []
        for dataset, target in datasets:
            spec = ExperimentSpec(dataset=dataset, target_column=target, noise=profile,
                                  runs=args.runs, seed=args.seed)
            report = run_experiment(spec)
            report.save(out / f"{Path(dataset).stem}_{profile}.json")
            reports.append(report)
        print(f"== noise profile: {profile}")
        print(render_report(reports), end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
