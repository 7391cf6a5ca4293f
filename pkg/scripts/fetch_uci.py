#!/usr/bin/env python3
"""Download Abalone, Red Wine Quality and Waveform from the UCI archive and
rewrite them as header + comma-separated numeric CSVs that ``larsen-elm bench
--dataset`` accepts.

    python scripts/fetch_uci.py --dest data/
    larsen-elm bench --dataset data/abalone.csv --target rings
"""

from __future__ import annotations

import argparse
import csv
import io
import subprocess
import sys
import urllib.request
from pathlib import Path

BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases"

SOURCES = {
    "abalone": f"{BASE}/abalone/abalone.data",
    "redwine": f"{BASE}/wine-quality/winequality-red.csv",
    "waveform": f"{BASE}/waveform/waveform.data.Z",
}

TARGETS = {"abalone": "rings", "redwine": "quality", "waveform": "class"}

ABALONE_COLUMNS = ["sex", "length", "diameter", "height", "whole_weight",
                   "shucked_weight", "viscera_weight", "shell_weight", "rings"]
SEX_CODE = {"M": "1", "F": "-1", "I": "0"}


def convert_abalone(text: str) -> list[list[str]]:
    rows = [ABALONE_COLUMNS]
    for line in text.splitlines():
        if line.strip():
            cells = line.strip().split(",")
            rows.append([SEX_CODE[cells[0]], *cells[1:]])
    return rows


def convert_redwine(text: str) -> list[list[str]]:
    reader = csv.reader(io.StringIO(text), delimiter=";")
    header = next(reader)
    rows = [[h.strip().strip('"').replace(" ", "_") for h in header]]
    rows.extend(r for r in reader if r)
    return rows


def convert_waveform(text: str) -> list[list[str]]:
    body = [line.strip().split(",") for line in text.splitlines() if line.strip()]
    width = len(body[0]) - 1
    return [[*(f"x{i + 1}" for i in range(width)), "class"], *body]


CONVERTERS = {"abalone": convert_abalone, "redwine": convert_redwine, "waveform": convert_waveform}


def download(url: str) -> str:
    with urllib.request.urlopen(url, timeout=60) as resp:
        raw = resp.read()
    if url.endswith(".Z"):
        # unix compress; gzip can read it, Python's gzip module cannot
        raw = subprocess.run(["gzip", "-dc"], input=raw, capture_output=True, check=True).stdout
    return raw.decode("utf-8")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dest", default="data")
    parser.add_argument("names", nargs="*", default=list(SOURCES), choices=list(SOURCES))
    args = parser.parse_args(argv)
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    for name in args.names:
        rows = CONVERTERS[name](download(SOURCES[name]))
        path = dest / f"{name}.csv"
        with open(path, "w", newline="") as fh:
            csv.writer(fh).writerows(rows)
        print(f"{path}: {len(rows) - 1} rows, target column {TARGETS[name]!r}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
