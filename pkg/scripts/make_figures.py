"""Compute the phase-map data behind every figure preset.

Writes one directory per preset (phase_map.csv, boundaries.csv,
manifest.json) and prints the robust-cell count per deadline. Plotting is
left to the reader's tool of choice; the CSVs are long-format and load
directly into pandas or gnuplot.
"""

import argparse
import time
from pathlib import Path

from disent import __version__
from disent.sweep import PRESETS, preset_config, run_sweep, write_outputs


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figures", help="output root directory")
    ap.add_argument("--grid", type=int, default=201)
    ap.add_argument("--preset", action="append", choices=list(PRESETS),
                    help="restrict to these presets (repeatable)")
    args = ap.parse_args()
    start = time.perf_counter()
    for name in args.preset or PRESETS:
        t0 = time.perf_counter()
        res = run_sweep(preset_config(name).with_grid(args.grid))
        manifest = write_outputs(res, Path(args.out) / name, __version__)
        print(f"{name}: robust cells per tau {manifest['robust_cells']} "
              f"({time.perf_counter() - t0:.2f} s)")
    print(f"total {time.perf_counter() - start:.2f} s")


if __name__ == "__main__":
    main()
