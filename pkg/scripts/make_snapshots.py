"""Regenerate the 21x21 regression snapshots under tests/snapshots/.

Run after an intentional change to the boundary formulas or CSV layout and
review the diff before committing.
"""

from pathlib import Path

from disent.sweep import PRESETS, preset_config, run_sweep

SNAPSHOT_GRID = 21
ROOT = Path(__file__).resolve().parent.parent / "tests" / "snapshots"


def main() -> None:
    for name in PRESETS:
        res = run_sweep(preset_config(name).with_grid(SNAPSHOT_GRID), threads=1)
        out = ROOT / name
        out.mkdir(parents=True, exist_ok=True)
        for fname, text in (("phase_map.csv", res.phase_map_csv()),
                            ("boundaries.csv", res.boundaries_csv())):
            with open(out / fname, "w", newline="\n") as fh:
                fh.write(text)
        print(f"{name}: {out}")


if __name__ == "__main__":
    main()
