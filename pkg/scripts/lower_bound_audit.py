"""Check that the X part of a random state never overstates its concurrence.

Random full two-qubit states are evolved under each channel; at every time
on the grid the concurrence of the X part must not exceed the Wootters
concurrence of the full state. Prints the JSON report and exits 1 on any
violation.
"""

import argparse
import json
import sys

from disent.oracle import lower_bound_audit


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=1000, help="states per channel")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    rep = lower_bound_audit(args.samples, args.seed, workers=args.workers)
    print(json.dumps(rep.to_json(), indent=2))
    return 1 if rep.violations else 0


if __name__ == "__main__":
    sys.exit(main())
