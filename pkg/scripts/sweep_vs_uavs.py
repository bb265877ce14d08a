#!/usr/bin/env python3
"""Mean completion time vs fleet size at a fixed number of UEs.

Writes results.csv / aggregate.csv / timings.csv / chart.svg to --out.
"""

import argparse

from uavmec.cli import run_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--values", type=int, nargs="+",
                    default=[5, 6, 7, 8, 9, 10])
    ap.add_argument("--ues", type=int, default=80)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--restarts", type=int, default=1)
    ap.add_argument("--out", default="sweep_uavs")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    spec = {
        "sweep_var": "num_uavs",
        "values": args.values,
        "methods": ["proposed", "hpo", "vpo", "clbo"],
        "seeds": list(range(args.seeds)),
        "num_ues": args.ues,
        "restarts": args.restarts,
    }
    run_sweep(spec, args.out, jobs=args.jobs)
    print(f"done; see {args.out}/aggregate.csv and {args.out}/chart.svg")


if __name__ == "__main__":
    main()
