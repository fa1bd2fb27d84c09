#!/usr/bin/env python3
"""Total-rule-length comparison on a diabetes-scale dataset.

Uses the built-in 768x8 surrogate by default; pass --data to run on a real
labeled CSV instead (e.g. the Pima benchmark with a 0/1 'label' column).
Writes the report plus all rule-set exports and traces into --out.
"""

import argparse

from stair.bench import run_length_comparison
from stair.dataset import gen_pima_like, load_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", default=None, help="labeled CSV; default: built-in surrogate")
    ap.add_argument("--label-col", default="label")
    ap.add_argument("--f1-min", type=float, default=0.8)
    ap.add_argument("--len-max", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="bench_pima")
    args = ap.parse_args()

    if args.data:
        ds = load_csv(args.data, args.label_col)
        name = args.data
    else:
        ds = gen_pima_like(args.seed)
        name = "pima-like-surrogate"

    report = run_length_comparison(
        ds, name=name, f1_min=args.f1_min, len_max=args.len_max,
        seed=args.seed, out_dir=args.out,
    )
    print(report.render())
    print(f"artifacts in {args.out}/")


if __name__ == "__main__":
    main()
