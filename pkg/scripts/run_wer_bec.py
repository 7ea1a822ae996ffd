#!/usr/bin/env python3
"""Erasure-channel experiments: balanced versus known-index peeling across
block lengths, plus the residual inversion-set size sweep."""

import argparse
import pathlib

from balmod import harness


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=400)
    ap.add_argument("--p", type=float, default=0.35)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args()

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    wer = harness.run_wer_bec(harness.WerBecSpec(
        erasure_p=args.p, trials=args.trials, seed=args.seed))
    harness.emit(wer, out / "wer_bec.csv", "csv")

    sweep = harness.run_inversion_set(harness.InversionSetSpec(
        trials=args.trials, seed=args.seed))
    harness.emit(sweep, out / "inversion_set.csv", "csv")
    harness.emit(sweep, out / "inversion_set.svg", "svg")
    print(f"wrote {out}/wer_bec.csv, {out}/inversion_set.csv and .svg")


if __name__ == "__main__":
    main()
