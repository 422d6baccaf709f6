"""Weighted bilinear and corollary ratios over N = 8..256, plus a check that
the time-sample count does not move the answer."""
import argparse

from dispersive_bench.estimates import EnsembleConfig, bilinear_ratio, corollary_ratio, write_ratio_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args()
    cfg = EnsembleConfig(trials=args.trials, seed=args.seed)
    stats = []
    for N in (8, 16, 32, 64, 128, 256):
        stats += [bilinear_ratio(N, cfg), corollary_ratio(N, cfg)]
    text = write_ratio_csv(stats)
    print(text, end="")
    if args.out:
        open(args.out, "w").write(text)
    fine = EnsembleConfig(trials=10, seed=args.seed, M_t=2048)
    coarse = EnsembleConfig(trials=10, seed=args.seed, M_t=128)
    print("M_t 128 vs 2048 at N=32:", bilinear_ratio(32, coarse).max_ratio, bilinear_ratio(32, fine).max_ratio)


if __name__ == "__main__":
    main()
