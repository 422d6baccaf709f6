"""Largest sampled constant of every pointwise bound at s in {1.5, 2.5},
N in {8, 64}, and its change when the sample count doubles."""
import argparse

from dispersive_bench.bounds import SamplerConfig, verify_pointwise_bounds
from dispersive_bench.multipliers import ThetaProfile


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for s in (1.5, 2.5):
        for N in (8.0, 64.0):
            p = ThetaProfile(s, N)
            a = verify_pointwise_bounds(p, SamplerConfig(args.samples, args.seed))
            b = verify_pointwise_bounds(p, SamplerConfig(2 * args.samples, args.seed))
            for ra in a.rows:
                rb = b.get(ra.bound_id, ra.regime)
                print(f"s={s} N={N:>4g} {ra.bound_id:17s} {ra.regime:22s} max={ra.max_ratio:10.4g} "
                      f"doubled={rb.max_ratio:10.4g} p99={ra.p99_ratio:.3g}")


if __name__ == "__main__":
    main()
