"""How much each relaxation step costs, on random spectra.

For random symmetric matrices and thresholds this prints the median ratio of
each exponent to the exact Chernoff exponent, split by whether the bound is
in the quadratic (a small) or linear (a large) regime, plus the Monte Carlo
tail next to the tightest bound for a few deep-tail cases.

    python scripts/tightness_sweep.py --trials 500 --seed 0
"""

import argparse

import numpy as np

from hwbound.bounds import TailQuery, assemble_report
from hwbound.montecarlo import estimate_tail
from hwbound.spectral import decompose, make_symmetric


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--max-n", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mc-cases", type=int, default=5)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    ratios = {"quadratic": [], "linear": []}
    cases = []
    for _ in range(args.trials):
        n = int(rng.integers(1, args.max_n + 1))
        b = rng.normal(size=(n, n))
        spec = decompose(make_symmetric(n, (0.5 * (b + b.T)).ravel()))
        a = float(spec.hs_norm * np.exp(rng.uniform(np.log(0.05), np.log(20))))
        rep = assemble_report(spec, TailQuery(a))
        regime = "quadratic" if a / spec.op_norm > a * a / spec.hs_norm_sq else "linear"
        ratios[regime].append(
            (rep.intermediate_exponent / rep.chernoff_exponent,
             rep.parametrized_exponent / rep.chernoff_exponent,
             rep.universal_exponent / rep.chernoff_exponent)
        )
        cases.append((spec, a, rep))

    print(f"{'regime':<10} {'count':>5} {'interm/chern':>13} {'param/chern':>12} {'univ/chern':>11}")
    for regime, rows in ratios.items():
        if rows:
            med = np.median(np.array(rows), axis=0)
            print(f"{regime:<10} {len(rows):>5} {med[0]:>13.3f} {med[1]:>12.3f} {med[2]:>11.3f}")

    print("\nMonte Carlo vs bounds (two-sided), largest thresholds relative to |A|_2:")
    cases.sort(key=lambda c: c[1] / c[0].hs_norm)
    for spec, a, rep in cases[-args.mc_cases:]:
        est = estimate_tail(spec, TailQuery(a), samples=200_000, seed=args.seed)
        print(
            f"n={spec.n:2d} a/|A|_2={a / spec.hs_norm:6.2f}  MC={est.point_estimate:.2e} "
            f"(ci_high {est.ci_high:.1e})  chernoff={rep.prob_chernoff:.2e}  "
            f"param={rep.prob_parametrized:.2e}  universal={rep.prob_universal:.2e}"
        )


if __name__ == "__main__":
    main()
