"""Plot r/4 and 1/(8 xi_r) over (0, 1) and mark the optimal radius.

    python scripts/reproduce_figure.py --steps 999 --out figure.png
"""

import argparse
import csv

from hwbound.constants import figure_grid, solve_kappa


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--steps", type=int, default=999)
    p.add_argument("--out", default="figure.png")
    p.add_argument("--csv", default=None, help="also write the grid as CSV")
    args = p.parse_args()

    grid = figure_grid(args.steps)
    res = solve_kappa()
    best = max(grid, key=lambda row: row.min_term)
    print(f"grid max of min term: {best.min_term:.6f} at r={best.r:.4f}")
    print(f"solved: r*={res.r_star:.6f} kappa={res.kappa:.6f}")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "quarter_r", "inv_8xi", "min_term"])
            w.writerows(grid)

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rs = [row.r for row in grid]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(rs, [row.quarter_r for row in grid], label="r/4")
    ax.plot(rs, [row.inv_8xi for row in grid], label=r"$1/(8\xi_r)$")
    ax.axvline(res.r_star, color="grey", ls=":", lw=1)
    ax.plot([res.r_star], [res.kappa], "ko", ms=4)
    ax.annotate(f"r*={res.r_star:.4f}\nkappa={res.kappa:.4f}", (res.r_star, res.kappa),
                xytext=(10, 10), textcoords="offset points")
    ax.set_xlabel("r")
    ax.set_xlim(0, 1)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
