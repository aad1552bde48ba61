"""Write the data behind the n = 70 linear and quadratic rank-distortion plots.

    python scripts/reproduce_figure.py --out results/

Each CSV has columns i, leverage, rms_exact, rms_line1, rms_line2.
"""

import argparse
from pathlib import Path

from rankdistort.cli import FIGURE_HEADER, _rows_csv, figure_rows
from rankdistort import compute_hat_matrix, equispaced, polynomial_design


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=70)
    ap.add_argument("--a", type=float, default=0.0)
    ap.add_argument("--b", type=float, default=1.0)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for degree, name in [(1, "linear"), (2, "quadratic")]:
        hat = compute_hat_matrix(polynomial_design(equispaced(args.n, args.a, args.b), degree))
        rows = figure_rows(hat)
        path = args.out / f"figure_{name}_n{args.n}.csv"
        path.write_text(_rows_csv(FIGURE_HEADER, rows))
        worst = max(rows, key=lambda r: r[2])
        print(f"{name:9s} eta={hat.eta:.4f}  max rms distortion {worst[2]:.3f} at i={worst[0]} -> {path}")


if __name__ == "__main__":
    main()
