"""How fast does the small-leverage approximation close in on the exact variance?

Prints max_i |exact - approx| and its ratio to n^2 for equispaced designs.
"""

import argparse
import time

import numpy as np

from rankdistort import compute_hat_matrix, equispaced, exact_var, polynomial_design
from rankdistort.approx import approx_matrix


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--degree", type=int, default=1)
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 40, 80, 160, 320])
    args = ap.parse_args()
    print(f"{'n':>5} {'eta':>9} {'max|err|':>10} {'max|err|/n^2':>13} {'sec':>6}")
    for n in args.sizes:
        t = time.perf_counter()
        hat = compute_hat_matrix(polynomial_design(equispaced(n, 0, 1), args.degree))
        ex = np.array([exact_var(hat, i) for i in range(1, n + 1)])
        err = np.abs(ex - np.diag(approx_matrix(hat))).max()
        print(f"{n:5d} {hat.eta:9.5f} {err:10.4f} {err / n**2:13.3e} {time.perf_counter() - t:6.2f}")


if __name__ == "__main__":
    main()
