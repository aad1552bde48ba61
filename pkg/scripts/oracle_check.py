"""Compare exact distortion matrices with Monte Carlo on random small designs."""

import argparse

import numpy as np

from rankdistort import DesignMatrix, SimulationConfig, compute_hat_matrix, exact_matrix, simulate, tie_free


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--designs", type=int, default=10)
    ap.add_argument("--reps", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for k in range(args.designs):
        n = int(rng.integers(4, 9))
        p = int(rng.integers(1, n))
        d = DesignMatrix(rng.standard_normal((n, p)))
        hat = compute_hat_matrix(d)
        if not tie_free(hat):
            print(f"design {k}: skipped (tie)")
            continue
        res = simulate(SimulationConfig(d, args.reps, seed=args.seed + k), hat=hat)
        z = np.abs(exact_matrix(hat).cov - res.mean_cov) / np.where(res.se_cov > 0, res.se_cov, np.inf)
        worst = max(worst, float(z.max()))
        print(f"design {k}: n={n} p={p} eta={hat.eta:.3f} max|z|={z.max():.2f}")
    print(f"overall max |z| = {worst:.2f}")


if __name__ == "__main__":
    main()
