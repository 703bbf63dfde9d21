"""Weighted convergence profiles for the three shift systems, as plot-ready CSV.

Writes ``<out>/{toral,baker,laguerre}.csv`` with columns N, deviation, weighted for
one seeded test function per system, and prints the envelope statistic of each.

    python scripts/rate_profiles.py [--seed 1] [--log2-nmax 16] [--eta 0.5] [--out runs/profiles]
"""

import argparse
from fractions import Fraction
from pathlib import Path

import numpy as np

from shiftrate.laguerre import laguerre_pointwise_rate, random_laguerre_coeffs
from shiftrate.rates import geometric_grid
from shiftrate.torus import random_fourier, random_generic_point, rate_series
from shiftrate.walsh import baker_rate_series, random_dyadic_point, random_walsh_function

FIBONACCI = [[1, 1], [1, 0]]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--log2-nmax", type=int, default=16)
    ap.add_argument("--eta", type=float, default=0.5)
    ap.add_argument("--out", default="runs/profiles")
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    n_max = 1 << args.log2_nmax

    f = random_fourier(rng, 50, radius=16)
    toral = rate_series(f, FIBONACCI, random_generic_point(rng), args.eta, geometric_grid(n_max))

    w = random_walsh_function(rng)
    baker = baker_rate_series(w, random_dyadic_point(rng, 4 * n_max), args.eta, geometric_grid(n_max))

    lag_max = min(n_max, 1 << 10)  # exact polynomial iteration grows quadratically
    lag = laguerre_pointwise_rate(random_laguerre_coeffs(rng), Fraction(int(rng.integers(1, 1001)), 100),
                                  args.eta, geometric_grid(lag_max))

    for name, s in (("toral", toral), ("baker", baker), ("laguerre", lag)):
        (out / f"{name}.csv").write_text(s.to_csv())
        print(f"{name:9s} N_max={s.N[-1]:>8d}  envelope={s.meta['envelope']:.4f}")


if __name__ == "__main__":
    main()
