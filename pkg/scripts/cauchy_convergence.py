"""Contour integral of exp(zeta) d(zeta) against the number of quadrature points."""

import argparse

import numpy as np

from nilsolve.presets import draw_free, solve_preset
from nilsolve.solutions import build_xi_forms, exp_family
from nilsolve.verify import CircleSpec, cauchy_integral_check


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="helmholtz")
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--radius", type=float, default=1.0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    xf = build_xi_forms(solve_preset(args.preset, draw_free(args.preset, args.n, rng), args.n))
    members = exp_family(xf, args.n - 1)
    loop = CircleSpec(tuple([0.0] * xf.d), args.radius, (0, xf.d - 1))
    counts = [4, 8, 16, 32, 64, 1024]
    print("points " + " ".join(f"{'n=' + str(k):>10}" for k in range(args.n)))
    for q in counts:
        row = [abs(cauchy_integral_check(members, xf, loop, k, q)) for k in range(args.n)]
        print(f"{q:>6} " + " ".join(f"{v:>10.2e}" for v in row))


if __name__ == "__main__":
    main()
