"""Print resolvent coefficients and Psi polynomials of the rho-chain as LaTeX."""

import argparse

from nilsolve.resolvent import psi_rho, resolvent_rho


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=7)
    args = ap.parse_args()
    for a in resolvent_rho(args.n):
        print(a.to_latex(), r"\\")
    print()
    for p in psi_rho(args.n):
        print(p.to_latex(), r"\\")


if __name__ == "__main__":
    main()
