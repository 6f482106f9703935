"""Closed-form Jacobi fields against the RK4 oracle over a (K, ell) grid.

Prints max |u_closed - u_oracle| and u'(1) for a range of oracle step counts,
which shows the fourth-order convergence of the oracle.
"""
import argparse

import numpy as np

from spaceform.jacobi import (
    JacobiParams,
    jacobi_derivative_at_one,
    jacobi_oracle_normalized,
    jacobi_scalar,
)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, nargs="+", default=[100, 1000, 10_000])
    args = ap.parse_args(argv)
    print("K,ell,steps,max_abs_err,u_dot_1")
    for K in (-1.0, 0.0, 1.0):
        for ell in (0.25, 0.5, 1.0, 2.0):
            params = JacobiParams(K, ell)
            for n in args.steps:
                t, u, _ = jacobi_oracle_normalized(K, ell, steps=n)
                err = float(np.max(np.abs(jacobi_scalar(params, t) - u)))
                print(f"{K},{ell},{n},{err!r},{jacobi_derivative_at_one(params)!r}")


if __name__ == "__main__":
    main()
