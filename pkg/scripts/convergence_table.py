"""Quadrature self-convergence: S[c](w) under successive mesh refinement.

Prints a CSV of (refinement, nodes, value_e0, change, error_estimate).
"""

import numpy as np

from clifford_bvp import BoundaryFunction, QuadratureScheme, Signature, cauchy_integral_S


def main() -> None:
    c = BoundaryFunction.parse("1/(1+abs2(x))", Signature(2), decay=2.0)
    w = np.array([0.3, -0.2, 0.5])
    prev = None
    print("refinement,nodes,value_e0,change,error_estimate")
    for f in (1.0, 1.5, 2.0, 3.0):
        r = cauchy_integral_S(c, w, QuadratureScheme(R=1e3).refined(f))
        v = r.value.coeffs
        change = float("nan") if prev is None else float(np.linalg.norm(v - prev))
        print(f"{f},{r.nodes_used},{v[0]:.12f},{change:.3e},{r.error_estimate:.3e}")
        prev = v


if __name__ == "__main__":
    main()
