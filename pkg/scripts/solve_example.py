"""Solve a Schwarz problem for n = 2 with a Gaussian datum and print the verification report."""

import numpy as np

from clifford_bvp import BoundaryFunction, Signature, solve_schwarz, verify_solution


def main() -> None:
    sig = Signature(2)
    c = BoundaryFunction.parse("gauss(x)*(1 + x0*e1)", sig)
    sol = solve_schwarz(-1, c)
    for w in ([0.0, 0.0, 1.0], [0.5, -0.5, 0.25], [2.0, 1.0, 3.0]):
        r = sol.principal_result(np.array(w))
        print(f"Phi{tuple(w)} = {r.value}  (error <= {r.total_error:.1e}, {r.nodes_used} nodes)")
    print(verify_solution(sol).to_text())


if __name__ == "__main__":
    main()
