"""Fix the sign of the blade-valued measure from the n = 1 closed form.

For c(x) = 1/(1 + x^2) the half-plane solution is Phi(z) = 1/(1 - i z), so
Phi(i) = 1/2.  Prints S[c](0, 1) for both orientations and the one to use.
"""

import numpy as np

from clifford_bvp import BoundaryFunction, QuadratureScheme, Signature, cauchy_integral_S


def main() -> None:
    c = BoundaryFunction.parse("1/(1+abs2(x))", Signature(1))
    w = np.array([0.0, 1.0])
    best = None
    for s in (1, -1):
        r = cauchy_integral_S(c, w, QuadratureScheme(orientation=s))
        v = r.value.coeffs
        print(f"orientation {s:+d}: S = {v[0]:+.15f} {v[1]:+.3e} e1  (err est {r.total_error:.1e})")
        if abs(v[0] - 0.5) < 1e-6:
            best = s
    print(f"calibrated orientation: {best:+d}")


if __name__ == "__main__":
    main()
