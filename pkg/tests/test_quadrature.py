import math

import numpy as np
import pytest

from clifford_bvp.algebra import Multivector, Signature
from clifford_bvp.boundary import BoundaryFunction
from clifford_bvp.errors import EvaluationOnHyperplane, NonDecayingDatum
from clifford_bvp.monogenic import PointField, dirac_residual, upper_half
from clifford_bvp.quadrature import (
    ORIENTATION,
    QuadratureScheme,
    axis_breakpoints,
    cauchy_integral_S,
    cauchy_normalizer,
    condition_satisfied,
    graded_family,
    moment_integral,
    moment_integrals,
    sphere_area_constant,
    tail_bound,
)

S1 = Signature(1)
S2 = Signature(2)


def test_sphere_area_constant():
    assert sphere_area_constant(1) == pytest.approx(2 * math.pi)
    assert sphere_area_constant(2) == pytest.approx(4 * math.pi)
    assert sphere_area_constant(3) == pytest.approx(2 * math.pi**2)
    assert cauchy_normalizer(1) == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        sphere_area_constant(0)


def test_orientation_calibration():
    """Fixes the sign of dsigma: Phi(i) = 1/(1 - i*i) = +1/2 for c = 1/(1 + x^2)."""
    c = BoundaryFunction.parse("1/(1+abs2(x))", S1)
    w = np.array([0.0, 1.0])
    plus = cauchy_integral_S(c, w, QuadratureScheme(orientation=1)).value.coeffs
    minus = cauchy_integral_S(c, w, QuadratureScheme(orientation=-1)).value.coeffs
    assert plus[0] == pytest.approx(0.5, abs=1e-9)
    assert minus[0] == pytest.approx(-0.5, abs=1e-9)
    assert ORIENTATION == 1


@pytest.mark.parametrize("x, y", [(0.5, 0.5), (-2.0, 0.25), (3.0, 2.0), (0.1, 0.01)])
def test_n1_matches_closed_form(x, y):
    c = BoundaryFunction.parse("1/(1+abs2(x))", S1)
    got = cauchy_integral_S(c, np.array([x, y])).value.coeffs
    ref = 1.0 / (1.0 - 1j * complex(x, y))
    assert abs(complex(got[0], got[1]) - ref) < 1e-8


def test_error_estimate_brackets_refinement():
    c = BoundaryFunction.parse("gauss(x)*(1 + x0*e1)", S2)
    w = np.array([0.3, -0.2, 0.4])
    base = QuadratureScheme()
    a = cauchy_integral_S(c, w, base)
    b = cauchy_integral_S(c, w, base.refined(2.0))
    diff = float(np.linalg.norm(a.value.coeffs - b.value.coeffs))
    assert diff <= max(10 * a.total_error, 1e-9)
    assert b.nodes_used > a.nodes_used


def test_linearity():
    sig = S2
    w = np.array([0.2, 0.1, 0.7])
    c1 = BoundaryFunction.parse("gauss(x)", sig)
    c2 = BoundaryFunction.parse("x1*gauss(x)*e1", sig)
    both = BoundaryFunction.parse("2*gauss(x) - 3*x1*gauss(x)*e1", sig)
    v = cauchy_integral_S(both, w).value
    ref = 2 * cauchy_integral_S(c1, w).value - 3 * cauchy_integral_S(c2, w).value
    assert v.allclose(ref, atol=1e-9)


def test_n2_monogenic_at_20_points():
    c = BoundaryFunction.parse("gauss(x)", S2)
    f = PointField(S2, lambda w: cauchy_integral_S(c, w).value, upper_half, "S")
    rng = np.random.default_rng(12)
    pts = np.column_stack([rng.uniform(-1, 1, (20, 2)), rng.uniform(0.5, 1.5, 20)])
    worst = max(np.linalg.norm(dirac_residual(f, w, h=1e-3).coeffs) for w in pts)
    assert worst < 1e-5


def test_zero_datum_and_hyperplane():
    z = BoundaryFunction.zero(S2)
    r = cauchy_integral_S(z, np.array([0.0, 0.0, 1.0]))
    assert r.value == Multivector.zero(S2) and r.nodes_used == 0
    with pytest.raises(EvaluationOnHyperplane):
        cauchy_integral_S(BoundaryFunction.parse("gauss(x)", S2), np.array([0.0, 0.0, 0.0]))


def test_non_decaying_datum():
    with pytest.raises(NonDecayingDatum):
        cauchy_integral_S(BoundaryFunction.parse("1", S1), np.array([0.0, 1.0]))
    with pytest.raises(NonDecayingDatum):
        moment_integral((0,), BoundaryFunction.parse("1/sqrt(1+abs2(x))", S1))


def test_tail_bound():
    assert tail_bound(math.inf, 0, 10.0, 2) < 1e-40
    assert math.isinf(tail_bound(0.0, 0, 10.0, 1, kernel_decay=1))
    assert math.isinf(tail_bound(None, 0, 10.0, 1))
    # int_{|x|>R} |x|^-3 dx over R^1 = 2 * R^-2 / 2
    assert tail_bound(3.0, 0, 10.0, 1) == pytest.approx(0.01)
    assert tail_bound(3.0, 0, 10.0, 1, C=0.0) == 0.0


def test_moments():
    even = BoundaryFunction.parse("gauss(x)", S1)
    m0 = moment_integrals((0,), even)
    assert m0.sigma.value.coeffs[1] == pytest.approx(-math.sqrt(math.pi), abs=1e-9)
    assert m0.lebesgue.value.coeffs[0] == pytest.approx(math.sqrt(math.pi), abs=1e-9)
    odd = BoundaryFunction.parse("x0*gauss(x)", S1)
    r = moment_integral((0,), odd)
    assert np.linalg.norm(r.value.coeffs) < 1e-12
    assert condition_satisfied(r, QuadratureScheme())
    # Z^(1) = z_1 = -x0 e1 on the line: int -x0 e1 (-e1) x0 e^{-x0^2} dx = -sqrt(pi)/2
    r1 = moment_integral((1,), odd)
    assert r1.value.coeffs[0] == pytest.approx(-math.sqrt(math.pi) / 2, abs=1e-9)


def test_graded_mesh():
    fam = graded_family(0.0, 1.0, 100.0, 0.8, 16)
    assert fam[0] <= -100.0 and fam[-1] >= 100.0
    edges = axis_breakpoints(-10.0, 10.0, [fam], 1e-9)
    assert edges[0] == -10.0 and edges[-1] == 10.0
    assert np.all(np.diff(edges) > 0)
