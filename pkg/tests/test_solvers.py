import math

import numpy as np
import pytest

from clifford_bvp.algebra import Multivector, Signature, decompose, mul
from clifford_bvp.boundary import BoundaryFunction
from clifford_bvp.errors import ConditionViolated, DatumLimitNonzero, DomainError, EvaluationOnHyperplane, SingularLambda
from clifford_bvp.monogenic import PointField, dirac_residual, fueter_Z, multi_indices_upto
from clifford_bvp.quadrature import QuadratureScheme
from clifford_bvp.solvers import (
    HilbertProblem,
    ProbeSet,
    SectionallyRegularField,
    SolverWarning,
    analyse_case,
    case_tag,
    condition_indices,
    count_conditions,
    count_free_constants,
    polynomial_coefficient_blade,
    reflective,
    self_reflection,
    solve_hilbert,
    solve_riemann_jump,
    solve_schwarz,
    symmetric_extension,
    verify_solution,
)

S1 = Signature(1)
S2 = Signature(2)


def test_counts_match_index_lists():
    for n in range(1, 5):
        for m in range(0, 6):
            assert count_free_constants(n, m) == len(multi_indices_upto(n, m))
        for m in range(-8, -n + 1):
            assert count_conditions(n, m) == len(condition_indices(n, m))
    assert count_conditions(1, -1) == 0  # n = 1, m = -1: no moments
    with pytest.raises(ValueError):
        count_free_constants(2, -1)
    with pytest.raises(ValueError):
        count_conditions(3, -2)


def test_case_tags():
    assert [case_tag(3, m) for m in (2, 0, -1, -2, -3, -5)] == ["C1", "C1", "C2", "C3", "C4", "C4"]
    assert case_tag(1, -1) == "C2"


def test_singular_lambda():
    lam = Multivector.scalar(Signature(3), 1.0) + Multivector.blade(Signature(3), 0b111)
    with pytest.raises(SingularLambda):
        HilbertProblem(Signature(3), -1, lam, BoundaryFunction.zero(Signature(3)))


def test_polynomial_terms_have_zero_real_part_on_hyperplane():
    rng = np.random.default_rng(1)
    for n in (1, 2, 3):
        sig = Signature(n)
        for alpha in multi_indices_upto(n, 3):
            k = polynomial_coefficient_blade(alpha, sig)
            r = Multivector(sig, rng.normal(size=sig.dim) * ((np.arange(sig.dim) & sig.en_mask) == 0))
            for _ in range(5):
                x = np.append(rng.normal(size=n), 0.0)
                term = mul(mul(fueter_Z(alpha, x, sig), r), k)
                assert np.max(np.abs(decompose(term)[0].coeffs)) < 1e-12


def test_free_polynomial_solution():
    c = BoundaryFunction.parse("gauss(x)", S2)
    sol = solve_schwarz(1, c)
    assert sol.case_tag == "C1" and len(sol.poly_basis) == 3
    sol2 = sol.with_constants({(0, 0): Multivector.scalar(S2, 1.0), (1, 0): Multivector(S2, [0.5, -2.0, 0, 0])})
    w = np.array([0.3, -0.4, 0.8])
    diff = sol2.evaluate(w) - sol.evaluate(w)
    assert np.linalg.norm(diff.coeffs) > 0.1
    # the polynomial part is monogenic and invisible to the boundary condition
    poly = PointField(S2, sol2.polynomial)
    assert np.linalg.norm(dirac_residual(poly, w, h=1e-3).coeffs) < 1e-10
    assert np.max(np.abs(decompose(sol2.polynomial(np.array([0.3, -0.4, 0.0])))[0].coeffs)) < 1e-14
    with pytest.raises(ValueError):
        sol.with_constants({(0, 0): Multivector.generator(S2, 2)})
    with pytest.raises(ValueError):
        sol.with_constants({(2, 0): Multivector.scalar(S2, 1.0)})


def test_constants_only_for_m_nonnegative():
    sol = solve_schwarz(-1, BoundaryFunction.parse("gauss(x)", S1))
    with pytest.raises(ValueError):
        sol.with_constants({(0,): Multivector.scalar(S1, 1.0)})


def test_evaluate_domain():
    sol = solve_schwarz(-1, BoundaryFunction.parse("gauss(x)", S1))
    with pytest.raises(DomainError):
        sol.evaluate(np.array([0.0, -1.0]))


def test_zero_problem():
    sol = solve_schwarz(-1, BoundaryFunction.zero(S2))
    assert sol.evaluate(np.array([0.1, 0.2, 0.3])) == Multivector.zero(S2)
    assert verify_solution(sol, ProbeSet.default(2)).passed


def test_datum_limit_nonzero():
    with pytest.raises(DatumLimitNonzero):
        solve_schwarz(-1, BoundaryFunction.parse("1 - gauss(x)", S1))
    report = analyse_case(1, -1, BoundaryFunction.parse("1 - gauss(x)", S1), QuadratureScheme(), strict=False)
    assert report.violated and not report.limit_ok


def test_condition_violated_carries_report():
    with pytest.raises(ConditionViolated) as info:
        solve_schwarz(-2, BoundaryFunction.parse("gauss(x)", S1))
    entries = info.value.report
    assert len(entries) == 1 and not entries[0].satisfied
    assert entries[0].value.coeffs[1] == pytest.approx(-math.sqrt(math.pi), abs=1e-9)


def test_divergent_moment_is_a_violation():
    report = analyse_case(1, -3, BoundaryFunction.parse("1/(1+abs2(x))", S1), QuadratureScheme(), strict=False)
    assert [e.alpha for e in report.solvability] == [(0,), (1,)]
    assert report.solvability[1].moment is None and not report.solvability[1].satisfied


def test_odd_datum_satisfies_moment():
    sol = solve_schwarz(-2, BoundaryFunction.parse("x0*gauss(x)", S1))
    assert sol.conditions_satisfied


def test_nonparavector_lambda_warns():
    c = BoundaryFunction.parse("gauss(x)", S2)
    lam = Multivector.scalar(S2, 1.0) + Multivector.blade(S2, 0b11)
    with pytest.warns(SolverWarning, match="not a paravector"):
        sol = solve_hilbert(HilbertProblem(S2, -1, lam, c))
    assert not sol.lambda_is_paravector
    w = np.array([0.1, 0.2, 0.5])
    assert mul(sol.evaluate(w), lam).allclose(sol.schwarz_value(w), atol=1e-14)


def test_riemann_jump_n1():
    c = BoundaryFunction.parse("1/(1+abs2(x))", S1)
    psi, report = solve_riemann_jump(-1, c)
    x = 0.7
    vals = [(psi(np.array([x, e])) + psi(np.array([x, -e]))).coeffs[0] for e in (2e-3, 1e-3)]
    extrap = 2 * vals[1] - vals[0]
    assert extrap == pytest.approx(2 * c([x]).coeffs[0], abs=1e-4)
    with pytest.raises(EvaluationOnHyperplane):
        psi(np.array([x, 0.0]))
    assert report.case.case_tag == "C2"


def test_symmetric_extension_is_monogenic_below():
    c = BoundaryFunction.parse("gauss(x)*(1 + x0*e1)", S2)
    sol = solve_schwarz(-1, c)
    ext = sol.extension()
    w = np.array([0.2, -0.3, -0.8])
    assert np.linalg.norm(dirac_residual(ext.lower, w, h=1e-3).coeffs) < 1e-5


def test_reflection_algebra():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(4, 3))
    fn = lambda w: Multivector(S2, np.tanh(A @ w))
    psi = SectionallyRegularField.from_function(S2, fn)
    r = self_reflection(psi)
    for _ in range(10):
        w = rng.normal(size=3)
        assert reflective(reflective(psi))(w) == psi(w)
        assert r(w).allclose(self_reflection(r)(w), atol=1e-15)
        assert r(w).allclose(reflective(r)(w), atol=1e-15)


def test_verification_negative_control():
    """A field that is not monogenic and misses the boundary data must fail."""
    sol = solve_schwarz(-1, BoundaryFunction.parse("1/(1+abs2(x))", S1))

    class Broken:
        sig, m, c, lambda_ = sol.sig, sol.m, sol.c, sol.lambda_

        @staticmethod
        def schwarz_value(w):
            return Multivector(S1, [w[0] ** 2 + 1.0, 0.0])

        evaluate = schwarz_value

    report = verify_solution(Broken(), ProbeSet.default(1))
    assert not report.dirac_ok and not report.boundary_ok and not report.passed
    assert "overall: FAIL" in report.to_text()


@pytest.mark.slow
def test_verify_n2_gaussian():
    sol = solve_schwarz(-1, BoundaryFunction.parse("gauss(x)", S2))
    report = verify_solution(sol, ProbeSet.default(2))
    assert report.passed, report.to_text()
    assert report.growth_order <= -1
