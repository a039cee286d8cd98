import math

import numpy as np
import pytest

from clifford_bvp.algebra import Multivector, Signature
from clifford_bvp.boundary import (
    BoundaryFunction,
    PairSampler,
    ShellSampler,
    classify_hat_H,
    estimate_decay,
    estimate_holder,
    estimate_holder_dagger,
    eval_boundary,
    f_m_array,
    limit_at_infinity,
    load_table_csv,
)
from clifford_bvp.errors import DomainError, ParaRealViolation

S1 = Signature(1)
S2 = Signature(2)


def test_eval_boundary_point_forms():
    c = BoundaryFunction.parse("1/(1+abs2(x))", S1)
    assert eval_boundary(c, [1.0]) == Multivector.scalar(S1, 0.5)
    assert eval_boundary(c, [1.0, 0.0]) == Multivector.scalar(S1, 0.5)
    with pytest.raises(DomainError):
        eval_boundary(c, [1.0, 0.1])


def test_zero_datum():
    z = BoundaryFunction.zero(S2)
    assert z.is_zero and z.decay == math.inf
    assert not BoundaryFunction.parse("x0", S2).is_zero


def test_table_interpolation_and_validation():
    t = BoundaryFunction.from_table(S1, [[2.0], [0.0], [1.0]], [[2.0, 0.0], [1.0, 0.0], [3.0, 0.0]])
    assert t([1.0]) == Multivector.scalar(S1, 3.0)
    assert t([0.5]).coeffs[0] == pytest.approx(2.0)
    assert t([5.0]).coeffs[0] == 0.0
    with pytest.raises(ParaRealViolation):
        BoundaryFunction.from_table(S1, [[0.0]], [[1.0, 1.0]])
    with pytest.raises(ValueError):
        BoundaryFunction.from_table(S1, [[0.0], [0.0]], [[1.0, 0.0], [2.0, 0.0]])


def test_table_2d(tmp_path):
    sig = Signature(3)
    path = tmp_path / "c.csv"
    rows = ["x0,x1,x2,e0,e12"]
    for x in (-1.0, 0.0, 1.0):
        for y in (-1.0, 0.0, 1.0):
            for z in (-1.0, 0.0, 1.0):
                rows.append(f"{x},{y},{z},{x + y + z},{x * y}")
    path.write_text("\n".join(rows) + "\n")
    c = load_table_csv(path, sig)
    v = c([1.0, 1.0, 0.0])
    assert v.coeffs[0] == 2.0 and v.coeffs[0b011] == 1.0
    # linear data are reproduced inside the hull
    assert c([0.25, -0.5, 0.1]).coeffs[0] == pytest.approx(-0.15)


def test_table_rejects_e_n_column(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("x0,e1\n0,1\n")
    with pytest.raises(ParaRealViolation):
        load_table_csv(path, S1)


def test_holder_indices():
    assert estimate_holder(BoundaryFunction.parse("x0", S1)).mu == pytest.approx(1.0, abs=0.05)
    half = estimate_holder(BoundaryFunction.parse("sqrt(sqrt(abs2(x)))", S2), PairSampler(np.zeros(2)))
    assert half.mu == pytest.approx(0.5, abs=0.05)
    assert half.in_class


def test_holder_flags_pole():
    est = estimate_holder(BoundaryFunction.parse("1/x0", S1))
    assert not est.in_class


def test_dagger_flags_linear_growth():
    assert not estimate_holder_dagger(BoundaryFunction.parse("x0", S1)).in_class
    assert estimate_holder_dagger(BoundaryFunction.parse("1/(1+abs2(x))", S1)).in_class


def test_samplers_deterministic():
    a = PairSampler(np.zeros(2)).pairs(2)
    b = PairSampler(np.zeros(2)).pairs(2)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    t, s = ShellSampler().pairs(3)
    assert np.all(np.linalg.norm(t, axis=1) >= 1.0 - 1e-12)


def test_f_m_weighting():
    c = BoundaryFunction.parse("1", S2)
    pts = np.array([[1.0, 2.0]])
    # x = 1 + 2 e1; x^2 = 1 - 4 + 4 e1
    assert np.allclose(f_m_array(c, 2, pts)[0], [-3.0, 4.0, 0.0, 0.0])
    # x^{-1} x = 1
    back = f_m_array(BoundaryFunction.parse("1 + 2*e1", S2), -1, pts)[0]
    assert np.allclose(back, [1.0, 0.0, 0.0, 0.0])


def test_limit_at_infinity():
    c = BoundaryFunction.parse("1/(1+abs2(x))", S1)
    assert limit_at_infinity(c, 0).value == Multivector.zero(S1)
    assert limit_at_infinity(c, 2).value.coeffs[0] == pytest.approx(1.0, abs=1e-6)
    assert limit_at_infinity(BoundaryFunction.parse("sin(x0)", S1), 0).value is None


def test_classify_rational():
    c = BoundaryFunction.parse("1/(1+abs2(x))", S1)
    r1 = classify_hat_H(c, 1)
    assert r1.in_hat_H_m and r1.in_hat_H_m0
    r2 = classify_hat_H(c, 2)
    assert r2.in_hat_H_m and not r2.in_hat_H_m0
    assert float(r2.f_m_at_infinity.coeffs[0]) == pytest.approx(1.0, abs=1e-6)
    assert "hat-H_m,0=no" in r2.summary()


def test_estimate_decay():
    assert estimate_decay(BoundaryFunction.parse("1/(1+abs2(x))", S1)) == pytest.approx(2.0, abs=0.01)
    assert estimate_decay(BoundaryFunction.parse("gauss(x)", S2)) == math.inf
    assert estimate_decay(BoundaryFunction.parse("x0", S1, decay=3.0)) == 3.0
