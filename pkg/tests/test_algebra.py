import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from clifford_bvp.algebra import (
    Multivector,
    Signature,
    bar,
    basis_sign,
    blade_name,
    decompose,
    format_multivector,
    invert,
    is_para_real,
    left_matrix,
    mask_of,
    mul,
    mul_arrays,
    norm,
    norm0,
    paravector,
    power,
    star,
)
from clifford_bvp.errors import SignatureMismatch, SingularElement
from clifford_bvp.expr import parse_multivector


def reduce_word(word):
    """Generator-reduction oracle: bubble sort a word of generators, e_i e_i = -1."""
    word = list(word)
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if word[i] > word[i + 1]:
                word[i], word[i + 1] = word[i + 1], word[i]
                sign = -sign
                changed = True
    out = []
    for g in word:
        if out and out[-1] == g:
            out.pop()
            sign = -sign
        else:
            out.append(g)
    return sign, out


def gens(mask, n):
    return [j + 1 for j in range(n) if mask >> j & 1]


def test_basis_sign_examples():
    sig = Signature(2)
    assert basis_sign(0b01, 0b10, sig) == (1, 0b11)
    assert basis_sign(0b01, 0b01, sig) == (-1, 0)
    assert basis_sign(0b11, 0b01, sig) == (1, 0b10)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_basis_sign_matches_reduction(n):
    sig = Signature(n)
    for a, b in itertools.product(range(1 << n), repeat=2):
        sign, word = reduce_word(gens(a, n) + gens(b, n))
        assert basis_sign(a, b, sig) == (sign, mask_of(word))


def test_signature_bounds():
    with pytest.raises(ValueError):
        Signature(0)
    with pytest.raises(ValueError):
        Signature(13)


def test_generator_squares_and_bivector():
    sig = Signature(3)
    one = Multivector.scalar(sig, 1.0)
    for j in (1, 2, 3):
        e = Multivector.generator(sig, j)
        assert mul(e, e) == -one
    e12 = Multivector.blade(sig, 0b011)
    assert mul(e12, e12) == -one
    e1, e2 = Multivector.generator(sig, 1), Multivector.generator(sig, 2)
    assert mul(e1, e2) == -mul(e2, e1)


def test_paravector_product_example():
    sig = Signature(1)
    a = paravector(sig, [1.0, 1.0])
    b = paravector(sig, [1.0, -1.0])
    assert mul(a, b) == Multivector.scalar(sig, 2.0)


def test_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        mul(Multivector.scalar(Signature(1), 1.0), Multivector.scalar(Signature(2), 1.0))


def test_immutable():
    a = Multivector.scalar(Signature(2), 1.0)
    with pytest.raises(AttributeError):
        a.coeffs = None
    with pytest.raises(ValueError):
        a.coeffs[0] = 3.0


def test_bar_signs_by_grade():
    sig = Signature(3)
    for mask in range(8):
        k = bin(mask).count("1")
        expected = (-1) ** (k * (k + 1) // 2)
        b = bar(Multivector.blade(sig, mask))
        assert b.coeffs[mask] == expected


def test_star_flips_last_generator():
    sig = Signature(3)
    for mask in range(8):
        s = star(Multivector.blade(sig, mask)).coeffs[mask]
        assert s == (-1.0 if mask & 0b100 else 1.0)


def test_decompose_reassembles():
    sig = Signature(3)
    rng = np.random.default_rng(0)
    a = Multivector(sig, rng.normal(size=8))
    re, il, ir = decompose(a)
    en = Multivector.generator(sig, 3)
    assert is_para_real(re) and is_para_real(il) and is_para_real(ir)
    assert (re + mul(en, il)).allclose(a, atol=1e-15)
    assert (re + mul(ir, en)).allclose(a, atol=1e-15)


def test_invert_examples():
    sig = Signature(2)
    a = 2.0 * Multivector.generator(sig, 1)
    assert invert(a) == -0.5 * Multivector.generator(sig, 1)
    b = Multivector.scalar(sig, 1.0) + Multivector.blade(sig, 0b11)
    assert mul(invert(b), b).allclose(Multivector.scalar(sig, 1.0), atol=1e-14)
    with pytest.raises(SingularElement):
        invert(Multivector.zero(sig))


def test_zero_divisor_is_singular():
    # (1 + e123)(1 - e123) = 0 in C(V_3), since e123^2 = +1
    sig = Signature(3)
    z = Multivector.scalar(sig, 1.0) + Multivector.blade(sig, 0b111)
    with pytest.raises(SingularElement):
        invert(z)


def test_power_negative():
    sig = Signature(2)
    w = paravector(sig, [1.0, 2.0, -1.0])
    assert mul(power(w, -2), power(w, 2)).allclose(Multivector.scalar(sig, 1.0), atol=1e-14)


def test_left_matrix_matches_product():
    sig = Signature(3)
    rng = np.random.default_rng(4)
    a, b = Multivector(sig, rng.normal(size=8)), Multivector(sig, rng.normal(size=8))
    assert np.allclose(left_matrix(a) @ b.coeffs, mul(a, b).coeffs, atol=1e-14)


def test_norm0_is_scaled_norm():
    sig = Signature(3)
    a = Multivector(sig, np.arange(8.0))
    assert norm0(a) == pytest.approx(2**1.5 * norm(a))


def test_blade_names():
    assert blade_name(0b011, 3) == "e12"
    assert blade_name(0, 3) == "e0"
    assert blade_name((1 << 0) | (1 << 9), 10) == "e(1,10)"


def test_text_form_round_trip():
    sig = Signature(3)
    rng = np.random.default_rng(9)
    for _ in range(20):
        a = Multivector(sig, rng.normal(size=8) * (rng.uniform(size=8) < 0.6))
        assert parse_multivector(format_multivector(a), sig) == a
    assert format_multivector(Multivector.zero(sig)) == "0.0"


coeff = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def elements(draw, n, count=3):
    k = 1 << n
    return [Multivector(Signature(n), draw(st.lists(coeff, min_size=k, max_size=k))) for _ in range(count)]


@given(st.integers(1, 4).flatmap(lambda n: elements(n)))
def test_ring_axioms(triple):
    a, b, c = triple
    scale = 1.0 + norm(a) * norm(b) * norm(c) * 2 ** a.sig.n
    assert norm(mul(mul(a, b), c) - mul(a, mul(b, c))) <= 1e-12 * scale
    assert norm(mul(a, b + c) - (mul(a, b) + mul(a, c))) <= 1e-12 * scale
    assert bar(bar(a)) == a
    assert star(star(a)) == a
    assert norm(bar(mul(a, b)) - mul(bar(b), bar(a))) <= 1e-12 * scale
    assert norm(star(mul(a, b)) - mul(star(a), star(b))) <= 1e-12 * scale


@given(st.integers(1, 5), st.data())
def test_paravector_norm_law(n, data):
    sig = Signature(n)
    w = paravector(sig, data.draw(st.lists(coeff, min_size=n + 1, max_size=n + 1)))
    mu = paravector(sig, data.draw(st.lists(coeff, min_size=n + 1, max_size=n + 1)))
    assert norm(mul(w, mu)) == pytest.approx(norm(w) * norm(mu), rel=1e-12, abs=1e-12)


@given(st.integers(1, 4).flatmap(lambda n: elements(n, 2)))
def test_norm0_submultiplicative(pair):
    a, b = pair
    assert norm0(mul(a, b)) <= norm0(a) * norm0(b) * (1 + 1e-12) + 1e-12


def test_mul_arrays_broadcasts():
    sig = Signature(2)
    rng = np.random.default_rng(2)
    a = rng.normal(size=(5, 4))
    b = rng.normal(size=4)
    out = mul_arrays(a, b, 2)
    for i in range(5):
        assert np.allclose(out[i], mul(Multivector(sig, a[i]), Multivector(sig, b)).coeffs)
