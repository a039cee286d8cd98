"""Arithmetic in the real Clifford algebra C(V_n) with e_i^2 = -1.

Basis blades e_A are indexed by bitmasks: bit ``j - 1`` is set iff the
generator e_j belongs to A.  Mask 0 is the identity e_0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from numbers import Real
from typing import Iterable, Sequence

import numpy as np

from .errors import SignatureMismatch, SingularElement

MAX_GENERATORS = 12
DEFAULT_RTOL = 1e-12


def popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class Signature:
    """The algebra C(V_n); ``n`` is the number of anticommuting generators."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or not 1 <= self.n <= MAX_GENERATORS:
            raise ValueError(f"generator count must be an integer in 1..{MAX_GENERATORS}, got {self.n!r}")

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def en_mask(self) -> int:
        return 1 << (self.n - 1)

    def check_mask(self, mask: int) -> None:
        if not 0 <= mask < self.dim:
            raise ValueError(f"blade mask {mask} out of range for n={self.n}")


def basis_sign(a: int, b: int, sig: Signature) -> tuple[int, int]:
    """Product e_A e_B = sign * e_{A xor B}.

    The sign is (-1)^{#(A & B)} (-1)^{P(A,B)} where P counts, for every
    j in B, the elements of A that are larger than j.
    """
    sig.check_mask(a)
    sig.check_mask(b)
    swaps = 0
    bb = b
    while bb:
        low = bb & -bb
        j = low.bit_length() - 1
        swaps += popcount(a >> (j + 1))
        bb ^= low
    exponent = popcount(a & b) + swaps
    return (-1 if exponent & 1 else 1), a ^ b


@lru_cache(maxsize=None)
def product_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Full (K, K) tables of result masks and signs, K = 2^n."""
    k = 1 << n
    masks = np.arange(k, dtype=np.int64)
    a = masks[:, None]
    b = masks[None, :]
    bits = np.array([popcount(i) for i in range(k)], dtype=np.int64)
    exponent = bits[a & b]
    for j in range(n):
        has_j = (b >> j) & 1
        exponent = exponent + has_j * bits[a >> (j + 1)]
    sign = np.where(exponent & 1, -1.0, 1.0)
    idx = np.broadcast_to(a ^ b, (k, k)).copy()
    idx.flags.writeable = False
    sign.flags.writeable = False
    return idx, sign


@lru_cache(maxsize=None)
def _grades(n: int) -> np.ndarray:
    g = np.array([popcount(i) for i in range(1 << n)], dtype=np.int64)
    g.flags.writeable = False
    return g


@lru_cache(maxsize=None)
def _bar_signs(n: int) -> np.ndarray:
    g = _grades(n)
    s = np.where(((g * (g + 1)) // 2) & 1, -1.0, 1.0)
    s.flags.writeable = False
    return s


@lru_cache(maxsize=None)
def _star_signs(n: int) -> np.ndarray:
    masks = np.arange(1 << n)
    s = np.where(masks & (1 << (n - 1)), -1.0, 1.0)
    s.flags.writeable = False
    return s


def mul_arrays(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Clifford product of coefficient arrays of shape (..., 2^n), broadcasting leading axes."""
    idx, sign = product_tables(n)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (1 << n,)
    out = np.zeros(shape)
    for i in range(1 << n):
        ai = a[..., i : i + 1]
        if not np.any(ai):
            continue
        out[..., idx[i]] += sign[i] * ai * b
    return out


def bar_array(a: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(a) * _bar_signs(n)


def star_array(a: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(a) * _star_signs(n)


def blade_name(mask: int, n: int) -> str:
    if mask == 0:
        return "e0"
    gens = [j + 1 for j in range(n) if mask >> j & 1]
    if n <= 9:
        return "e" + "".join(str(j) for j in gens)
    return "e(" + ",".join(str(j) for j in gens) + ")"


def mask_of(generators: Iterable[int]) -> int:
    """Mask of an ascending generator list; repeated generators are rejected."""
    mask = 0
    for j in generators:
        if j < 1:
            raise ValueError(f"generator index must be >= 1, got {j}")
        bit = 1 << (j - 1)
        if mask & bit:
            raise ValueError(f"generator e{j} repeated in blade")
        mask |= bit
    return mask


class Multivector:
    """An immutable element of C(V_n) stored densely as 2^n coefficients."""

    __slots__ = ("sig", "coeffs")

    def __init__(self, sig: Signature, coeffs):
        arr = np.array(coeffs, dtype=float)
        if arr.shape != (sig.dim,):
            raise ValueError(f"expected {sig.dim} coefficients, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("multivector coefficients must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "sig", sig)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    # constructors
    @classmethod
    def zero(cls, sig: Signature) -> "Multivector":
        return cls(sig, np.zeros(sig.dim))

    @classmethod
    def scalar(cls, sig: Signature, value: float) -> "Multivector":
        c = np.zeros(sig.dim)
        c[0] = value
        return cls(sig, c)

    @classmethod
    def blade(cls, sig: Signature, mask: int, value: float = 1.0) -> "Multivector":
        sig.check_mask(mask)
        c = np.zeros(sig.dim)
        c[mask] = value
        return cls(sig, c)

    @classmethod
    def generator(cls, sig: Signature, j: int) -> "Multivector":
        """e_j for j in 0..n (e_0 is the identity)."""
        if not 0 <= j <= sig.n:
            raise ValueError(f"generator index {j} out of range for n={sig.n}")
        return cls.blade(sig, 0 if j == 0 else 1 << (j - 1))

    # arithmetic
    def _check(self, other: "Multivector") -> None:
        if other.sig != self.sig:
            raise SignatureMismatch(f"n={self.sig.n} vs n={other.sig.n}")

    def __add__(self, other):
        if isinstance(other, Real):
            return self + Multivector.scalar(self.sig, float(other))
        if not isinstance(other, Multivector):
            return NotImplemented
        self._check(other)
        return Multivector(self.sig, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Real):
            return self - Multivector.scalar(self.sig, float(other))
        if not isinstance(other, Multivector):
            return NotImplemented
        self._check(other)
        return Multivector(self.sig, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Multivector(self.sig, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Real):
            return Multivector(self.sig, self.coeffs * float(other))
        if not isinstance(other, Multivector):
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, Real):
            return Multivector(self.sig, self.coeffs * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Real):
            return Multivector(self.sig, self.coeffs / float(other))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.sig == other.sig and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def __getitem__(self, mask: int) -> float:
        return float(self.coeffs[mask])

    def allclose(self, other: "Multivector", rtol: float = DEFAULT_RTOL, atol: float = 0.0) -> bool:
        self._check(other)
        scale = max(norm(self), norm(other), 1.0)
        return float(np.linalg.norm(self.coeffs - other.coeffs)) <= atol + rtol * scale

    @property
    def n(self) -> int:
        return self.sig.n

    def scalar_part(self) -> float:
        return float(self.coeffs[0])

    def __repr__(self):
        return f"Multivector(n={self.sig.n}, {format_multivector(self)})"

    def __str__(self):
        return format_multivector(self)


def _as_same(a: Multivector, b: Multivector) -> None:
    if a.sig != b.sig:
        raise SignatureMismatch(f"n={a.sig.n} vs n={b.sig.n}")


def mul(a: Multivector, b: Multivector) -> Multivector:
    _as_same(a, b)
    return Multivector(a.sig, mul_arrays(a.coeffs, b.coeffs, a.sig.n))


def bar(a: Multivector) -> Multivector:
    return Multivector(a.sig, bar_array(a.coeffs, a.sig.n))


def star(a: Multivector) -> Multivector:
    """Reflection across the hyperplane: Re(a) - e_n Im^l(a)."""
    return Multivector(a.sig, star_array(a.coeffs, a.sig.n))


def decompose(a: Multivector) -> tuple[Multivector, Multivector, Multivector]:
    """Split a = re + e_n*im_left = re + im_right*e_n with all parts free of e_n."""
    sig = a.sig
    has_n = (np.arange(sig.dim) & sig.en_mask) != 0
    re = np.where(has_n, 0.0, a.coeffs)
    rest = Multivector(sig, np.where(has_n, a.coeffs, 0.0))
    en = Multivector.generator(sig, sig.n)
    # e_n^{-1} = -e_n
    im_left = -mul(en, rest)
    im_right = -mul(rest, en)
    return Multivector(sig, re), im_left, im_right


def re_part(a: Multivector) -> Multivector:
    return decompose(a)[0]


def is_para_real(a: Multivector, tol: float = 0.0) -> bool:
    has_n = (np.arange(a.sig.dim) & a.sig.en_mask) != 0
    return bool(np.all(np.abs(a.coeffs[has_n]) <= tol))


def inner(a: Multivector, b: Multivector) -> float:
    _as_same(a, b)
    return float(np.dot(a.coeffs, b.coeffs))


def norm(a: Multivector) -> float:
    return float(np.linalg.norm(a.coeffs))


def norm0(a: Multivector) -> float:
    """Banach-algebra norm 2^{n/2} |a|, submultiplicative."""
    return 2.0 ** (a.sig.n / 2.0) * norm(a)


def is_paravector(a: Multivector, tol: float = 0.0) -> bool:
    g = _grades(a.sig.n)
    return bool(np.all(np.abs(a.coeffs[g > 1]) <= tol))


def paravector(sig: Signature, w: Sequence[float]) -> Multivector:
    """The capital map (w_0, ..., w_n) -> sum w_i e_i."""
    w = np.asarray(w, dtype=float)
    if w.shape != (sig.n + 1,):
        raise ValueError(f"paravector needs {sig.n + 1} components, got shape {w.shape}")
    c = np.zeros(sig.dim)
    c[0] = w[0]
    for j in range(1, sig.n + 1):
        c[1 << (j - 1)] = w[j]
    return Multivector(sig, c)


def paravector_components(a: Multivector) -> np.ndarray:
    n = a.sig.n
    return np.array([a.coeffs[0]] + [a.coeffs[1 << (j - 1)] for j in range(1, n + 1)])


def paravector_indices(n: int) -> np.ndarray:
    """Coefficient slots holding e_0, e_1, ..., e_n."""
    return np.array([0] + [1 << (j - 1) for j in range(1, n + 1)])


def left_matrix(a: Multivector) -> np.ndarray:
    """Matrix L with L @ b.coeffs == (a*b).coeffs."""
    idx, sign = product_tables(a.sig.n)
    k = a.sig.dim
    mat = np.zeros((k, k))
    for i in range(k):
        if a.coeffs[i] == 0.0:
            continue
        mat[idx[i], np.arange(k)] += sign[i] * a.coeffs[i]
    return mat


def invert(a: Multivector, cond_limit: float = 1e12) -> Multivector:
    """Two-sided inverse.

    Paravectors use bar(w)/|w|^2; anything else is solved on the left-regular
    representation.  Raises SingularElement when no inverse exists.
    """
    if is_paravector(a):
        nrm2 = float(np.dot(a.coeffs, a.coeffs))
        if nrm2 == 0.0:
            raise SingularElement("zero has no inverse")
        return bar(a) / nrm2
    mat = left_matrix(a)
    if not np.isfinite(np.linalg.cond(mat)) or np.linalg.cond(mat) > cond_limit:
        raise SingularElement(f"{format_multivector(a)} is not invertible")
    rhs = np.zeros(a.sig.dim)
    rhs[0] = 1.0
    return Multivector(a.sig, np.linalg.solve(mat, rhs))


def power(a: Multivector, m: int) -> Multivector:
    if m < 0:
        return power(invert(a), -m)
    out = Multivector.scalar(a.sig, 1.0)
    for _ in range(m):
        out = mul(out, a)
    return out


def _fmt_float(x: float) -> str:
    return repr(float(x))


def format_multivector(a: Multivector) -> str:
    """Text form ``c0 + c1*e1 + c12*e12``; coefficients use repr for exact round trip."""
    parts: list[str] = []
    for mask in range(a.sig.dim):
        c = float(a.coeffs[mask])
        if c == 0.0:
            continue
        mag = _fmt_float(abs(c))
        term = mag if mask == 0 else f"{mag}*{blade_name(mask, a.sig.n)}"
        if not parts:
            parts.append(("-" if c < 0 else "") + term)
        else:
            parts.append(("- " if c < 0 else "+ ") + term)
    return " ".join(parts) if parts else "0.0"
