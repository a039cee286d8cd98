"""Monogenic building blocks: Cauchy kernel, hypercomplex variables, Fueter
polynomials, finite-difference Dirac residuals and growth-order estimation.

Points of R^{n+1} are plain float arrays ``(w_0, ..., w_n)``.  Anything that
takes many points at once uses coefficient arrays of shape (N, 2^n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .algebra import (
    Multivector,
    Signature,
    mul_arrays,
    paravector_indices,
    bar_array,
)
from .errors import DomainError, PoleAtOrigin, StencilCrossesOrigin

MAX_DEGREE = 8
POLE_THRESHOLD = 1e-14

MultiIndex = tuple  # alpha = (alpha_1, ..., alpha_n), non-negative ints


# ---------------------------------------------------------------- fields


@dataclass(frozen=True)
class PointField:
    """A Clifford-valued function on an open subset of R^{n+1}.

    ``fn`` maps a point array to a Multivector and must be pure, so fields
    can be evaluated from several threads at once.
    """

    sig: Signature
    fn: Callable[[np.ndarray], Multivector]
    domain: Callable[[np.ndarray], bool] | None = None
    name: str = ""

    def contains(self, w) -> bool:
        return True if self.domain is None else bool(self.domain(np.asarray(w, dtype=float)))

    def __call__(self, w) -> Multivector:
        w = np.asarray(w, dtype=float)
        if not self.contains(w):
            raise DomainError(f"point {w.tolist()} outside the domain of {self.name or 'field'}")
        return self.fn(w)


def upper_half(w: np.ndarray) -> bool:
    return w[-1] > 0.0


def lower_half(w: np.ndarray) -> bool:
    return w[-1] < 0.0


def away_from_origin(w: np.ndarray) -> bool:
    return float(np.linalg.norm(w)) > POLE_THRESHOLD


def _point(sig: Signature, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (sig.n + 1,):
        raise ValueError(f"point needs {sig.n + 1} coordinates, got shape {w.shape}")
    return w


# ---------------------------------------------------------------- multi-indices


def check_multi_index(alpha: Sequence[int], n: int, max_degree: int = MAX_DEGREE) -> MultiIndex:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != n:
        raise ValueError(f"multi-index {alpha} must have length {n}")
    if any(a < 0 for a in alpha):
        raise ValueError(f"multi-index {alpha} has a negative entry")
    if sum(alpha) > max_degree:
        raise ValueError(f"|alpha| = {sum(alpha)} exceeds the degree cap {max_degree}")
    return alpha


def multi_indices(n: int, degree: int) -> list[MultiIndex]:
    """All alpha with |alpha| == degree, in lexicographic order of the index word."""
    out = []
    for word in combinations_with_replacement(range(1, n + 1), degree):
        out.append(tuple(word.count(j) for j in range(1, n + 1)))
    return out


def multi_indices_upto(n: int, max_degree: int) -> list[MultiIndex]:
    out: list[MultiIndex] = []
    for k in range(max_degree + 1):
        out.extend(multi_indices(n, k))
    return out


def index_word(alpha: MultiIndex) -> tuple[int, ...]:
    """Inverse of the counting map: (alpha_1, ..., alpha_n) -> sorted word over 1..n."""
    word: list[int] = []
    for j, a in enumerate(alpha, start=1):
        word.extend([j] * a)
    return tuple(word)


def distinct_arrangements(word: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Distinct permutations of a multiset, each produced once."""
    counts: dict[int, int] = {}
    for x in word:
        counts[x] = counts.get(x, 0) + 1
    keys = sorted(counts)
    k = len(word)
    current: list[int] = []

    def rec():
        if len(current) == k:
            yield tuple(current)
            return
        for key in keys:
            if counts[key]:
                counts[key] -= 1
                current.append(key)
                yield from rec()
                current.pop()
                counts[key] += 1

    yield from rec()


def fueter_term_count(alpha: MultiIndex) -> int:
    """Number of products summed in Z^alpha: |alpha|! / (alpha_1! ... alpha_n!)."""
    out = math.factorial(sum(alpha))
    for a in alpha:
        out //= math.factorial(a)
    return out


# ---------------------------------------------------------------- z_j and Z^alpha


def hyper_variable_z(j: int, w, sig: Signature) -> Multivector:
    """z_j(w) = w_j e_0 - w_0 e_j."""
    if not 1 <= j <= sig.n:
        raise ValueError(f"hypercomplex variable index {j} out of range 1..{sig.n}")
    w = _point(sig, w)
    c = np.zeros(sig.dim)
    c[0] = w[j]
    c[1 << (j - 1)] = -w[0]
    return Multivector(sig, c)


def z_arrays(points: np.ndarray, n: int) -> np.ndarray:
    """All z_j at many points: shape (N, n, 2^n)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.zeros((points.shape[0], n, 1 << n))
    for j in range(1, n + 1):
        out[:, j - 1, 0] = points[:, j]
        out[:, j - 1, 1 << (j - 1)] = -points[:, 0]
    return out


def fueter_array(alpha: MultiIndex, points: np.ndarray, n: int, max_degree: int = MAX_DEGREE) -> np.ndarray:
    """Z^alpha at many points, shape (N, 2^n)."""
    alpha = check_multi_index(alpha, n, max_degree)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    z = z_arrays(points, n)
    out = np.zeros((points.shape[0], 1 << n))
    word = index_word(alpha)
    if not word:
        out[:, 0] = 1.0
        return out
    for arrangement in distinct_arrangements(word):
        prod = z[:, arrangement[0] - 1]
        for j in arrangement[1:]:
            prod = mul_arrays(prod, z[:, j - 1], n)
        out += prod
    return out


def fueter_Z(alpha: MultiIndex, w, sig: Signature, max_degree: int = MAX_DEGREE) -> Multivector:
    """Symmetric power Z^alpha: the sum of all distinct products of the z_j
    containing z_j exactly alpha_j times."""
    w = _point(sig, w)
    return Multivector(sig, fueter_array(alpha, w[None, :], sig.n, max_degree)[0])


@dataclass(frozen=True)
class SymmetricPolynomial:
    """sum_alpha Z^alpha(w) c_alpha with Clifford coefficients on the right."""

    sig: Signature
    terms: Mapping[MultiIndex, Multivector] = field(default_factory=dict)

    def __post_init__(self):
        for alpha, c in self.terms.items():
            check_multi_index(alpha, self.sig.n)
            if c.sig != self.sig:
                raise ValueError("coefficient signature mismatch")

    @property
    def degree(self) -> int | None:
        """Deg(f): the largest |alpha| with a nonzero coefficient; None for the zero polynomial."""
        degs = [sum(a) for a, c in self.terms.items() if np.any(c.coeffs != 0.0)]
        return max(degs) if degs else None

    def evaluate_array(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros((points.shape[0], self.sig.dim))
        for alpha, c in self.terms.items():
            out += mul_arrays(fueter_array(alpha, points, self.sig.n), c.coeffs, self.sig.n)
        return out

    def __call__(self, w) -> Multivector:
        return eval_symmetric_polynomial(self, w)

    def as_field(self) -> PointField:
        return PointField(self.sig, self.__call__, name="symmetric polynomial")


def eval_symmetric_polynomial(p: SymmetricPolynomial, w) -> Multivector:
    w = _point(p.sig, w)
    return Multivector(p.sig, p.evaluate_array(w[None, :])[0])


# ---------------------------------------------------------------- Cauchy kernel


def cauchy_kernel_array(points: np.ndarray, n: int) -> np.ndarray:
    """E(w) = bar(w) / |w|^{n+1} at many points, shape (N, 2^n). No pole check."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.linalg.norm(points, axis=1)
    scale = r ** -(n + 1)
    out = np.zeros((points.shape[0], 1 << n))
    slots = paravector_indices(n)
    out[:, 0] = points[:, 0] * scale
    out[:, slots[1:]] = -points[:, 1:] * scale[:, None]
    return out


def _check_pole(w: np.ndarray, exc=PoleAtOrigin) -> None:
    if float(np.linalg.norm(w)) < POLE_THRESHOLD:
        raise exc(f"Cauchy kernel evaluated at {w.tolist()}, too close to the origin")


def cauchy_kernel_E(w, sig: Signature) -> Multivector:
    w = _point(sig, w)
    _check_pole(w)
    return Multivector(sig, cauchy_kernel_array(w[None, :], sig.n)[0])


def dE_first(ell: int, w, sig: Signature) -> Multivector:
    """-dE/dw_ell in closed form:
    -[bar(e_ell)/|w|^{n+1} - (n+1) w_ell bar(w)/|w|^{n+3}]."""
    if not 0 <= ell <= sig.n:
        raise ValueError(f"derivative index {ell} out of range 0..{sig.n}")
    w = _point(sig, w)
    _check_pole(w)
    n = sig.n
    r = float(np.linalg.norm(w))
    e_bar = np.zeros(sig.dim)
    e_bar[0 if ell == 0 else 1 << (ell - 1)] = 1.0 if ell == 0 else -1.0
    w_bar = cauchy_kernel_array(w[None, :], n)[0] * r ** (n + 1)
    deriv = e_bar / r ** (n + 1) - (n + 1) * w[ell] * w_bar / r ** (n + 3)
    return Multivector(sig, -deriv)


def negative_power_W(indices: Sequence[int], w, sig: Signature, h: float | None = None) -> Multivector:
    """(-1)^k d^k E / dw_{l1} ... dw_{lk} for k <= 3.

    k = 1 is analytic; k = 2, 3 use nested central differences with step
    ``h * max(|w|, 1)`` (default h: 1e-3 for k=2, 4e-3 for k=3).  Nested
    differences beyond third order lose too many digits to be useful.
    """
    indices = tuple(int(i) for i in indices)
    k = len(indices)
    w = _point(sig, w)
    if any(not 0 <= i <= sig.n for i in indices):
        raise ValueError(f"derivative indices {indices} out of range 0..{sig.n}")
    if k > 3:
        raise ValueError("negative_power_W supports derivative order k <= 3")
    _check_pole(w)
    if k == 0:
        return cauchy_kernel_E(w, sig)
    if k == 1:
        return dE_first(indices[0], w, sig)
    if h is None:
        h = {2: 1e-3, 3: 4e-3}[k]
    step = h * max(float(np.linalg.norm(w)), 1.0)
    offsets = np.zeros((1, sig.n + 1))
    weights = np.ones(1)
    for ell in indices:
        shift = np.zeros(sig.n + 1)
        shift[ell] = step
        offsets = np.concatenate([offsets + shift, offsets - shift])
        weights = np.concatenate([weights, -weights]) / (2 * step)
    stencil = w[None, :] + offsets
    if np.any(np.linalg.norm(stencil, axis=1) < POLE_THRESHOLD):
        raise StencilCrossesOrigin(f"difference stencil around {w.tolist()} touches the origin")
    values = cauchy_kernel_array(stencil, sig.n)
    deriv = weights @ values
    return Multivector(sig, (-1) ** k * deriv)


# ---------------------------------------------------------------- residuals


def _partials(f: PointField, w: np.ndarray, h: float) -> list[np.ndarray]:
    """Central-difference partial derivatives of f at w, one per coordinate."""
    n = f.sig.n
    radius = h * (n + 1)
    for k in range(n + 1):
        for s in (1.0, -1.0):
            p = w.copy()
            p[k] += s * radius
            if not f.contains(p):
                raise DomainError(f"difference stencil at {w.tolist()} leaves the domain of {f.name or 'field'}")
    out = []
    for k in range(n + 1):
        p = w.copy()
        q = w.copy()
        p[k] += h
        q[k] -= h
        out.append((f(p).coeffs - f(q).coeffs) / (2 * h))
    return out


def _default_step(w: np.ndarray, h: float | None) -> float:
    return 1e-4 * max(float(np.linalg.norm(w)), 1.0) if h is None else float(h)


def _unit(n: int, k: int) -> np.ndarray:
    e = np.zeros(1 << n)
    e[0 if k == 0 else 1 << (k - 1)] = 1.0
    return e


def dirac_residual(f: PointField, w, h: float | None = None, side: str = "left") -> Multivector:
    """Central-difference D[f] (side='left') or [f]D (side='right')."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    sig = f.sig
    w = _point(sig, w)
    h = _default_step(w, h)
    parts = _partials(f, w, h)
    out = np.zeros(sig.dim)
    for k, d in enumerate(parts):
        e = _unit(sig.n, k)
        out += mul_arrays(e, d, sig.n) if side == "left" else mul_arrays(d, e, sig.n)
    return Multivector(sig, out)


def cauchy_riemann_residual(f: PointField, w, h: float | None = None) -> tuple[Multivector, Multivector]:
    """The two Cauchy-Riemann residuals of f = U + e_n V.

    r1 = dU/dx - dV/dy and r2 = dU/dy + dbar(V)/dx, where d/dx sums
    e_k d/dw_k over k < n and dbar/dx uses conjugated units.  With these,
    D[f] = r1 + e_n r2 holds identically; the conjugation is what
    e_k e_n = e_n bar(e_k) forces for n >= 2.
    """
    sig = f.sig
    n = sig.n
    w = _point(sig, w)
    h = _default_step(w, h)
    parts = _partials(f, w, h)
    has_n = (np.arange(sig.dim) & sig.en_mask) != 0
    en = _unit(n, n)
    us, vs = [], []
    for d in parts:
        us.append(np.where(has_n, 0.0, d))
        # V^l = e_n^{-1} (d - U) = -e_n (d - U)
        vs.append(-mul_arrays(en, np.where(has_n, d, 0.0), n))
    r1 = -vs[n].copy()
    r2 = us[n].copy()
    for k in range(n):
        e = _unit(n, k)
        r1 += mul_arrays(e, us[k], n)
        r2 += mul_arrays(bar_array(e, n), vs[k], n)
    return Multivector(sig, r1), Multivector(sig, r2)


# ---------------------------------------------------------------- order at infinity


def default_rays(n: int, count: int = 8, seed: int = 20170) -> np.ndarray:
    """Fixed unit directions in the open upper half space (last coordinate >= 0.2)."""
    rng = np.random.default_rng(seed)
    rays = []
    while len(rays) < count:
        d = rng.normal(size=n + 1)
        d /= np.linalg.norm(d)
        d[-1] = abs(d[-1])
        if d[-1] >= 0.2:
            rays.append(d)
    return np.array(rays)


DEFAULT_RADII = 2.0 ** np.arange(4, 13)


@dataclass(frozen=True)
class OrderEstimate:
    """Estimated growth exponent at infinity.

    ``order`` is None when the field vanished at every sample.
    """

    order: int | None
    slope: float
    confidence: float
    per_ray: tuple[float, ...]

    def at_most(self, m: int) -> bool:
        return self.order is None or self.order <= m


def order_at_infinity(f: PointField, rays: np.ndarray | None = None, radii: Sequence[float] | None = None) -> OrderEstimate:
    """Least-squares slope of log|f| against log r along rays, rounded to an integer."""
    n = f.sig.n
    rays = default_rays(n) if rays is None else np.atleast_2d(np.asarray(rays, dtype=float))
    radii = np.asarray(DEFAULT_RADII if radii is None else radii, dtype=float)
    logs = np.log(radii)
    per_ray = []
    xs, ys = [], []
    zero = True
    for d in rays:
        d = d / np.linalg.norm(d)
        vals = np.array([np.linalg.norm(f(r * d).coeffs) for r in radii])
        if np.all(vals == 0.0):
            continue
        zero = False
        if np.any(vals == 0.0):
            # isolated zeros along a ray carry no growth information
            keep = vals > 0
            lr, lv = logs[keep], np.log(vals[keep])
        else:
            lr, lv = logs, np.log(vals)
        if len(lr) < 2:
            continue
        per_ray.append(float(np.polyfit(lr, lv, 1)[0]))
        xs.append(lr)
        ys.append(lv)
    if zero:
        return OrderEstimate(None, float("-inf"), 0.0, ())
    if not per_ray:
        return OrderEstimate(None, float("nan"), float("inf"), ())
    slope = float(np.polyfit(np.concatenate(xs), np.concatenate(ys), 1)[0])
    conf = float(max(abs(s - slope) for s in per_ray))
    return OrderEstimate(int(round(slope)), slope, conf, tuple(per_ray))


# ---------------------------------------------------------------- stock fields


def kernel_field(sig: Signature) -> PointField:
    return PointField(sig, lambda w: cauchy_kernel_E(w, sig), away_from_origin, "E")


def z_field(j: int, sig: Signature) -> PointField:
    return PointField(sig, lambda w: hyper_variable_z(j, w, sig), None, f"z{j}")


def fueter_field(alpha: MultiIndex, sig: Signature) -> PointField:
    return PointField(sig, lambda w: fueter_Z(alpha, w, sig), None, f"Z^{alpha}")


def dE_field(ell: int, sig: Signature) -> PointField:
    return PointField(sig, lambda w: dE_first(ell, w, sig), away_from_origin, f"W_{ell}")


def constant_field(value: Multivector) -> PointField:
    return PointField(value.sig, lambda w: value, None, "constant")
