"""Quadrature over the hyperplane R^{n+1}_0 = {w_n = 0}.

The hyperplane is parametrised by x = (x_0, ..., x_{n-1}).  Its surface
element is dS = dx_0 ... dx_{n-1} = e_n dsigma, so the blade-valued measure is
dsigma = e_n^{-1} dS = -e_n dS.

Integrals are truncated to the cube [-R, R]^n and evaluated by tensor Gauss-Legendre rules
on a graded mesh.  Each axis carries the union of two sinh-graded breakpoint
families: one centred at the origin with unit scale (resolves the datum) and
one centred at the projection p of the evaluation point with scale |w_n|
(resolves the kernel).  Both families move continuously with w, so the
computed S[c](w) is a smooth function of w and finite-difference checks on it
are meaningful.  Cells whose error indicator |G_p - G_q| (two Gauss orders)
exceeds their share of the tolerance are split into 2^n children.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.special import gammaincc, gammaln

from .algebra import Multivector, Signature, mul_arrays
from .boundary import BoundaryFunction, estimate_decay
from .errors import EvaluationOnHyperplane, NonDecayingDatum
from .monogenic import MultiIndex, cauchy_kernel_array, check_multi_index, fueter_array, fueter_term_count

# Orientation of dsigma, fixed by the n = 1 calibration (Phi(i) = +1/2 for
# c = 1/(1 + x^2)); see tests/test_quadrature.py::test_orientation_calibration.
ORIENTATION = 1

CHUNK_NODES = 200_000


def sphere_area_constant(n: int) -> float:
    """Area of the unit n-sphere in R^{n+1}: 2 pi^{(n+1)/2} / Gamma((n+1)/2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    h = (n + 1) / 2.0
    return float(2.0 * math.pi**h / math.gamma(h))


def cauchy_normalizer(n: int) -> float:
    """The constant dividing the Cauchy-type integral.

    Half the sphere area: with the full area the boundary values satisfy
    2 Re S+ = c rather than Re S+ = c (for n = 1 the integral would be the
    classical (1/2 pi i) Cauchy integral instead of the Schwarz operator).
    """
    return 0.5 * sphere_area_constant(n)


@dataclass(frozen=True)
class QuadratureScheme:
    R: float = 1e4
    base_grid: int = 64
    tol: float = 1e-6
    near_radius: float | None = None
    orientation: int = ORIENTATION
    order: int = 8
    low_order: int = 5
    grading: float = 0.8
    max_depth: int = 4
    max_cells: int = 400_000

    def __post_init__(self):
        if not (self.R > 0 and self.tol > 0):
            raise ValueError("quadrature needs R > 0 and tol > 0")
        if self.base_grid < 4:
            raise ValueError("base_grid must be at least 4")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        if not 1 <= self.low_order < self.order:
            raise ValueError("need 1 <= low_order < order")
        if self.near_radius is not None and self.near_radius <= 0:
            raise ValueError("near_radius must be positive")

    def refined(self, factor: float = 2.0) -> "QuadratureScheme":
        """Same scheme with cells smaller by ``factor`` everywhere."""
        return replace(self, grading=self.grading / factor, base_grid=int(math.ceil(self.base_grid * factor)))


@dataclass(frozen=True)
class IntegralResult:
    value: Multivector
    error_estimate: float
    nodes_used: int
    truncation_tail_bound: float

    @property
    def total_error(self) -> float:
        return self.error_estimate + self.truncation_tail_bound


# ---------------------------------------------------------------- rules and meshes


@lru_cache(maxsize=None)
def _tensor_rule(order: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes in [0,1]^n (order^n, n) and weights summing to 1."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    grids = np.meshgrid(*([x] * n), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    wgrids = np.meshgrid(*([w] * n), indexing="ij")
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def graded_family(center: float, scale: float, half_width: float, grading: float, cap: int) -> np.ndarray:
    """Breakpoints center + scale*sinh(u j / J), j = -J..J, reaching +-half_width."""
    u = math.asinh(half_width / scale)
    J = max(1, min(int(math.ceil(u / grading)), cap))
    j = np.arange(-J, J + 1)
    return center + scale * np.sinh(u * j / J)


def axis_breakpoints(lo: float, hi: float, families, min_gap: float) -> np.ndarray:
    pts = [np.array([lo, hi])]
    for f in families:
        pts.append(f[(f > lo) & (f < hi)])
    allp = np.unique(np.concatenate(pts))
    keep = np.concatenate([[True], np.diff(allp) > min_gap])
    out = allp[keep]
    out[-1] = hi
    return out


def _cells_from_edges(edges: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    los = np.meshgrid(*[e[:-1] for e in edges], indexing="ij")
    his = np.meshgrid(*[e[1:] for e in edges], indexing="ij")
    lo = np.stack([g.ravel() for g in los], axis=1)
    hi = np.stack([g.ravel() for g in his], axis=1)
    return lo, hi


def _cell_sums(integrand, lo: np.ndarray, hi: np.ndarray, order: int, K: int) -> np.ndarray:
    n = lo.shape[1]
    nodes, weights = _tensor_rule(order, n)
    q = nodes.shape[0]
    out = np.empty((lo.shape[0], K))
    step = max(1, CHUNK_NODES // q)
    for a in range(0, lo.shape[0], step):
        l, h = lo[a : a + step], hi[a : a + step]
        width = h - l
        pts = l[:, None, :] + width[:, None, :] * nodes[None, :, :]
        vals = integrand(pts.reshape(-1, n)).reshape(l.shape[0], q, K)
        vol = np.prod(width, axis=1)
        out[a : a + step] = np.einsum("cqk,q->ck", vals, weights) * vol[:, None]
    return out


def _split(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = lo.shape[1]
    mid = 0.5 * (lo + hi)
    corners = np.array(np.meshgrid(*([[0, 1]] * n), indexing="ij")).reshape(n, -1).T  # (2^n, n)
    new_lo = np.where(corners[None, :, :] == 0, lo[:, None, :], mid[:, None, :]).reshape(-1, n)
    new_hi = np.where(corners[None, :, :] == 0, mid[:, None, :], hi[:, None, :]).reshape(-1, n)
    return new_lo, new_hi


def adaptive_integrate(integrand, edges: list[np.ndarray], K: int, scheme: QuadratureScheme) -> tuple[np.ndarray, float, int]:
    """Integrate a (N, n) -> (N, K) integrand over the tensor mesh ``edges``.

    Returns (value, error_estimate, nodes_used).
    """
    lo, hi = _cells_from_edges(edges)
    n = lo.shape[1]
    share = scheme.tol / lo.shape[0]
    total = np.zeros(K)
    err = 0.0
    nodes = 0
    cells_done = 0
    for depth in range(scheme.max_depth + 1):
        gp = _cell_sums(integrand, lo, hi, scheme.order, K)
        gq = _cell_sums(integrand, lo, hi, scheme.low_order, K)
        nodes += lo.shape[0] * (scheme.order**n + scheme.low_order**n)
        ind = np.linalg.norm(gp - gq, axis=1)
        if not np.all(np.isfinite(gp)):
            raise FloatingPointError("integrand produced non-finite values")
        thresh = share / (2**n) ** depth
        bad = ind > thresh
        last = depth == scheme.max_depth or cells_done + lo.shape[0] + np.count_nonzero(bad) * 2**n > scheme.max_cells
        if last:
            bad[:] = False
        good = ~bad
        total += gp[good].sum(axis=0)
        err += float(ind[good].sum())
        cells_done += int(np.count_nonzero(good))
        if not np.any(bad):
            break
        lo, hi = _split(lo[bad], hi[bad])
    return total, err, nodes


# ---------------------------------------------------------------- tails


def _unit_sphere_area_in(n: int) -> float:
    """Area of the unit sphere S^{n-1} in R^n (2 for n = 1)."""
    return sphere_area_constant(n - 1) if n >= 2 else 2.0


def tail_bound(decay: float | None, alpha_degree: int, R: float, n: int, kernel_decay: float = 0.0, C: float = 1.0) -> float:
    """Bound on the integral of C |x|^{alpha_degree - kernel_decay} (1+|x|)^{-decay} over |x| > R.

    ``decay = inf`` means Gaussian decay C exp(-|x|^2).  Infinite when the
    integrand is not absolutely integrable.
    """
    if C == 0.0:
        return 0.0
    if decay is None:
        return math.inf
    if R <= 0:
        return math.inf
    area = _unit_sphere_area_in(n)
    k = alpha_degree - kernel_decay
    if math.isinf(decay):
        # int_R^inf r^{k+n-1} e^{-r^2} dr = Gamma(s, R^2)/2 with s = (k+n)/2;
        # for R >= 1 raise the exponent so that s > 0 keeps it an upper bound
        s = (k + n) / 2.0
        if s <= 0:
            if R < 1:
                return math.inf
            s = 0.5
        upper = gammaincc(s, R * R)
        if upper == 0.0:
            return 0.0
        return float(C * area * 0.5 * math.exp(math.log(upper) + gammaln(s)))
    e = k - decay + n
    if e >= 0:
        return math.inf
    # (1 + r)^{-d} <= r^{-d} for d >= 0
    if decay < 0:
        return math.inf
    return float(C * area * R**e / (-e))


def _shell_directions(n: int, count: int = 64) -> np.ndarray:
    rng = np.random.default_rng(5)
    v = rng.normal(size=(count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def effective_radius(c: BoundaryFunction, R: float, decay: float) -> float:
    """Truncation radius actually needed; smaller than R only for super-polynomial decay."""
    if not math.isinf(decay):
        return R
    dirs = _shell_directions(c.sig.n)
    radii = np.geomspace(0.5, max(R, 1.0), 80)
    amp = np.array([np.max(np.linalg.norm(c.eval_array(r * dirs), axis=1)) for r in radii])
    peak = float(amp.max())
    if peak == 0.0:
        return min(R, 1.0)
    small = amp <= 1e-17 * peak
    # first radius after which every sampled shell is negligible
    for i in range(len(radii)):
        if np.all(small[i:]):
            return float(min(R, radii[i]))
    return R


def _datum_constant(c: BoundaryFunction, decay: float, R: float) -> float:
    """Empirical C in |c(x)| <= C (1+|x|)^{-decay} (or C e^{-|x|^2})."""
    dirs = _shell_directions(c.sig.n, 32)
    radii = np.geomspace(0.25, max(R, 1.0), 40)
    best = -math.inf
    for r in radii:
        mag = np.max(np.linalg.norm(c.eval_array(r * dirs), axis=1))
        if mag == 0.0:
            continue
        if math.isinf(decay):
            best = max(best, math.log(mag) + r * r)
        else:
            best = max(best, math.log(mag) + decay * math.log1p(r))
    if best == -math.inf:
        return 0.0
    return math.exp(min(best, 700.0))


def _resolve_decay(c: BoundaryFunction, need_integrable: bool, margin: float) -> float:
    """Decay exponent used for truncation; raises NonDecayingDatum when growth is detected."""
    if c.decay is not None:
        return c.decay
    d = estimate_decay(c)
    if d <= margin:
        raise NonDecayingDatum(
            f"datum decays like |x|^-{d:.3g}, too slowly for the truncated integral to converge; "
            "give an explicit decay hint (decay: 0 accepts the symmetric truncation)"
        )
    return d


# ---------------------------------------------------------------- integrals


def _measure_blade(sig: Signature, orientation: int) -> np.ndarray:
    """Coefficient array of s e_n^{-1} = -s e_n."""
    b = np.zeros(sig.dim)
    b[sig.en_mask] = -float(orientation)
    return b


def _zero_result(sig: Signature) -> IntegralResult:
    return IntegralResult(Multivector.zero(sig), 0.0, 0, 0.0)


def cauchy_integral_S(c: BoundaryFunction, w, scheme: QuadratureScheme | None = None) -> IntegralResult:
    """S[c](w) = (1/V) int E(x - w) dsigma c(x) with V = cauchy_normalizer(n)."""
    scheme = QuadratureScheme() if scheme is None else scheme
    sig = c.sig
    n = sig.n
    w = np.asarray(w, dtype=float)
    if w.shape != (n + 1,):
        raise ValueError(f"evaluation point needs {n + 1} coordinates")
    y = abs(float(w[-1]))
    if y == 0.0:
        raise EvaluationOnHyperplane("S[c] is only evaluated off the hyperplane; boundary values are limits")
    if c.is_zero:
        return _zero_result(sig)
    decay = _resolve_decay(c, True, 0.0)
    R = effective_radius(c, scheme.R, decay)
    p = w[:-1]
    scale = scheme.near_radius if scheme.near_radius is not None else y
    cap = max(2, scheme.base_grid // 4)
    edges = []
    for k in range(n):
        near = graded_family(p[k], scale, R + abs(p[k]), scheme.grading, cap)
        far = graded_family(0.0, 1.0, R, scheme.grading, cap)
        edges.append(axis_breakpoints(-R, R, [near, far], 1e-12 * R))
    blade = _measure_blade(sig, scheme.orientation)
    factor = 1.0 / cauchy_normalizer(n)

    def integrand(x: np.ndarray) -> np.ndarray:
        diff = np.empty((x.shape[0], n + 1))
        diff[:, :n] = x - p
        diff[:, n] = -w[-1]
        kern = mul_arrays(cauchy_kernel_array(diff, n), blade, n)
        return factor * mul_arrays(kern, c.eval_array(x), n)

    value, err, nodes = adaptive_integrate(integrand, edges, sig.dim, scheme)
    # the cube contains the ball |x| <= R; bound the kernel by (2/|x|)^n when
    # R >= 2|w| and by |w_n|^-n otherwise
    C = _datum_constant(c, decay, R)
    if R >= 2.0 * float(np.linalg.norm(w)):
        tail = factor * 2.0**n * tail_bound(decay, 0, R, n, kernel_decay=n, C=C)
    else:
        tail = factor * y**-n * tail_bound(decay, 0, R, n, C=C)
    return IntegralResult(Multivector(sig, value), err, nodes, tail)


@dataclass(frozen=True)
class MomentResult:
    """Moment of the datum against Z^alpha with the blade measure and with dS."""

    alpha: MultiIndex
    sigma: IntegralResult
    lebesgue: IntegralResult


def _origin_edges(n: int, R: float, scheme: QuadratureScheme) -> list[np.ndarray]:
    cap = max(2, scheme.base_grid // 2)
    fam = graded_family(0.0, 1.0, R, scheme.grading, cap)
    return [axis_breakpoints(-R, R, [fam], 1e-12 * R) for _ in range(n)]


def moment_integrals(alpha: MultiIndex, c: BoundaryFunction, scheme: QuadratureScheme | None = None) -> MomentResult:
    scheme = QuadratureScheme() if scheme is None else scheme
    sig = c.sig
    n = sig.n
    alpha = check_multi_index(tuple(alpha), n)
    if c.is_zero:
        z = _zero_result(sig)
        return MomentResult(alpha, z, z)
    deg = sum(alpha)
    decay = _resolve_decay(c, True, deg + n)
    tail = tail_bound(decay, deg, 1.0, n)  # integrability check only
    if math.isinf(tail):
        raise NonDecayingDatum(f"moment of degree {deg} diverges for a datum decaying like |x|^-{decay:g}")
    R = effective_radius(c, scheme.R, decay)
    edges = _origin_edges(n, R, scheme)
    blade = _measure_blade(sig, scheme.orientation)

    def hp(x):
        full = np.zeros((x.shape[0], n + 1))
        full[:, :n] = x
        return full

    def with_sigma(x):
        za = fueter_array(alpha, hp(x), n)
        return mul_arrays(mul_arrays(za, blade, n), c.eval_array(x), n)

    def with_dS(x):
        return mul_arrays(fueter_array(alpha, hp(x), n), c.eval_array(x), n)

    C = _datum_constant(c, decay, R) * fueter_term_count(alpha)
    tail = tail_bound(decay, deg, R, n, C=C)
    v1, e1, n1 = adaptive_integrate(with_sigma, edges, sig.dim, scheme)
    v2, e2, n2 = adaptive_integrate(with_dS, edges, sig.dim, scheme)
    return MomentResult(
        alpha,
        IntegralResult(Multivector(sig, v1), e1, n1, tail),
        IntegralResult(Multivector(sig, v2), e2, n2, tail),
    )


def moment_integral(alpha: MultiIndex, c: BoundaryFunction, scheme: QuadratureScheme | None = None) -> IntegralResult:
    """int Z^alpha(x) dsigma c(x) over the hyperplane (truncated)."""
    return moment_integrals(alpha, c, scheme).sigma


def condition_satisfied(result: IntegralResult, scheme: QuadratureScheme) -> bool:
    return float(np.linalg.norm(result.value.coeffs)) <= max(scheme.tol, 10.0 * result.error_estimate)
