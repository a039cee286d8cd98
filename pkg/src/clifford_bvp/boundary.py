"""Boundary data c on the hyperplane R^{n+1}_0 and empirical function-class checks."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .algebra import Multivector, Signature, blade_name, mul_arrays, is_para_real
from .errors import DomainError, ParaRealViolation
from . import expr as ex

# ---------------------------------------------------------------- the datum


@dataclass(frozen=True)
class BoundaryFunction:
    """A para-real datum, either a parsed expression or a sampled table.

    ``decay`` is an optional hint d meaning |c(x)| <= C (1 + |x|)^{-d};
    ``math.inf`` marks Gaussian-type decay.  ``hat_m`` optionally records the
    class index the datum is meant to belong to.
    """

    sig: Signature
    expr: ex.Expr | None = None
    table_points: np.ndarray | None = None
    table_values: np.ndarray | None = None
    decay: float | None = None
    hat_m: int | None = None
    source: str = ""
    _interp: object = field(default=None, repr=False, compare=False)

    @classmethod
    def parse(cls, text: str, sig: Signature, decay: float | None = None, hat_m: int | None = None) -> "BoundaryFunction":
        node = ex.parse(text, sig, para_real=True)
        return cls(sig, expr=node, decay=decay, hat_m=hat_m, source=text)

    @classmethod
    def zero(cls, sig: Signature) -> "BoundaryFunction":
        return cls(sig, expr=ex.Num(0.0), decay=math.inf, source="0")

    @classmethod
    def from_table(cls, sig: Signature, points, values, decay: float | None = None, source: str = "") -> "BoundaryFunction":
        points = np.atleast_2d(np.asarray(points, dtype=float))
        values = np.atleast_2d(np.asarray(values, dtype=float))
        if points.shape[1] != sig.n or values.shape != (points.shape[0], sig.dim):
            raise ValueError("table shapes do not match the signature")
        if not (np.all(np.isfinite(points)) and np.all(np.isfinite(values))):
            raise ValueError("sample table must be finite")
        has_n = (np.arange(sig.dim) & sig.en_mask) != 0
        if np.any(values[:, has_n] != 0.0):
            raise ParaRealViolation("sampled values contain e_n components")
        uniq: dict[tuple, np.ndarray] = {}
        for p, v in zip(map(tuple, points), values):
            if p in uniq and not np.array_equal(uniq[p], v):
                raise ValueError(f"conflicting samples at {p}")
            uniq[p] = v
        keys = sorted(uniq)
        pts = np.array(keys)
        vals = np.array([uniq[k] for k in keys])
        pts.flags.writeable = False
        vals.flags.writeable = False
        return cls(sig, table_points=pts, table_values=vals, decay=decay, source=source)

    @property
    def is_zero(self) -> bool:
        if self.expr is not None:
            return isinstance(self.expr, ex.Num) and self.expr.value == 0.0
        return bool(np.all(self.table_values == 0.0))

    def _interpolator(self):
        if self._interp is None:
            if self.sig.n == 1:
                x = self.table_points[:, 0]
                vals = self.table_values

                def interp(q):
                    out = np.zeros((q.shape[0], vals.shape[1]))
                    for k in range(vals.shape[1]):
                        out[:, k] = np.interp(q[:, 0], x, vals[:, k], left=0.0, right=0.0)
                    return out

            else:
                from scipy.interpolate import LinearNDInterpolator

                lin = LinearNDInterpolator(self.table_points, self.table_values, fill_value=0.0)

                def interp(q):
                    return np.asarray(lin(q))

            object.__setattr__(self, "_interp", interp)
        return self._interp

    def eval_array(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.expr is not None:
            return ex.evaluate_array(self.expr, points, self.sig)
        out = self._interpolator()(points)
        # exact lookups at table nodes
        index = {tuple(p): i for i, p in enumerate(self.table_points)}
        for row, p in enumerate(map(tuple, points)):
            i = index.get(p)
            if i is not None:
                out[row] = self.table_values[i]
        return out

    def __call__(self, x) -> Multivector:
        return eval_boundary(self, x)


def hyperplane_point(x, n: int) -> np.ndarray:
    """Accept (x_0..x_{n-1}) or a full point with w_n == 0."""
    x = np.asarray(x, dtype=float)
    if x.shape == (n + 1,):
        if x[-1] != 0.0:
            raise DomainError(f"point {x.tolist()} is not on the hyperplane w_n = 0")
        return x[:-1]
    if x.shape != (n,):
        raise ValueError(f"hyperplane point needs {n} coordinates")
    return x


def eval_boundary(c: BoundaryFunction, x) -> Multivector:
    x = hyperplane_point(x, c.sig.n)
    return Multivector(c.sig, c.eval_array(x[None, :])[0])


def load_table_csv(path: str | Path, sig: Signature, decay: float | None = None) -> BoundaryFunction:
    """Columns x0..x{n-1} then one column per para-real blade, header names blades (e0, e1, e12, ...)."""
    n = sig.n
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty sample table")
    header = [h.strip() for h in rows[0]]
    if header[:n] != [f"x{k}" for k in range(n)]:
        raise ValueError(f"{path}: first columns must be x0..x{n - 1}")
    masks = []
    for name in header[n:]:
        node = ex.parse(name, sig, para_real=True)
        if not isinstance(node, ex.Blade):
            raise ValueError(f"{path}: column {name!r} is not a blade name")
        masks.append(node.mask)
    pts, vals = [], []
    for line_no, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise ValueError(f"{path}:{line_no}: expected {len(header)} columns")
        nums = [float(cell) for cell in row]
        pts.append(nums[:n])
        v = np.zeros(sig.dim)
        for mask, val in zip(masks, nums[n:]):
            v[mask] = val
        vals.append(v)
    return BoundaryFunction.from_table(sig, pts, vals, decay=decay, source=str(path))


# ---------------------------------------------------------------- samplers


@dataclass(frozen=True)
class PairSampler:
    """Random pairs (t, s) in a window around ``center``.

    Half the base points are drawn at log-uniform distance from the centre so
    that small separations still see the neighbourhood of the centre.
    """

    center: Sequence[float]
    radius: float = 1.0
    count: int = 4000
    min_sep: float = 1e-6
    seed: int = 0

    def pairs(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        rng = np.random.default_rng(self.seed)
        center = np.asarray(self.center, dtype=float)
        if center.shape != (n,):
            raise ValueError("sampler centre has the wrong dimension")
        k = self.count
        u = _unit_vectors(rng, k, n)
        r_log = np.exp(rng.uniform(math.log(self.min_sep * 1e-3), math.log(self.radius), k))
        r_uni = self.radius * rng.uniform(0, 1, k) ** (1.0 / n)
        r = np.where(rng.uniform(size=k) < 0.5, r_log, r_uni)
        t = center + r[:, None] * u
        delta = np.exp(rng.uniform(math.log(self.min_sep), math.log(self.radius), k))
        s = t + delta[:, None] * _unit_vectors(rng, k, n)
        return t, s


@dataclass(frozen=True)
class ShellSampler:
    """Pairs on log-spaced radial shells r_min <= |t| <= r_max, away from 0."""

    r_min: float = 1.0
    r_max: float = 1e4
    count: int = 4000
    seed: int = 1

    def pairs(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        rng = np.random.default_rng(self.seed)
        k = self.count
        r = np.exp(rng.uniform(math.log(self.r_min), math.log(self.r_max), k))
        t = r[:, None] * _unit_vectors(rng, k, n)
        rel = 10.0 ** rng.uniform(-5, -0.5, k)
        s = t + (rel * r)[:, None] * _unit_vectors(rng, k, n)
        return t, s


def _unit_vectors(rng, k: int, n: int) -> np.ndarray:
    v = rng.normal(size=(k, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# ---------------------------------------------------------------- estimators

N_BINS = 32
MIN_SLOPE = 0.05
UNBOUNDED_RATIO = 1e6


@dataclass(frozen=True)
class HolderEstimate:
    mu: float
    M: float
    confidence: float
    in_class: bool = True
    note: str = ""


def _paravector_inverse(points: np.ndarray) -> np.ndarray:
    """1/x for hyperplane points viewed as paravectors, as coordinate arrays."""
    r2 = np.sum(points**2, axis=1, keepdims=True)
    inv = points.copy()
    inv[:, 1:] *= -1.0
    return inv / r2


def _envelope(dx: np.ndarray, df: np.ndarray) -> HolderEstimate:
    keep = dx > 0
    dx, df = dx[keep], df[keep]
    if dx.size == 0:
        raise ValueError("degenerate sampler: every pair is coincident")
    if np.all(df == 0.0):
        return HolderEstimate(1.0, 0.0, 0.0, True, "constant on the sample")
    ldx = np.log(dx)
    edges = np.linspace(ldx.min(), ldx.max(), N_BINS + 1)
    which = np.clip(np.digitize(ldx, edges) - 1, 0, N_BINS - 1)
    bx, by = [], []
    for b in range(N_BINS):
        sel = (which == b) & (df > 0)
        if np.count_nonzero(sel) < 3:
            continue
        j = np.argmax(df[sel])
        bx.append(ldx[sel][j])
        by.append(math.log(df[sel][j]))
    if len(bx) < 3:
        mu = 1.0
        M = float(np.max(df / dx))
        return HolderEstimate(mu, M, float("inf"), True, "too few bins")
    bx, by = np.array(bx), np.array(by)
    coef, cov = np.polyfit(bx, by, 1, cov=True)
    slope = float(coef[0])
    conf = 2.0 * float(math.sqrt(max(cov[0, 0], 0.0)))
    mu = float(min(max(slope, 1e-6), 1.0))
    M = float(np.exp(np.max(by - mu * bx)))
    if slope <= MIN_SLOPE or not math.isfinite(M):
        # increments do not shrink with the separation: a jump or a pole
        return HolderEstimate(mu, M, conf, False, "increments do not vanish at small separations (NotInClass)")
    return HolderEstimate(mu, M, conf)


def _pair_diffs(c: BoundaryFunction, t: np.ndarray, s: np.ndarray) -> np.ndarray:
    return np.linalg.norm(c.eval_array(t) - c.eval_array(s), axis=1)


def estimate_holder(c: BoundaryFunction, sampler: PairSampler | None = None) -> HolderEstimate:
    """Hölder index and coefficient from the upper envelope of log|df| against log|dx|."""
    n = c.sig.n
    sampler = PairSampler(np.zeros(n)) if sampler is None else sampler
    t, s = sampler.pairs(n)
    ft, fs = c.eval_array(t), c.eval_array(s)
    est = _envelope(np.linalg.norm(t - s, axis=1), np.linalg.norm(ft - fs, axis=1))
    mags = np.linalg.norm(ft, axis=1)
    if est.in_class and np.max(mags) > UNBOUNDED_RATIO * max(float(np.median(mags)), 1e-300) and np.max(mags) > 1e3:
        return HolderEstimate(est.mu, est.M, est.confidence, False, "values unbounded in the window (NotInClass)")
    return est


def estimate_holder_dagger(c: BoundaryFunction, sampler: ShellSampler | None = None, growth_limit: float = 10.0) -> HolderEstimate:
    """Same envelope estimator in the metric |1/xi - 1/zeta|.

    Membership is judged by stability: with the index fitted on the inner
    shells (|x| <= 100 r_min), the ratio df / dist^mu on the outer shells may
    not exceed ``growth_limit`` times its inner maximum.
    """
    n = c.sig.n
    sampler = ShellSampler() if sampler is None else sampler
    t, s = sampler.pairs(n)
    if np.any(np.linalg.norm(t, axis=1) == 0) or np.any(np.linalg.norm(s, axis=1) == 0):
        raise ValueError("dagger sampler produced the origin")
    dist = np.linalg.norm(_paravector_inverse(t) - _paravector_inverse(s), axis=1)
    df = _pair_diffs(c, t, s)
    full = _envelope(dist, df)
    if not full.in_class or full.M == 0.0:
        return full
    r = np.linalg.norm(t, axis=1)
    inner_sel = r <= 100.0 * sampler.r_min
    if np.count_nonzero(inner_sel) < 100 or np.count_nonzero(~inner_sel) < 100:
        return full
    inner = _envelope(dist[inner_sel], df[inner_sel])
    mu = inner.mu
    ratio = df / dist**mu
    m_in = float(np.max(ratio[inner_sel]))
    m_out = float(np.max(ratio[~inner_sel]))
    if m_out > growth_limit * max(m_in, 1e-300):
        return HolderEstimate(full.mu, m_out, full.confidence, False, "envelope diverges with the window (NotInClass)")
    return HolderEstimate(full.mu, max(full.M, m_in), full.confidence)


# ---------------------------------------------------------------- classes


def f_m_array(c: BoundaryFunction, m: int, points: np.ndarray) -> np.ndarray:
    """x^m c(x) at hyperplane points; negative m inverts the paravector first."""
    n = c.sig.n
    points = np.atleast_2d(points)
    base = np.zeros((points.shape[0], c.sig.dim))
    coords = points if m >= 0 else _paravector_inverse(points)
    base[:, 0] = coords[:, 0]
    for j in range(1, n):
        base[:, 1 << (j - 1)] = coords[:, j]
    powv = np.zeros_like(base)
    powv[:, 0] = 1.0
    for _ in range(abs(m)):
        powv = mul_arrays(powv, base, n)
    return mul_arrays(powv, c.eval_array(points), n)


@dataclass(frozen=True)
class WeightedDatum:
    """The function x -> x^m c(x), exposing the same sampling interface as a datum."""

    base: BoundaryFunction
    m: int

    @property
    def sig(self) -> Signature:
        return self.base.sig

    def eval_array(self, points) -> np.ndarray:
        return f_m_array(self.base, self.m, np.atleast_2d(np.asarray(points, dtype=float)))


def weighted_datum(c: BoundaryFunction, m: int):
    return c if m == 0 else WeightedDatum(c, m)


@dataclass(frozen=True)
class LimitEstimate:
    value: Multivector | None
    spread: float
    converged: bool


def limit_at_infinity(c: BoundaryFunction, m: int = 0, radii=(1e2, 1e3, 1e4), rays: int = 8, rtol: float = 2e-2, atol: float = 1e-6) -> LimitEstimate:
    """Estimate lim x^m c(x) as |x| -> infinity along fixed hyperplane rays."""
    n = c.sig.n
    rng = np.random.default_rng(7)
    dirs = _unit_vectors(rng, rays, n)
    vals = np.array([f_m_array(c, m, r * dirs) for r in radii])  # (R, rays, K)
    centers = vals.mean(axis=1)
    # spread across directions and change between consecutive radii, per radius
    dir_spread = np.max(np.linalg.norm(vals - centers[:, None, :], axis=2), axis=1)
    steps = np.linalg.norm(np.diff(centers, axis=0), axis=1)
    center = centers[-1]
    spread = float(max(dir_spread[-1], steps[-1]))
    scale = float(np.linalg.norm(center))
    settled = spread <= atol + rtol * scale
    # a geometrically shrinking spread still identifies the limit
    shrinking = dir_spread[-1] <= 0.2 * max(dir_spread[0], 1e-300) and steps[-1] <= 0.2 * max(steps[0], 1e-300)
    converged = bool(settled or (shrinking and spread <= 0.05 * max(1.0, scale)))
    amp = np.max(np.linalg.norm(vals, axis=2), axis=1)
    if amp[-1] == 0.0 or (np.all(np.diff(amp) < 0) and amp[-1] <= 0.1 * amp[0] and amp[-1] <= 0.05):
        # magnitudes decay steadily along every ray: the limit is zero
        return LimitEstimate(Multivector.zero(c.sig), float(amp[-1]), True)
    return LimitEstimate(Multivector(c.sig, center) if converged else None, spread, converged)


@dataclass(frozen=True)
class ClassReport:
    m: int
    holder: HolderEstimate
    dagger: HolderEstimate
    limit: LimitEstimate

    @property
    def in_H_m(self) -> bool:
        return self.holder.in_class

    @property
    def in_H_m_dagger(self) -> bool:
        return self.dagger.in_class

    @property
    def in_hat_H_m(self) -> bool:
        return self.in_H_m and self.in_H_m_dagger

    @property
    def f_m_at_infinity(self) -> Multivector | None:
        return self.limit.value

    @property
    def in_hat_H_m0(self) -> bool:
        lim = self.limit.value
        return self.in_hat_H_m and lim is not None and float(np.linalg.norm(lim.coeffs)) <= 1e-6

    def summary(self) -> str:
        lim = self.f_m_at_infinity
        lim_txt = "no limit" if lim is None else str(lim)
        return (
            f"class index m={self.m}: H_m={'yes' if self.in_H_m else 'no'} "
            f"(mu={self.holder.mu:.3f}, M={self.holder.M:.3g}); "
            f"H_m,dagger={'yes' if self.in_H_m_dagger else 'no'} "
            f"(mu={self.dagger.mu:.3f}, M={self.dagger.M:.3g}{'; ' + self.dagger.note if self.dagger.note else ''}); "
            f"f_m(inf)={lim_txt}; hat-H_m,0={'yes' if self.in_hat_H_m0 else 'no'}"
        )


def classify_hat_H(c: BoundaryFunction, m: int, holder_sampler: PairSampler | None = None, dagger_sampler: ShellSampler | None = None) -> ClassReport:
    fm = weighted_datum(c, m)
    holder = estimate_holder(fm, holder_sampler)
    dagger = estimate_holder_dagger(fm, dagger_sampler)
    return ClassReport(m, holder, dagger, limit_at_infinity(c, m))


def estimate_decay(c: BoundaryFunction, radii=(1e2, 1e3, 1e4), rays: int = 8) -> float:
    """Empirical decay exponent d with |c| ~ |x|^{-d}; inf when c underflows."""
    if c.decay is not None:
        return c.decay
    if c.is_zero:
        return math.inf
    n = c.sig.n
    rng = np.random.default_rng(11)
    dirs = _unit_vectors(rng, rays, n)
    mags = np.array([np.max(np.linalg.norm(c.eval_array(r * dirs), axis=1)) for r in radii])
    if mags[-1] < 1e-200:
        return math.inf
    mags = np.maximum(mags, 1e-300)
    slope = np.polyfit(np.log(radii), np.log(mags), 1)[0]
    return float(-slope)
