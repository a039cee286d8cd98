"""Riemann jump, Schwarz and Hilbert problems on the upper half space.

Problem: find Phi regular on R^{n+1}_+ with Re(Phi+(x) lambda) = c(x) on the
hyperplane and Phi(w) = o(w^{m+1}) at infinity.  The Schwarz problem is
lambda = 1.  Solutions are built from the Cauchy-type integral S[c] plus, for
m >= 0, a free symmetric polynomial; for m < 0 the solution is unique and may
need solvability conditions.

Case tags:
    C1  m >= 0          S[c] + free polynomial of degree <= m
    C2  m = -1          S[c], requires c(inf) = 0
    C3  -n < m < -1     S[c]
    C4  m <= -n         S[c], requires binom(-m-1, n) vanishing moments
For n = 1, m = -1 meets both C2 and C4 (with zero moments); it is tagged C2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .algebra import Multivector, Signature, decompose, invert, is_para_real, is_paravector, mul, star
from .boundary import BoundaryFunction, ClassReport, classify_hat_H, limit_at_infinity
from .errors import (
    ConditionViolated,
    DatumLimitNonzero,
    DomainError,
    EvaluationOnHyperplane,
    NonDecayingDatum,
    SingularElement,
    SingularLambda,
)
from .monogenic import (
    MultiIndex,
    PointField,
    default_rays,
    dirac_residual,
    fueter_Z,
    lower_half,
    multi_indices,
    multi_indices_upto,
    order_at_infinity,
    upper_half,
)
from .quadrature import IntegralResult, MomentResult, QuadratureScheme, cauchy_integral_S, condition_satisfied, moment_integrals

LIMIT_TOL = 1e-6


class SolverWarning(UserWarning):
    pass


# ---------------------------------------------------------------- counting


def count_free_constants(n: int, m: int) -> int:
    """binom(n+m, m): the number of multi-indices with |alpha| <= m."""
    if m < 0:
        raise ValueError("free constants exist only for m >= 0")
    return math.comb(n + m, m)


def count_conditions(n: int, m: int) -> int:
    """binom(-m-1, n): the number of moments with |alpha| <= -(n+1+m)."""
    if m > -n:
        raise ValueError("moment conditions apply only for m <= -n")
    return math.comb(-m - 1, n)


def condition_indices(n: int, m: int) -> list[MultiIndex]:
    top = -(n + 1 + m)
    return multi_indices_upto(n, top) if top >= 0 else []


def case_tag(n: int, m: int) -> str:
    if m >= 0:
        return "C1"
    if m == -1:
        return "C2"
    if m > -n:
        return "C3"
    return "C4"


# ---------------------------------------------------------------- sectional fields


@dataclass(frozen=True)
class SectionallyRegularField:
    """A pair of branches on the open upper and lower half spaces."""

    upper: PointField
    lower: PointField

    @property
    def sig(self) -> Signature:
        return self.upper.sig

    def __call__(self, w) -> Multivector:
        w = np.asarray(w, dtype=float)
        if w[-1] > 0:
            return self.upper(w)
        if w[-1] < 0:
            return self.lower(w)
        raise EvaluationOnHyperplane("sectionally regular fields are evaluated off the jump plane")

    @classmethod
    def from_function(cls, sig: Signature, fn: Callable[[np.ndarray], Multivector], name: str = "") -> "SectionallyRegularField":
        return cls(PointField(sig, fn, upper_half, name + "+"), PointField(sig, fn, lower_half, name + "-"))


def _reflect_point(w) -> np.ndarray:
    w = np.array(w, dtype=float)
    w[-1] = -w[-1]
    return w


def symmetric_extension(phi: PointField) -> SectionallyRegularField:
    """Upper branch phi, lower branch w -> star(phi(star w))."""
    sig = phi.sig
    upper = PointField(sig, phi.fn, upper_half, phi.name or "phi")
    lower = PointField(sig, lambda w: star(phi(_reflect_point(w))), lower_half, f"{phi.name or 'phi'}*")
    return SectionallyRegularField(upper, lower)


def reflective(psi: SectionallyRegularField) -> SectionallyRegularField:
    """The reflective function: upper branch [psi-]^*, lower branch [psi+]^*."""
    sig = psi.sig
    upper = PointField(sig, lambda w: star(psi.lower(_reflect_point(w))), upper_half, "reflected+")
    lower = PointField(sig, lambda w: star(psi.upper(_reflect_point(w))), lower_half, "reflected-")
    return SectionallyRegularField(upper, lower)


def self_reflection(psi: SectionallyRegularField) -> SectionallyRegularField:
    """R[psi] = (psi + psi_reflected) / 2."""
    refl = reflective(psi)
    sig = psi.sig
    upper = PointField(sig, lambda w: 0.5 * (psi.upper(w) + refl.upper(w)), upper_half, "self-reflection+")
    lower = PointField(sig, lambda w: 0.5 * (psi.lower(w) + refl.lower(w)), lower_half, "self-reflection-")
    return SectionallyRegularField(upper, lower)


def sign_flipped(sig: Signature, fn: Callable[[np.ndarray], Multivector], name: str = "") -> SectionallyRegularField:
    """+fn on the upper half space and -fn on the lower one."""
    upper = PointField(sig, fn, upper_half, name + "+")
    lower = PointField(sig, lambda w: -fn(w), lower_half, name + "-")
    return SectionallyRegularField(upper, lower)


# ---------------------------------------------------------------- problems and solutions


@dataclass(frozen=True)
class HilbertProblem:
    sig: Signature
    m: int
    lam: Multivector
    c: BoundaryFunction
    scheme: QuadratureScheme = field(default_factory=QuadratureScheme)

    def __post_init__(self):
        if self.lam.sig != self.sig or self.c.sig != self.sig:
            raise ValueError("signature mismatch between problem parts")
        try:
            invert(self.lam)
        except SingularElement as exc:
            raise SingularLambda(f"lambda is not invertible: {exc}") from None

    @classmethod
    def schwarz(cls, m: int, c: BoundaryFunction, scheme: QuadratureScheme | None = None) -> "HilbertProblem":
        return cls(c.sig, m, Multivector.scalar(c.sig, 1.0), c, scheme or QuadratureScheme())


@dataclass(frozen=True)
class SolvabilityEntry:
    """One moment condition; ``moment`` is None when the integral diverges."""

    alpha: MultiIndex
    moment: MomentResult | None
    satisfied: bool
    note: str = ""

    @property
    def value(self) -> Multivector | None:
        return None if self.moment is None else self.moment.sigma.value

    def describe(self) -> str:
        if self.moment is None:
            return f"alpha={self.alpha}: {self.note}"
        return f"alpha={self.alpha}: {self.value} (err {self.moment.sigma.error_estimate:.2e})"


@dataclass(frozen=True)
class CaseReport:
    case_tag: str
    class_report: ClassReport | None
    datum_limit: Multivector | None
    solvability: tuple[SolvabilityEntry, ...]
    warnings: tuple[str, ...]
    limit_ok: bool = True

    @property
    def violated(self) -> bool:
        return not self.limit_ok or any(not e.satisfied for e in self.solvability)


def polynomial_coefficient_blade(alpha: MultiIndex, sig: Signature) -> Multivector:
    """Right factor placed after R_alpha so that Re(Z^alpha(x) R_alpha k) = 0 on the hyperplane.

    z_n(x) = -x_0 e_n on the hyperplane, so Z^alpha(x) is para-real when
    alpha_n is even (k = e_n) and para-real times e_n when alpha_n is odd
    (k = 1).
    """
    if alpha[-1] % 2 == 0:
        return Multivector.generator(sig, sig.n)
    return Multivector.scalar(sig, 1.0)


@dataclass(frozen=True)
class Solution:
    """A solution family; free constants default to zero."""

    case_tag: str
    sig: Signature
    m: int
    c: BoundaryFunction
    scheme: QuadratureScheme
    lambda_: Multivector
    lambda_inverse: Multivector
    lambda_is_paravector: bool
    poly_basis: tuple[MultiIndex, ...]
    free_constants: Mapping[MultiIndex, Multivector]
    solvability: tuple[SolvabilityEntry, ...]
    class_report: ClassReport | None
    warnings: tuple[str, ...]

    @property
    def n(self) -> int:
        return self.sig.n

    def principal_result(self, w) -> IntegralResult:
        return cauchy_integral_S(self.c, w, self.scheme)

    def principal(self, w) -> Multivector:
        return self.principal_result(w).value

    def polynomial(self, w) -> Multivector:
        out = Multivector.zero(self.sig)
        for alpha in self.poly_basis:
            r = self.free_constants.get(alpha)
            if r is None or not np.any(r.coeffs):
                continue
            term = mul(mul(fueter_Z(alpha, w, self.sig), r), polynomial_coefficient_blade(alpha, self.sig))
            out = out + term / math.factorial(sum(alpha))
        return out

    def schwarz_value(self, w) -> Multivector:
        """The lambda = 1 solution at w."""
        w = np.asarray(w, dtype=float)
        if not w[-1] > 0:
            raise DomainError("solutions are evaluated on the open upper half space")
        return self.principal(w) + self.polynomial(w)

    def evaluate(self, w) -> Multivector:
        return mul(self.schwarz_value(w), self.lambda_inverse)

    def field(self) -> PointField:
        return PointField(self.sig, self.evaluate, upper_half, "Phi")

    def extension(self) -> SectionallyRegularField:
        """Lower branch Phi(w) = Psi(w) lambda with Psi the symmetric extension of Phi lambda."""
        psi = symmetric_extension(PointField(self.sig, self.schwarz_value, upper_half, "Psi"))
        lower = PointField(self.sig, lambda w: mul(psi.lower(w), self.lambda_inverse), lower_half, "Phi-")
        return SectionallyRegularField(self.field(), lower)

    def with_constants(self, constants: Mapping[MultiIndex, Multivector]) -> "Solution":
        if self.case_tag != "C1":
            raise ValueError("only m >= 0 solutions have free constants")
        merged = dict(self.free_constants)
        for alpha, r in constants.items():
            alpha = tuple(alpha)
            if alpha not in self.poly_basis:
                raise ValueError(f"{alpha} is not in the polynomial basis (|alpha| <= {self.m})")
            if r.sig != self.sig or not is_para_real(r):
                raise ValueError(f"free constant for {alpha} must be para-real")
            merged[alpha] = r
        return replace(self, free_constants=merged)

    @property
    def conditions_satisfied(self) -> bool:
        return all(e.satisfied for e in self.solvability)


# ---------------------------------------------------------------- case analysis


def analyse_case(n: int, m: int, c: BoundaryFunction, scheme: QuadratureScheme, strict: bool = True) -> CaseReport:
    """Class checks (warnings), c(inf) for C2 and moment conditions for C4.

    With ``strict`` the failing conditions raise; otherwise they are only reported.
    """
    tag = case_tag(n, m)
    notes: list[str] = []
    r = 0 if m >= 0 else -(m + 1)
    report = None
    if not c.is_zero:
        report = classify_hat_H(c, r)
        if not report.in_hat_H_m:
            notes.append(f"datum may not be in the H-hat class of index {r}: {report.summary()}")
        elif m < -1 and not report.in_hat_H_m0:
            notes.append(f"datum may not satisfy x^{r} c(x) -> 0 at infinity: {report.summary()}")
    limit = None
    limit_ok = True
    if tag == "C2":
        est = limit_at_infinity(c, 0) if not c.is_zero else None
        limit = Multivector.zero(c.sig) if est is None else est.value
        if limit is None or float(np.linalg.norm(limit.coeffs)) > LIMIT_TOL:
            limit_ok = False
            msg = "c(inf) = 0 is required for m = -1 but " + (
                "the limit does not exist" if limit is None else f"c(inf) is about {limit}"
            )
            if strict:
                raise DatumLimitNonzero(msg, report)
            notes.append(msg)
    entries: list[SolvabilityEntry] = []
    if tag == "C4":
        for alpha in condition_indices(n, m):
            try:
                mom = moment_integrals(alpha, c, scheme)
            except NonDecayingDatum as exc:
                entries.append(SolvabilityEntry(alpha, None, False, f"moment diverges ({exc})"))
                continue
            entries.append(SolvabilityEntry(alpha, mom, condition_satisfied(mom.sigma, scheme)))
        bad = [e for e in entries if not e.satisfied]
        if bad:
            detail = "; ".join(e.describe() for e in bad)
            msg = f"moment conditions violated: {detail}"
            if strict:
                raise ConditionViolated(msg, tuple(entries))
            notes.append(msg)
    return CaseReport(tag, report, limit, tuple(entries), tuple(notes), limit_ok)


def _emit(notes: Sequence[str]) -> None:
    for note in notes:
        warnings.warn(note, SolverWarning, stacklevel=3)


# ---------------------------------------------------------------- solvers


@dataclass(frozen=True)
class RiemannReport:
    case: CaseReport
    poly_basis: tuple[MultiIndex, ...]


def solve_riemann_jump(
    m: int,
    c: BoundaryFunction,
    scheme: QuadratureScheme | None = None,
    coefficients: Mapping[MultiIndex, Multivector] | None = None,
) -> tuple[SectionallyRegularField, RiemannReport]:
    """Psi = +Phi above and -Phi below with Phi = S[c] + P_m.

    ``coefficients`` are arbitrary Clifford constants c_alpha of the free
    polynomial (m >= 0 only).
    """
    scheme = QuadratureScheme() if scheme is None else scheme
    sig = c.sig
    case = analyse_case(sig.n, m, c, scheme)
    _emit(case.warnings)
    basis = tuple(multi_indices_upto(sig.n, m)) if m >= 0 else ()
    coefficients = dict(coefficients or {})
    if coefficients and m < 0:
        raise ValueError("polynomial coefficients only exist for m >= 0")
    for alpha in coefficients:
        if tuple(alpha) not in basis:
            raise ValueError(f"{alpha} is not in the polynomial basis")

    def phi(w) -> Multivector:
        out = cauchy_integral_S(c, w, scheme).value
        for alpha, ca in coefficients.items():
            out = out + mul(fueter_Z(alpha, w, sig), ca) / math.factorial(sum(alpha))
        return out

    return sign_flipped(sig, phi, "Psi"), RiemannReport(case, basis)


def _solve(problem: HilbertProblem) -> Solution:
    sig = problem.sig
    case = analyse_case(sig.n, problem.m, problem.c, problem.scheme)
    notes = list(case.warnings)
    lam = problem.lam
    para = is_paravector(lam)
    if not para:
        notes.append("lambda is not a paravector; its inverse comes from the left-regular matrix")
    lam_inv = invert(lam)
    basis = tuple(multi_indices_upto(sig.n, problem.m)) if problem.m >= 0 else ()
    _emit(notes)
    return Solution(
        case_tag=case.case_tag,
        sig=sig,
        m=problem.m,
        c=problem.c,
        scheme=problem.scheme,
        lambda_=lam,
        lambda_inverse=lam_inv,
        lambda_is_paravector=para,
        poly_basis=basis,
        free_constants={},
        solvability=case.solvability,
        class_report=case.class_report,
        warnings=tuple(notes),
    )


def solve_schwarz(m: int, c: BoundaryFunction, scheme: QuadratureScheme | None = None) -> Solution:
    """Re Phi+ = c with Phi = o(w^{m+1})."""
    return _solve(HilbertProblem.schwarz(m, c, scheme))


def solve_hilbert(problem: HilbertProblem) -> Solution:
    """Re(Phi+ lambda) = c: the Schwarz solution right-multiplied by lambda^{-1}."""
    return _solve(problem)


# ---------------------------------------------------------------- verification

DEFAULT_EPS = (0.1, 0.05, 0.025)


@dataclass(frozen=True)
class ProbeSet:
    interior: np.ndarray
    boundary: np.ndarray
    eps: tuple[float, ...] = DEFAULT_EPS
    rays: np.ndarray | None = None
    radii: tuple[float, ...] = tuple(2.0 ** np.arange(4, 11))

    @classmethod
    def default(cls, n: int, seed: int = 0, eps: Sequence[float] = DEFAULT_EPS, count: int = 10) -> "ProbeSet":
        rng = np.random.default_rng(seed)
        interior = np.concatenate([rng.uniform(-1, 1, (5, n)), rng.uniform(0.5, 1.5, (5, 1))], axis=1)
        boundary = rng.uniform(-2, 2, (count, n))
        return cls(interior, boundary, tuple(eps), default_rays(n, 4, seed=20170 + seed))


@dataclass(frozen=True)
class SeriesFit:
    """Residuals along an eps-approach: sup values, fitted order, extrapolated sup."""

    eps: tuple[float, ...]
    sup: tuple[float, ...]
    order: float
    extrapolated: float

    def decays(self, min_order: float = 0.9, floor: float = 1e-10) -> bool:
        if max(self.sup) <= floor:
            return True
        return self.order >= min_order


@dataclass(frozen=True)
class VerificationReport:
    dirac_max: float
    dirac_tol: float
    boundary: SeriesFit
    boundary_identity: SeriesFit
    reflection_max: float
    growth_order: int | None
    growth_slope: float
    growth_confidence: float
    m: int

    @property
    def dirac_ok(self) -> bool:
        return self.dirac_max <= self.dirac_tol

    @property
    def boundary_ok(self) -> bool:
        return self.boundary.decays()

    @property
    def growth_ok(self) -> bool:
        if self.growth_order is None:
            return True
        return self.growth_order <= self.m or self.growth_slope <= self.m + self.growth_confidence

    @property
    def reflection_ok(self) -> bool:
        return self.reflection_max <= 1e-10

    @property
    def passed(self) -> bool:
        return self.dirac_ok and self.boundary_ok and self.growth_ok and self.reflection_ok

    def to_text(self) -> str:
        def f(x: float) -> str:
            return f"{x:.6e}"

        lines = [
            f"regularity: max dirac residual {f(self.dirac_max)} (tol {f(self.dirac_tol)}) {'PASS' if self.dirac_ok else 'FAIL'}",
            "boundary: eps " + " ".join(f(e) for e in self.boundary.eps) + " sup " + " ".join(f(s) for s in self.boundary.sup),
            f"boundary: fitted order {self.boundary.order:.4f} extrapolated {f(self.boundary.extrapolated)} {'PASS' if self.boundary_ok else 'FAIL'}",
            "boundary identity: sup " + " ".join(f(s) for s in self.boundary_identity.sup)
            + f" order {self.boundary_identity.order:.4f} extrapolated {f(self.boundary_identity.extrapolated)}",
            f"reflection identity: max residual {f(self.reflection_max)} {'PASS' if self.reflection_ok else 'FAIL'}",
            f"growth: order {self.growth_order} slope {self.growth_slope:.4f} (+-{self.growth_confidence:.4f}) required <= {self.m} {'PASS' if self.growth_ok else 'FAIL'}",
            f"overall: {'PASS' if self.passed else 'FAIL'}",
        ]
        return "\n".join(lines)


def _fit_series(eps: Sequence[float], residuals: list[np.ndarray]) -> SeriesFit:
    """residuals[k] has shape (P, K): per-probe residual vectors at eps[k]."""
    sups = [float(np.max(np.linalg.norm(r, axis=1))) if r.size else 0.0 for r in residuals]
    if all(s > 0 for s in sups) and len(eps) >= 2:
        order = float(np.polyfit(np.log(eps), np.log(sups), 1)[0])
    else:
        order = math.inf if all(s == 0 for s in sups) else float("nan")
    # Richardson elimination of the eps, eps^2, ... terms
    levels = [np.asarray(r) for r in residuals]
    power = 1
    while len(levels) > 1:
        nxt = []
        for i in range(len(levels) - 1):
            factor = (eps[i] / eps[i + power]) ** power
            nxt.append((factor * levels[i + 1] - levels[i]) / (factor - 1.0))
        levels = nxt
        power += 1
    extrap = float(np.max(np.linalg.norm(levels[0], axis=1))) if levels[0].size else 0.0
    return SeriesFit(tuple(eps), tuple(sups), order, extrap)


def verify_solution(sol, probes: ProbeSet | None = None, h: float = 1e-3, dirac_tol: float = 1e-5) -> VerificationReport:
    """Check regularity, the boundary condition, growth and the reflection identity.

    ``sol`` needs ``sig``, ``m``, ``c``, ``lambda_``, ``evaluate`` and ``schwarz_value``.
    """
    sig = sol.sig
    n = sig.n
    probes = ProbeSet.default(n) if probes is None else probes
    phi = PointField(sig, sol.evaluate, upper_half, "Phi")

    dirac = 0.0
    for w in probes.interior:
        dirac = max(dirac, float(np.linalg.norm(dirac_residual(phi, w, h=h).coeffs)))

    ext = symmetric_extension(PointField(sig, sol.schwarz_value, upper_half, "Psi"))
    bres, ident, refl = [], [], 0.0
    for e in probes.eps:
        rows_b, rows_i = [], []
        for x in probes.boundary:
            up = np.append(x, e)
            down = np.append(x, -e)
            c_x = sol.c(x)
            val = sol.evaluate(up)
            rows_b.append(decompose(mul(val, sol.lambda_))[0].coeffs - c_x.coeffs)
            psi_up = ext(up)
            psi_down = ext(down)
            rows_i.append((psi_up + psi_down).coeffs - 2.0 * c_x.coeffs)
            # [Psi+]^* against [Psi^*]- at mirrored points
            refl = max(refl, float(np.linalg.norm((star(psi_up) - psi_down).coeffs)))
        bres.append(np.array(rows_b))
        ident.append(np.array(rows_i))

    growth = order_at_infinity(phi, probes.rays, probes.radii)
    return VerificationReport(
        dirac_max=dirac,
        dirac_tol=dirac_tol,
        boundary=_fit_series(probes.eps, bres),
        boundary_identity=_fit_series(probes.eps, ident),
        reflection_max=refl,
        growth_order=growth.order,
        growth_slope=growth.slope,
        growth_confidence=growth.confidence,
        m=sol.m,
    )
