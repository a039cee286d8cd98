"""Hilbert and Schwarz boundary value problems for monogenic functions on the
upper half space of R^{n+1}, with Clifford-algebra values."""

from .algebra import (
    Multivector,
    Signature,
    bar,
    basis_sign,
    decompose,
    format_multivector,
    invert,
    mul,
    norm,
    norm0,
    paravector,
    star,
)
from .boundary import (
    BoundaryFunction,
    PairSampler,
    ShellSampler,
    classify_hat_H,
    estimate_holder,
    estimate_holder_dagger,
    eval_boundary,
    load_table_csv,
)
from .expr import parse, parse_multivector, pretty
from .monogenic import (
    PointField,
    SymmetricPolynomial,
    cauchy_kernel_E,
    cauchy_riemann_residual,
    dE_first,
    dirac_residual,
    fueter_Z,
    hyper_variable_z,
    negative_power_W,
    order_at_infinity,
)
from .quadrature import (
    IntegralResult,
    QuadratureScheme,
    cauchy_integral_S,
    moment_integral,
    moment_integrals,
    sphere_area_constant,
    tail_bound,
)
from .solvers import (
    HilbertProblem,
    SectionallyRegularField,
    Solution,
    count_conditions,
    count_free_constants,
    reflective,
    self_reflection,
    solve_hilbert,
    solve_riemann_jump,
    solve_schwarz,
    symmetric_extension,
    verify_solution,
)

__version__ = "0.1.0"
