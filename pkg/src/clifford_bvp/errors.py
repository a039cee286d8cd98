"""Exception types shared across the package."""


class CliffordError(Exception):
    pass


class SignatureMismatch(CliffordError, ValueError):
    pass


class SingularElement(CliffordError, ArithmeticError):
    """Raised when a Clifford number has no inverse."""


class PoleAtOrigin(CliffordError, ArithmeticError):
    pass


class StencilCrossesOrigin(PoleAtOrigin):
    pass


class DomainError(CliffordError, ValueError):
    """A field was evaluated outside the set where it is defined."""


class ExprSyntaxError(CliffordError, SyntaxError):
    def __init__(self, message: str, position: int, expected: str = ""):
        self.position = position
        self.expected = expected
        detail = f"{message} at position {position}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class ParaRealViolation(CliffordError, ValueError):
    """A boundary expression used a blade containing the last generator."""


class NonDecayingDatum(CliffordError, ValueError):
    pass


class EvaluationOnHyperplane(CliffordError, ValueError):
    pass


class ConditionViolated(CliffordError):
    """Solvability conditions failed beyond tolerance.

    ``report`` carries the measured values.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class DatumLimitNonzero(ConditionViolated):
    pass


class SingularLambda(SingularElement):
    pass
