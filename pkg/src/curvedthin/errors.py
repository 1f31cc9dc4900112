"""Exception types shared across the package."""


class CurvedThinError(Exception):
    """Base class for all errors raised by this package."""


class NonFiniteInput(CurvedThinError):
    pass


class DegenerateChart(CurvedThinError):
    """Chart tangents are (numerically) linearly dependent at the requested point."""


class NotTangential(CurvedThinError):
    pass


class OutOfTube(CurvedThinError):
    """Point lies outside the tubular neighborhood of the surface."""


class SingularResolvent(CurvedThinError):
    """I - r*W is numerically singular; the domain invariants must be violated."""


class InvalidDomain(CurvedThinError):
    """Thin-domain invariants (gap positivity, thickness vs. reach) do not hold."""


class NotKilling(CurvedThinError):
    pass


class NotInKg(CurvedThinError):
    pass


class NotInR(CurvedThinError):
    pass


class InsufficientSamples(CurvedThinError):
    pass


class RigidDegenerate(CurvedThinError):
    """Strain vanishes numerically; the Rayleigh quotient diverges."""


class NoAdmissibleField(CurvedThinError):
    """Every candidate field failed an admissibility precondition.

    Carries a ``failures`` list of (epsilon, candidate name, failing test).
    """

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__(f"no admissible field; {len(self.failures)} rejections")


class SingularA(CurvedThinError):
    """Constraint deflation failed to remove all zero-energy modes."""


class NonPositiveValue(CurvedThinError):
    pass


class ParseError(CurvedThinError):
    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class ValidationError(CurvedThinError):
    def __init__(self, key, reason):
        self.key = key
        self.reason = reason
        super().__init__(f"{key}: {reason}")
