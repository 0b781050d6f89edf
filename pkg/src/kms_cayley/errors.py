"""Exception hierarchy.

DomainError marks mathematically well-posed requests with no answer (e.g. a
sphere below the critical temperature); these map to CLI exit code 2.
UsageError marks malformed requests (unknown group, bad word) and maps to
exit code 1.
"""


class KmsCayleyError(Exception):
    pass


class UsageError(KmsCayleyError):
    pass


class DomainError(KmsCayleyError):
    pass


class OracleUnavailableError(DomainError):
    """Operation needs exact word arithmetic but the spec has no oracle."""


class EndpointMismatchError(DomainError):
    """V_t V_u* with different endpoints is not an element of the algebra."""


class NoSphereError(DomainError):
    """Sphere of extreme states requested at or below the critical beta."""


class RankZeroError(DomainError):
    """Operation undefined when the abelianization has rank zero."""


class TabulatedDomainError(KmsCayleyError):
    """Tabulated harmonic vector evaluated outside its ball."""


class ConvergenceError(KmsCayleyError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
