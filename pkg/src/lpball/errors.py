"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: configuration and domain problems exit
with 1, numerical failures with 2.
"""


class LpBallError(Exception):
    """Base class for every error raised by this package."""

    tag = "error"


class DomainError(LpBallError, ValueError):
    """An argument lies outside the domain of the requested function."""

    tag = "domain"


class DegenerateError(DomainError):
    """The requested quantity degenerates (zero variance, singular matrix)."""

    tag = "degenerate"


class ConfigError(LpBallError, ValueError):
    """Malformed or inconsistent experiment configuration."""

    tag = "config"


class NumericalError(LpBallError, ArithmeticError):
    """Quadrature or optimisation failed to reach the requested accuracy."""

    tag = "numeric"


class ConsistencyError(NumericalError):
    """Two routes to the same quantity disagree beyond round-off."""

    tag = "consistency"


class ContractViolation(LpBallError, RuntimeError):
    """A user-supplied callable broke its documented contract."""

    tag = "contract"
