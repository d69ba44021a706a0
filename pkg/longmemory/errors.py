"""
Exception hierarchy shared by the estimation modules

Each class carries the process exit code the command line maps it to.
"""


class LongMemoryError(Exception):
    """Base class for every failure raised by the toolkit"""
    exit_code = 1


class DomainError(LongMemoryError, ValueError):
    """A parameter lies outside the domain of the operation (H, C, d, lambda = 0, sigma^2 <= 0)"""
    exit_code = 3


class RangeError(LongMemoryError, IndexError):
    """A lag or trimming number is out of range for the series length"""
    exit_code = 3


class TruncationError(LongMemoryError):
    """The FARIMA moving-average truncation cannot meet the variance-deficit bound"""
    exit_code = 4


class EmbeddingError(LongMemoryError):
    """Circulant embedding failed and the Cholesky fallback is unavailable at this length"""
    exit_code = 4


class DerivativeInstabilityError(LongMemoryError):
    """Richardson-extrapolated finite differences disagree beyond tolerance"""
    exit_code = 5


class DegenerateSeriesError(LongMemoryError):
    """The series carries no second-order information (constant, or all-equal samples)"""
    exit_code = 6


class InputFormatError(LongMemoryError):
    """Malformed series CSV, JSON sidecar or run file"""
    exit_code = 7


EXIT_CODES = {
    0: "success",
    1: "unexpected internal error",
    2: "usage error (unknown flag or subcommand)",
    3: "invalid parameter domain or range",
    4: "simulation backend failure (truncation or embedding)",
    5: "derivative instability in limit constants",
    6: "degenerate input series",
    7: "malformed input file",
}
