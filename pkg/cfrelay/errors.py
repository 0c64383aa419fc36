"""Exceptions raised by cfrelay and the exit codes the CLI maps them to."""

from enum import IntEnum


class ExitCode(IntEnum):
    OK = 0
    FAILURE = 1
    USAGE = 2  # same code argparse uses for bad flags
    IO = 3
    NUMERICAL = 4


class CFRelayError(Exception):
    """Base class for every error raised by the library."""

    exit_code = ExitCode.FAILURE


class InvalidInputError(CFRelayError, ValueError):
    """An argument violates a documented precondition."""

    exit_code = ExitCode.USAGE


class NoSolutionError(CFRelayError, ValueError):
    """The Diophantine equation has no integer solution (gcd does not divide lambda)."""

    exit_code = ExitCode.USAGE


class NumericalError(CFRelayError, ArithmeticError):
    """A floating-point computation left its valid domain, e.g. a failed Cholesky."""

    exit_code = ExitCode.NUMERICAL


class OutputError(CFRelayError, OSError):
    """A result file could not be written or read."""

    exit_code = ExitCode.IO
