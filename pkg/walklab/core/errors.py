"""
Exception hierarchy shared by the library and the CLI.

Each concrete class carries the process exit code the CLI reports for it.
"""


class WalklabError(Exception):
    exit_code = 1


class InvalidPointError(WalklabError, ValueError):
    """A point is not valid in its model space (non-reduced word, im <= 0)."""

    exit_code = 2


class ConfigError(WalklabError, ValueError):
    exit_code = 2

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])


class EstimatorError(WalklabError, RuntimeError):
    exit_code = 3


class ProjectionExhaustedError(EstimatorError):
    """Enumeration hit its cap before a closest point could be certified."""


class CertificateError(WalklabError):
    exit_code = 4
