# Core package: configuration, caching and errors
from .config import Config, config
from .errors import (
    WalklabError, InvalidPointError, ConfigError, EstimatorError,
    ProjectionExhaustedError, CertificateError,
)

__all__ = [
    'Config', 'config',
    'WalklabError', 'InvalidPointError', 'ConfigError', 'EstimatorError',
    'ProjectionExhaustedError', 'CertificateError',
]
