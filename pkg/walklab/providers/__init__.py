# Providers package: the computations behind every experiment kind
from . import casson, chain, estimators, geometry, shadow, walker
from .unified import ExperimentRunner, RunResult

__all__ = ['casson', 'chain', 'estimators', 'geometry', 'shadow', 'walker', 'ExperimentRunner', 'RunResult']
