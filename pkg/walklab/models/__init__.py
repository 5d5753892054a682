# Models package: immutable value types shared by providers and routes
from .space import ModelSpace, FreeGroupTree, HalfPlane
from .quasiconvex import (
    QuasiconvexSet, SubgroupOrbit, ExplicitVertexSet, GeodesicLine,
    axis, vertex_set, geodesic,
)
from .measure import StepDistribution, SamplePath, ZStepLaw
from .chain import ChainParams, DistributionVector
from .casson import SurgeryKnot, HomologySphereValue, TREFOIL, S3
from .reports import CheckReport, DecayRow, DecayReport, ExpFit
from .kernels import KernelTable
from .shadow import ShadowSpec
from .experiment import ExperimentConfig, SCHEMA_VERSION

__all__ = [
    'ModelSpace', 'FreeGroupTree', 'HalfPlane',
    'QuasiconvexSet', 'SubgroupOrbit', 'ExplicitVertexSet', 'GeodesicLine',
    'axis', 'vertex_set', 'geodesic',
    'StepDistribution', 'SamplePath', 'ZStepLaw',
    'ChainParams', 'DistributionVector',
    'SurgeryKnot', 'HomologySphereValue', 'TREFOIL', 'S3',
    'CheckReport', 'DecayRow', 'DecayReport', 'ExpFit', 'KernelTable', 'ShadowSpec',
    'ExperimentConfig', 'SCHEMA_VERSION',
]
