from simulator.models.distributions import (
    JointIntegerDistribution,
    JointQuadratureDensity,
    SchmidtState,
    SpinPairState,
)
from simulator.models.schemas import (
    ChEvaluation,
    ChSettings,
    CutoffResult,
    GridSpec,
    LossChannel,
    MeasurementMode,
    NoiseModel,
)

__all__ = [
    "JointIntegerDistribution",
    "JointQuadratureDensity",
    "SchmidtState",
    "SpinPairState",
    "ChEvaluation",
    "ChSettings",
    "CutoffResult",
    "GridSpec",
    "LossChannel",
    "MeasurementMode",
    "NoiseModel",
]
