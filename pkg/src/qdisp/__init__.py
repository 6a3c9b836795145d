"""Free-particle wave-packet dispersion and position-entropy trajectories."""
from .dispersion import (Branch, DispersionModel, Kind, group_velocity, hessian,
                         hessian_eigenvalues, omega)
from .errors import (AliasRisk, ConfigError, DegenerateInput, DegenerateState, GridTooCoarse,
                     NormalizationFailure, NotNormalized, NumericalError, OffShell, QdispError,
                     SingularMatrix, TooFewSamples)
from .gaussian import (CoherentPacket, EvolvedGaussian, backward_prepared_packet,
                       entropy_trajectory, evolve_packet, gaussian_entropy, sigma_t)
from .grid import (EntropyTrajectory, GridField, GridSpec, conjugate, involution_F,
                   momentum_entropy, numerical_entropy, spectral_propagate)
from .partition import PartitionClass, StationaryPair, classify, superposition_trajectory
from .two_particle import (CollisionScenario, ExchangeStatistics, collision_run, joint_density,
                           joint_entropy, separation_sweep)

__version__ = "0.1.0"

__all__ = [
    "AliasRisk",
    "backward_prepared_packet",
    "Branch",
    "classify",
    "CoherentPacket",
    "collision_run",
    "CollisionScenario",
    "ConfigError",
    "conjugate",
    "DegenerateInput",
    "DegenerateState",
    "DispersionModel",
    "entropy_trajectory",
    "EntropyTrajectory",
    "evolve_packet",
    "EvolvedGaussian",
    "ExchangeStatistics",
    "gaussian_entropy",
    "GridField",
    "GridSpec",
    "GridTooCoarse",
    "group_velocity",
    "hessian",
    "hessian_eigenvalues",
    "involution_F",
    "joint_density",
    "joint_entropy",
    "Kind",
    "momentum_entropy",
    "NormalizationFailure",
    "NotNormalized",
    "numerical_entropy",
    "NumericalError",
    "OffShell",
    "omega",
    "PartitionClass",
    "QdispError",
    "separation_sweep",
    "sigma_t",
    "SingularMatrix",
    "spectral_propagate",
    "StationaryPair",
    "superposition_trajectory",
    "TooFewSamples",
]
