"""Four-way classification of entropy trajectories and stationary-state checks.

Classes, for a trajectory sampled on ``[0, delta_t]``:

* ``C``: constant entropy
* ``M``: increasing somewhere, never decreasing
* ``W``: decreasing somewhere, never increasing
* ``I``: both (oscillating)

"Increasing" and "decreasing" refer to successive differences exceeding
the trajectory's tolerance, so the result depends on the sampling.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .dispersion import DispersionModel
from .errors import ConfigError, NormalizationFailure, TooFewSamples
from .grid import (EntropyTrajectory, GridField, GridSpec, density_entropy,
                   require_normalized, spectral_propagate)

ANALYTIC_TOLERANCE = 1e-8
GRID_TOLERANCE = 1e-4
DENSITY_DRIFT_TOLERANCE = 1e-9


class PartitionClass(enum.Enum):
    C = "C"
    W = "W"
    M = "M"
    I = "I"  # noqa: E741

    def __str__(self):
        return self.value


def interval_signs(traj: EntropyTrajectory) -> np.ndarray:
    """Per-interval sign in ``{-1, 0, +1}`` of the entropy change at the trajectory tolerance."""
    diffs = traj.differences()
    signs = np.zeros(diffs.size, dtype=int)
    signs[diffs > traj.tolerance] = 1
    signs[diffs < -traj.tolerance] = -1
    return signs


def classify(traj: EntropyTrajectory) -> PartitionClass:
    if len(traj) < 3:
        raise TooFewSamples(f"classification needs at least 3 samples, got {len(traj)}")
    signs = interval_signs(traj)
    up, down = bool(np.any(signs > 0)), bool(np.any(signs < 0))
    if up and down:
        return PartitionClass.I
    if up:
        return PartitionClass.M
    if down:
        return PartitionClass.W
    return PartitionClass.C


def density_drift(f: GridField, model: DispersionModel, times) -> float:
    """Largest pointwise change of ``|psi|^2`` under spectral propagation over ``times``."""
    require_normalized(f)
    rho0 = f.density
    drift = 0.0
    for t in np.asarray(times, dtype=float):
        drift = max(drift, float(np.max(np.abs(spectral_propagate(f, model, t).density - rho0))))
    return drift


def stationary_density_check(f: GridField, model: DispersionModel, times,
                             tolerance: float = DENSITY_DRIFT_TOLERANCE) -> bool:
    """True when the density stays put (within ``tolerance``) at every time in ``times``."""
    return density_drift(f, model, times) < tolerance


@dataclass(frozen=True, eq=False)
class StationaryPair:
    """Two stationary states ``A_j(r) exp(i (phi_j(r) - omega_j t))`` with complex weights ``mix``."""

    spec: GridSpec
    a1: np.ndarray = field(repr=False)
    a2: np.ndarray = field(repr=False)
    phi1: np.ndarray = field(repr=False)
    phi2: np.ndarray = field(repr=False)
    omega1: float
    omega2: float
    mix: tuple[complex, complex] = (1.0, 1.0)

    def __post_init__(self):
        for name in ("a1", "a2", "phi1", "phi2"):
            arr = np.broadcast_to(np.asarray(getattr(self, name), dtype=float), self.spec.shape)
            object.__setattr__(self, name, arr)
        if self.omega1 == self.omega2:
            raise ConfigError("the two stationary states need distinct frequencies")
        object.__setattr__(self, "mix", tuple(complex(c) for c in self.mix))

    @classmethod
    def harmonic_oscillator(cls, spec: GridSpec | None = None, frequency: float = 1.0,
                            mix=(1.0, 1.0), second: bool = True) -> "StationaryPair":
        """Ground and first excited oscillator states (unit mass, ``hbar = 1``).

        Their frequencies differ by ``frequency``. With ``second=False`` the
        excited state is dropped (``A2 = 0``), leaving a single stationary state.
        """
        spec = spec or GridSpec.from_bounds(-10.0, 10.0, 512)
        if spec.d != 1:
            raise ConfigError("the oscillator pair is one-dimensional")
        x = spec.axes()[0] * np.sqrt(frequency)
        scale = (frequency / np.pi) ** 0.25
        ground = scale * np.exp(-0.5 * x * x)
        excited = scale * np.sqrt(2.0) * x * np.exp(-0.5 * x * x) if second else np.zeros_like(x)
        zero = np.zeros_like(x)
        return cls(spec, ground, excited, zero, zero, 0.5 * frequency, 1.5 * frequency, mix)

    @property
    def delta_omega(self) -> float:
        return self.omega1 - self.omega2

    def amplitude(self, t: float) -> np.ndarray:
        c1, c2 = self.mix
        return (c1 * self.a1 * np.exp(1j * (self.phi1 - self.omega1 * t))
                + c2 * self.a2 * np.exp(1j * (self.phi2 - self.omega2 * t)))

    def field(self, t: float) -> GridField:
        """Normalized superposition at time ``t``."""
        f = GridField(self.spec, self.amplitude(t))
        return f.normalized()


def superposition_trajectory(p: StationaryPair, delta_t: float, samples: int,
                             tolerance: float = ANALYTIC_TOLERANCE,
                             mass_tolerance: float = 1e-8) -> EntropyTrajectory:
    """Entropy of the normalized superposition at ``samples`` equally spaced times on ``[0, delta_t]``.

    The normalization constant must not depend on time (the two states have
    to be orthogonal); otherwise :class:`NormalizationFailure` is raised.
    """
    if samples < 2:
        raise ConfigError("need at least two sample times")
    times = np.linspace(0.0, delta_t, samples)
    fields = [GridField(p.spec, p.amplitude(t)) for t in times]
    masses = np.array([f.mass for f in fields])
    if not np.all(masses > 0):
        raise NormalizationFailure("superposition vanishes identically")
    if np.ptp(masses) > mass_tolerance * masses.max():
        raise NormalizationFailure(
            f"norm oscillates by {np.ptp(masses) / masses.max():.2e}; states are not orthogonal")
    z = masses.mean()
    entropies = [density_entropy(f.density / z, p.spec.cell_volume) for f in fields]
    return EntropyTrajectory(times, entropies, tolerance)
