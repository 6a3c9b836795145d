"""Free-particle dispersion relations.

Closed forms for the angular frequency ``omega(k)``, the group velocity
``grad omega`` and the Hessian of ``omega`` for the free Schrodinger
particle and for the two energy branches of the free Dirac particle.

Wave vectors are plain ``numpy`` arrays of length ``d`` in ``{1, 2, 3}``.
``omega`` also accepts stacked arrays of shape ``(..., d)`` so it can be
evaluated on a whole spectral grid at once.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateInput


class Kind(enum.Enum):
    SCHRODINGER = "schrodinger"
    DIRAC = "dirac"


class Branch(enum.IntEnum):
    POSITIVE = 1
    NEGATIVE = -1


@dataclass(frozen=True)
class DispersionModel:
    """Free-particle model with mass, reduced Planck constant and speed of light.

    Natural units (``hbar = c = 1``) are the defaults. ``branch`` only matters
    for the Dirac model; the Schrodinger model is always on the positive branch.
    """

    kind: Kind
    mass: float
    hbar: float = 1.0
    c: float = 1.0
    branch: Branch = Branch.POSITIVE

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "branch", Branch(self.branch))
        for name in ("mass", "hbar", "c"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.hbar <= 0 or self.c <= 0:
            raise ConfigError("hbar and c must be positive")
        if kind is Kind.SCHRODINGER:
            if self.mass <= 0:
                raise ConfigError(f"Schrodinger mass must be > 0, got {self.mass}")
            if self.branch is not Branch.POSITIVE:
                raise ConfigError("the Schrodinger model has only the positive branch")
        elif self.mass < 0:
            raise ConfigError(f"Dirac mass must be >= 0, got {self.mass}")

    @classmethod
    def schrodinger(cls, mass: float = 1.0, hbar: float = 1.0) -> "DispersionModel":
        return cls(Kind.SCHRODINGER, mass, hbar)

    @classmethod
    def dirac(cls, mass: float = 1.0, hbar: float = 1.0, c: float = 1.0,
              branch: Branch = Branch.POSITIVE) -> "DispersionModel":
        return cls(Kind.DIRAC, mass, hbar, c, branch)

    @property
    def sign(self) -> int:
        return int(self.branch)

    @property
    def compton_wavenumber(self) -> float:
        """``m c / hbar``; the wavenumber scale of the Dirac model."""
        return self.mass * self.c / self.hbar


def as_wavevector(k) -> np.ndarray:
    """Validate a single wave vector and return it as a float array of shape ``(d,)``."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if k.ndim != 1 or k.size not in (1, 2, 3):
        raise ConfigError(f"wave vector must have 1, 2 or 3 components, got shape {k.shape}")
    if not np.all(np.isfinite(k)):
        raise ConfigError("wave vector components must be finite")
    return k


def _dirac_energy(model: DispersionModel, ksq):
    """``sqrt(|k|^2 + (mc/hbar)^2)``: Dirac frequency divided by c."""
    return np.sqrt(ksq + model.compton_wavenumber ** 2)


def omega(model: DispersionModel, k) -> float | np.ndarray:
    """Angular frequency; ``k`` has shape ``(d,)`` or ``(..., d)``."""
    k = np.asarray(k, dtype=float)
    ksq = np.sum(k * k, axis=-1)
    if model.kind is Kind.SCHRODINGER:
        return model.hbar * ksq / (2.0 * model.mass)
    return model.sign * model.c * _dirac_energy(model, ksq)


def _require_direction(model: DispersionModel, k: np.ndarray) -> None:
    if model.kind is Kind.DIRAC and model.mass == 0 and not np.any(k):
        raise DegenerateInput("massless Dirac dispersion has no derivative at k = 0")


def group_velocity(model: DispersionModel, k) -> np.ndarray:
    k = as_wavevector(k)
    _require_direction(model, k)
    if model.kind is Kind.SCHRODINGER:
        return (model.hbar / model.mass) * k
    return model.sign * model.c * k / _dirac_energy(model, k @ k)


def hessian(model: DispersionModel, k) -> np.ndarray:
    """Second-derivative matrix of ``omega`` at ``k`` (shape ``(d, d)``)."""
    k = as_wavevector(k)
    _require_direction(model, k)
    d = k.size
    if model.kind is Kind.SCHRODINGER:
        return (model.hbar / model.mass) * np.eye(d)
    energy = _dirac_energy(model, k @ k)
    return model.sign * model.c * (np.eye(d) / energy - np.outer(k, k) / energy ** 3)


def hessian_eigenvalues(model: DispersionModel, k) -> tuple[float, float]:
    """Return ``(lambda_1, lambda_23)``.

    ``lambda_1`` belongs to the direction of ``k`` and ``lambda_23`` to the
    two transverse directions (multiplicity two in 3D). In fewer dimensions
    only the eigenvalues of the represented directions occur in ``hessian``.
    """
    k = as_wavevector(k)
    _require_direction(model, k)
    if model.kind is Kind.SCHRODINGER:
        lam = model.hbar / model.mass
        return lam, lam
    energy = _dirac_energy(model, k @ k)
    transverse = model.sign * model.c / energy
    longitudinal = transverse * model.compton_wavenumber ** 2 / energy ** 2
    return float(longitudinal), float(transverse)


def phase_velocity_term(model: DispersionModel, k0) -> float:
    """``v_p(k0) . k0``, i.e. ``omega(k0)``: the frequency of the carrier phase."""
    return float(omega(model, as_wavevector(k0)))


def third_derivative(model: DispersionModel, k, step: float | None = None) -> np.ndarray:
    """Third-derivative tensor ``d^3 omega / dk_i dk_j dk_l`` by central differences of the Hessian.

    Exactly zero for the Schrodinger model. Used only to bound the error of
    the second-order Taylor expansion.
    """
    k = as_wavevector(k)
    d = k.size
    if model.kind is Kind.SCHRODINGER:
        return np.zeros((d, d, d))
    scale = max(float(np.linalg.norm(k)), model.compton_wavenumber, 1e-12)
    h = step if step is not None else 1e-4 * scale
    out = np.empty((d, d, d))
    for axis in range(d):
        e = np.zeros(d)
        e[axis] = h
        out[:, :, axis] = (hessian(model, k + e) - hessian(model, k - e)) / (2 * h)
    return out
