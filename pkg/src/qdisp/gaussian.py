"""Analytic evolution of Gaussian coherent packets.

A packet with center ``r0``, covariance ``Sigma`` and carrier wave vector
``k0`` has amplitude::

    psi(r, 0) = N0 exp(-1/2 (r - r0)^T Sigma^-1 (r - r0) + i k0 . r),
    N0 = (pi^d det Sigma)^(-1/4)

so its position density is normal with covariance ``Sigma / 2``. Expanding
``omega`` to second order about ``k0`` makes the free evolution a Gaussian
again: the center moves with the group velocity ``v`` and the covariance
becomes the complex symmetric matrix ``Sigma + i t H`` with ``H`` the
dispersion Hessian at ``k0``::

    psi(r, t) = exp(i (k0 . r - omega0 t)) N0 sqrt(det Sigma / det(Sigma + i t H))
                * exp(-1/2 y^T (Sigma + i t H)^-1 y),   y = r - r0 - v t

The position density is then normal with covariance ``Sigma(t) / 2`` where
``Sigma(t) = Sigma + t^2 H Sigma^-1 H``. For the Schrodinger model the
expansion is exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dispersion import (DispersionModel, as_wavevector, group_velocity, hessian, omega,
                         third_derivative)
from .errors import ConfigError, GridTooCoarse, SingularMatrix
from .grid import EntropyTrajectory, GridField, GridSpec

# Reciprocal condition number below which Sigma counts as singular.
RCOND_LIMIT = 1e-13
# Standard deviations of momentum spread that must fit inside the Nyquist band.
BANDWIDTH_SIGMAS = 5.0
# Largest acceptable third-order phase error of the quadratic expansion.
TAYLOR_PHASE_BOUND = 0.1


def _as_matrix(a, d: int | None = None) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1) if d is None else a * np.eye(d)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError(f"expected a square matrix, got shape {a.shape}")
    if d is not None and a.shape[0] != d:
        raise ConfigError(f"expected a {d}x{d} matrix, got shape {a.shape}")
    return a


def _check_invertible(sigma: np.ndarray) -> None:
    if 1.0 / np.linalg.cond(sigma) < RCOND_LIMIT:
        raise SingularMatrix("covariance is not invertible to working precision")


@dataclass(frozen=True, eq=False)
class CoherentPacket:
    """Gaussian packet ``(r0, Sigma, k0)``; ``Sigma`` is the amplitude covariance."""

    r0: np.ndarray
    sigma: np.ndarray
    k0: np.ndarray

    def __post_init__(self):
        r0 = as_wavevector(self.r0)
        d = r0.size
        k0 = as_wavevector(np.broadcast_to(np.asarray(self.k0, dtype=float), (d,)))
        sigma = _as_matrix(self.sigma, d)
        if not np.allclose(sigma, sigma.T, rtol=1e-12, atol=0):
            raise ConfigError("Sigma must be symmetric")
        sigma = 0.5 * (sigma + sigma.T)
        try:
            np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError:
            raise ConfigError("Sigma must be positive definite") from None
        for a in (r0, k0, sigma):
            a.setflags(write=False)
        object.__setattr__(self, "r0", r0)
        object.__setattr__(self, "k0", k0)
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def isotropic(cls, width: float, r0=0.0, k0=0.0, d: int = 1) -> "CoherentPacket":
        """Packet with ``Sigma = width^2 I``; the density standard deviation is ``width / sqrt(2)``."""
        if not width > 0:
            raise ConfigError(f"packet width must be positive, got {width}")
        r0 = np.broadcast_to(np.asarray(r0, dtype=float), (d,))
        return cls(r0, width ** 2 * np.eye(d), k0)

    @property
    def d(self) -> int:
        return self.r0.size

    @property
    def norm_factor(self) -> float:
        return float((np.pi ** self.d * np.linalg.det(self.sigma)) ** -0.25)

    def momentum_spread(self) -> np.ndarray:
        """Standard deviation of ``|phi(k)|^2`` per axis (covariance ``(2 Sigma)^-1``)."""
        return np.sqrt(np.diag(np.linalg.inv(2.0 * self.sigma)))


def sigma_t(sigma, h, t: float) -> np.ndarray:
    """``Sigma + t^2 H Sigma^-1 H``: twice the position covariance at time ``t``."""
    sigma = _as_matrix(sigma)
    h = _as_matrix(h, sigma.shape[0])
    _check_invertible(sigma)
    out = sigma + t * t * (h @ np.linalg.solve(sigma, h))
    return 0.5 * (out + out.T)


def sigma_t_from_complex(sigma, h, t: float) -> np.ndarray:
    """``2 [(Sigma + i t H)^-1 + (Sigma - i t H)^-1]^-1`` by direct complex inversion."""
    sigma = _as_matrix(sigma)
    h = _as_matrix(h, sigma.shape[0])
    _check_invertible(sigma)
    plus = np.linalg.inv(sigma + 1j * t * h)
    minus = np.linalg.inv(sigma - 1j * t * h)
    return (2.0 * np.linalg.inv(plus + minus)).real


def _spreading_factors(sigma: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Eigenvalues of ``Sigma^-1 H`` via the symmetric form ``L^-1 H L^-T``."""
    chol = np.linalg.cholesky(sigma)
    w = np.linalg.solve(chol, np.linalg.solve(chol, h).T)
    return np.linalg.eigvalsh(0.5 * (w + w.T))


@dataclass(frozen=True, eq=False)
class EvolvedGaussian:
    """Analytic state of ``base`` after time ``t`` under a quadratic dispersion.

    ``model`` is ``None`` when the velocity and Hessian were given directly.
    """

    base: CoherentPacket
    model: DispersionModel | None
    t: float
    center: np.ndarray
    velocity: np.ndarray
    hessian: np.ndarray
    omega0: float
    complex_cov: np.ndarray = field(repr=False)
    density_cov: np.ndarray = field(repr=False)

    @property
    def d(self) -> int:
        return self.base.d

    def prefactor(self) -> complex:
        """``N0 prod_j (1 + i t lambda_j)^(-1/2)``, continuous in ``t``."""
        lam = _spreading_factors(self.base.sigma, self.hessian)
        return complex(self.base.norm_factor * np.prod((1.0 + 1j * self.t * lam) ** -0.5))

    def _displacements(self, points) -> tuple[np.ndarray, np.ndarray]:
        pts = np.asarray(points, dtype=float)
        if self.d == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
            pts = pts[..., None]
        if pts.shape[-1] != self.d:
            raise ConfigError(f"points must have trailing dimension {self.d}")
        return pts - self.center, pts

    def amplitude(self, points) -> np.ndarray:
        """Complex amplitude at ``points`` of shape ``(..., d)`` (or ``(n,)`` in 1D)."""
        y, pts = self._displacements(points)
        inv = np.linalg.inv(self.complex_cov)
        quad = np.einsum("...i,ij,...j->...", y, inv, y)
        phase = pts @ self.base.k0 - self.omega0 * self.t
        return self.prefactor() * np.exp(-0.5 * quad + 1j * phase)

    def density(self, points) -> np.ndarray:
        """Normal density with mean ``center`` and covariance ``density_cov``."""
        y, _ = self._displacements(points)
        inv = np.linalg.inv(self.density_cov)
        quad = np.einsum("...i,ij,...j->...", y, inv, y)
        norm = np.sqrt((2 * np.pi) ** self.d * np.linalg.det(self.density_cov))
        return np.exp(-0.5 * quad) / norm

    def sample(self, spec: GridSpec) -> GridField:
        if spec.d != self.d:
            raise ConfigError(f"grid dimension {spec.d} does not match packet dimension {self.d}")
        return GridField(spec, self.amplitude(spec.points()))


def propagate_gaussian(p: CoherentPacket, t: float, velocity, hessian_matrix,
                       omega0: float = 0.0, model: DispersionModel | None = None) -> EvolvedGaussian:
    """Evolve ``p`` by ``t`` under ``omega0 + v . q + 1/2 q^T H q`` with ``q = k - k0``."""
    t = float(t)
    vel = np.broadcast_to(np.asarray(velocity, dtype=float), (p.d,)).copy()
    h = _as_matrix(hessian_matrix, p.d).copy()
    cov = p.sigma + 1j * t * h
    dens = 0.5 * sigma_t(p.sigma, h, t)
    for a in (vel, h, cov, dens):
        a.setflags(write=False)
    return EvolvedGaussian(p, model, t, p.r0 + vel * t, vel, h, float(omega0), cov, dens)


def evolve_packet(p: CoherentPacket, model: DispersionModel, t: float) -> EvolvedGaussian:
    """Evolve ``p`` by ``t`` (negative ``t`` runs backwards)."""
    return propagate_gaussian(p, t, group_velocity(model, p.k0), hessian(model, p.k0),
                              omega(model, p.k0), model)


def gaussian_entropy(g: EvolvedGaussian | np.ndarray) -> float:
    """Differential entropy ``d/2 (1 + ln 2 pi) + 1/2 ln det(density_cov)`` in nats."""
    cov = g.density_cov if isinstance(g, EvolvedGaussian) else _as_matrix(g)
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0:
        raise SingularMatrix("density covariance is not positive definite")
    d = cov.shape[0]
    return 0.5 * d * (1.0 + np.log(2 * np.pi)) + 0.5 * logdet


def entropy_trajectory(p: CoherentPacket, model: DispersionModel, times,
                       tolerance: float = 1e-8) -> EntropyTrajectory:
    times = np.asarray(times, dtype=float)
    entropies = [gaussian_entropy(evolve_packet(p, model, t)) for t in times]
    return EntropyTrajectory(times, entropies, tolerance)


def check_bandwidth(p: CoherentPacket, spec: GridSpec) -> None:
    """Raise :class:`GridTooCoarse` unless the momentum distribution sits well inside the Nyquist band."""
    reach = np.abs(p.k0) + BANDWIDTH_SIGMAS * p.momentum_spread()
    limit = 0.9 * spec.nyquist
    if np.any(reach > limit):
        raise GridTooCoarse(
            f"packet spectrum reaches |k| = {reach.max():.4g}, grid resolves {limit.min():.4g}")


def backward_prepared_packet(p: CoherentPacket, model: DispersionModel, tau: float,
                             spec: GridSpec) -> GridField:
    """Sample the state centered at ``p.r0`` with complex covariance ``Sigma - i tau H``.

    Forward evolution for ``tau`` focuses it into the real-covariance packet
    (centered at ``r0 + v tau``), so its entropy decreases on ``[0, tau]``.
    """
    if not tau > 0:
        raise ConfigError(f"tau must be positive, got {tau}")
    if spec.d != p.d:
        raise ConfigError(f"grid dimension {spec.d} does not match packet dimension {p.d}")
    check_bandwidth(p, spec)
    vel = group_velocity(model, p.k0)
    focus = CoherentPacket(p.r0 + vel * tau, p.sigma, p.k0)
    return evolve_packet(focus, model, -tau).sample(spec)


def taylor_phase_error(p: CoherentPacket, model: DispersionModel, t: float) -> float:
    """First-order bound on the relative amplitude error of the quadratic expansion.

    The neglected cubic phase is at most ``|t| / 6 * sum|T_ijl| * |q|^3`` with
    ``T`` the third-derivative tensor of ``omega`` at ``k0``. Averaging ``|q|^3``
    over the amplitude spectrum ``exp(-q^T Sigma q / 2)`` (spread
    ``s = lambda_min(Sigma)^(-1/2)``) gives ``2 sqrt(2/pi) s^3``. Zero for the
    Schrodinger model.
    """
    tensor = third_derivative(model, p.k0)
    spread = float(np.linalg.eigvalsh(p.sigma)[0]) ** -0.5
    return abs(t) / 6.0 * float(np.sum(np.abs(tensor))) * 2.0 * np.sqrt(2.0 / np.pi) * spread ** 3


def taylor_is_accurate(p: CoherentPacket, model: DispersionModel, t: float) -> bool:
    return taylor_phase_error(p, model, t) < TAYLOR_PHASE_BOUND
