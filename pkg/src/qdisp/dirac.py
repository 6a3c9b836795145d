"""Momentum-space eigensystem of the free Dirac equation in the Weyl basis.

All bi-spinors are complex arrays of shape ``(4,)`` ordered as
``(left-handed pair, right-handed pair)``. Wave vectors of dimension
``d < 3`` are padded with zeros to three components.
"""
from __future__ import annotations

import numpy as np

from .errors import OffShell

SIGMA = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

I2 = np.eye(2, dtype=complex)
ZERO2 = np.zeros((2, 2), dtype=complex)

GAMMA0 = np.block([[ZERO2, I2], [I2, ZERO2]])
GAMMA = np.array([np.block([[ZERO2, s], [-s, ZERO2]]) for s in SIGMA])

XI_UP = np.array([1, 0], dtype=complex)
XI_DOWN = np.array([0, 1], dtype=complex)

# Negative eigenvalues above this (relative to the spectral scale) are rounding noise.
SQRT_CLAMP = 1e-12


def pad3(k) -> np.ndarray:
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if k.size > 3:
        raise ValueError("wave vector has more than three components")
    return np.concatenate([k, np.zeros(3 - k.size)])


def sigma_dot(k) -> np.ndarray:
    """The Hermitian, traceless 2x2 matrix ``sigma . k``."""
    return np.tensordot(pad3(k), SIGMA, axes=1)


def on_shell_omega(k, m: float, hbar: float = 1.0, c: float = 1.0) -> float:
    """Positive-energy frequency ``c sqrt(|k|^2 + m^2 c^2 / hbar^2)``."""
    k = pad3(k)
    return float(c * np.sqrt(k @ k + (m * c / hbar) ** 2))


def dirac_matrix(k, m: float, hbar: float = 1.0, c: float = 1.0) -> np.ndarray:
    """4x4 block matrix whose eigenvectors are ``gamma0 @ Phi``.

    ``[[c sigma.k, (m/hbar) c^2 I], [(m/hbar) c^2 I, -c sigma.k]]``
    """
    sk = c * sigma_dot(k)
    mass_term = (m / hbar) * c ** 2 * I2
    return np.block([[sk, mass_term], [mass_term, -sk]])


def adjoint_dirac_matrix(k, m: float, hbar: float = 1.0, c: float = 1.0) -> np.ndarray:
    """Matrix acting from the right on the adjoint row spinor (mass terms flip sign)."""
    sk = c * sigma_dot(k)
    mass_term = (m / hbar) * c ** 2 * I2
    return np.block([[sk, -mass_term], [-mass_term, -sk]])


def hermitian_sqrt(a: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix via eigendecomposition.

    Eigenvalues in ``[-SQRT_CLAMP * scale, 0)`` are clamped to zero; anything
    more negative raises :class:`OffShell`.
    """
    w, v = np.linalg.eigh(a)
    tol = SQRT_CLAMP * max(scale, 1.0)
    if np.any(w < -tol):
        raise OffShell(f"matrix under square root has eigenvalue {w.min():.3e}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def chi_spinors(k, omega: float | None = None, m: float = 1.0, hbar: float = 1.0,
                c: float = 1.0):
    """Two-component spinors ``(chi+R, chi-R, chi+L, chi-L)``.

    ``chiR = sqrt(omega + c sigma.k) xi`` and ``chiL = sqrt(omega - c sigma.k) xi``
    with ``xi`` spin up (+) or spin down (-). ``omega`` defaults to the
    positive on-shell frequency.
    """
    if omega is None:
        omega = on_shell_omega(k, m, hbar, c)
    sk = c * sigma_dot(k)
    scale = abs(omega) + float(np.linalg.norm(sk, 2))
    root_r = hermitian_sqrt(omega * I2 + sk, scale)
    root_l = hermitian_sqrt(omega * I2 - sk, scale)
    return root_r @ XI_UP, root_r @ XI_DOWN, root_l @ XI_UP, root_l @ XI_DOWN


def dirac_solutions(k, m: float, hbar: float = 1.0, c: float = 1.0):
    """Return ``(mu+, mu-, nu+, nu-, omega_plus, omega_minus)``.

    ``mu = (chiL, chiR)`` solve the positive branch and ``nu = i (chiR, -chiL)``
    the negative one; in both cases ``gamma0 @ spinor`` is the eigenvector of
    :func:`dirac_matrix`. Spinors are left unnormalized (squared norm
    ``2 omega_plus``).
    """
    w = on_shell_omega(k, m, hbar, c)
    r_up, r_down, l_up, l_down = chi_spinors(k, w, m, hbar, c)
    mu_up = np.concatenate([l_up, r_up])
    mu_down = np.concatenate([l_down, r_down])
    nu_up = 1j * np.concatenate([r_up, -l_up])
    nu_down = 1j * np.concatenate([r_down, -l_down])
    return mu_up, mu_down, nu_up, nu_down, w, -w


def antiparticle_spinor(k, m: float, hbar: float = 1.0, c: float = 1.0):
    """Antiparticle bi-spinors ``nu_A = (chiL(k), -chiR(k))`` for spin up and down."""
    r_up, r_down, l_up, l_down = chi_spinors(k, None, m, hbar, c)
    return np.concatenate([l_up, -r_up]), np.concatenate([l_down, -r_down])


def evolve_spinor(spinor: np.ndarray, omega: float, t: float) -> np.ndarray:
    """Attach the time dependence ``exp(-i omega t)``."""
    return spinor * np.exp(-1j * omega * t)


def solution_matrix(k, m: float, hbar: float = 1.0, c: float = 1.0) -> np.ndarray:
    """Columns: normalized ``mu+, mu-, nu+, nu-``."""
    mu_up, mu_down, nu_up, nu_down, _, _ = dirac_solutions(k, m, hbar, c)
    cols = np.stack([mu_up, mu_down, nu_up, nu_down], axis=1)
    return cols / np.linalg.norm(cols, axis=0)


def gram_matrix(k, m: float, hbar: float = 1.0, c: float = 1.0) -> np.ndarray:
    s = solution_matrix(k, m, hbar, c)
    return s.conj().T @ s


def eigen_residuals(k, m: float, hbar: float = 1.0, c: float = 1.0) -> np.ndarray:
    """``|M (gamma0 v) - omega (gamma0 v)|`` for the four normalized solutions."""
    mat = dirac_matrix(k, m, hbar, c)
    w = on_shell_omega(k, m, hbar, c)
    s = GAMMA0 @ solution_matrix(k, m, hbar, c)
    omegas = np.array([w, w, -w, -w])
    return np.linalg.norm(mat @ s - s * omegas, axis=0)


def determinant_formula(k, m: float, hbar: float = 1.0, c: float = 1.0) -> float:
    """Closed form ``((m c^2 / hbar)^2 + c^2 |k|^2)^2`` of ``det(dirac_matrix)``."""
    k = pad3(k)
    return float(((m * c ** 2 / hbar) ** 2 + c ** 2 * (k @ k)) ** 2)
