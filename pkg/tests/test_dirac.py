import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qdisp import dirac
from qdisp.errors import OffShell


def random_inputs(rng, n):
    for _ in range(n):
        yield (rng.normal(scale=3, size=3), rng.uniform(0.05, 4), rng.uniform(0.5, 2),
               rng.uniform(0.5, 2))


class TestPauli:
    def test_anticommutation(self):
        s = dirac.SIGMA
        for i, j in itertools.product(range(3), repeat=2):
            assert np.array_equal(s[i] @ s[j] + s[j] @ s[i], 2 * (i == j) * np.eye(2))

    def test_sigma_dot_squared(self, rng):
        for _ in range(100):
            k = rng.normal(size=3)
            sk = dirac.sigma_dot(k)
            assert_allclose(sk, sk.conj().T, atol=0)
            assert abs(np.trace(sk)) == 0
            assert_allclose(sk @ sk, (k @ k) * np.eye(2), atol=1e-14 * max(1, k @ k))


class TestDiracMatrix:
    def test_rest_frame_block_antidiagonal(self):
        m = dirac.dirac_matrix([0, 0, 0], 1.0)
        assert_allclose(m, dirac.GAMMA0)

    def test_massless_diagonal_blocks(self):
        m = dirac.dirac_matrix([0, 0, 1], 0.0)
        s3 = dirac.SIGMA[2]
        assert_allclose(m, np.block([[s3, np.zeros((2, 2))], [np.zeros((2, 2)), -s3]]))

    def test_determinant_example(self):
        assert_allclose(np.linalg.det(dirac.dirac_matrix([1, 0, 0], 1.0)).real, 4.0, rtol=1e-14)

    def test_hermitian(self, rng):
        for k, m, hbar, c in random_inputs(rng, 50):
            mat = dirac.dirac_matrix(k, m, hbar, c)
            assert_allclose(mat, mat.conj().T, atol=0)

    def test_determinant_formula(self, rng):
        for k, m, hbar, c in random_inputs(rng, 1000):
            det = np.linalg.det(dirac.dirac_matrix(k, m, hbar, c))
            ref = dirac.determinant_formula(k, m, hbar, c)
            assert_allclose(det.real, ref, rtol=1e-10)
            assert abs(det.imag) <= 1e-10 * ref

    def test_eigenvalues_doubly_degenerate(self, rng):
        for k, m, hbar, c in random_inputs(rng, 1000):
            w = dirac.on_shell_omega(k, m, hbar, c)
            eig = np.linalg.eigvalsh(dirac.dirac_matrix(k, m, hbar, c))
            assert_allclose(eig, [-w, -w, w, w], rtol=1e-12, atol=1e-12 * w)

    def test_adjoint_matrix_same_spectrum(self, rng):
        for k, m, hbar, c in random_inputs(rng, 50):
            w = dirac.on_shell_omega(k, m, hbar, c)
            eig = np.linalg.eigvalsh(dirac.adjoint_dirac_matrix(k, m, hbar, c))
            assert_allclose(eig, [-w, -w, w, w], rtol=1e-12, atol=1e-12 * w)

    def test_adjoint_matrix_is_mass_reflection(self, rng):
        # reversing the mass blocks equals conjugation by diag(1, 1, -1, -1)
        flip = np.diag([1.0, 1.0, -1.0, -1.0])
        for k, m, hbar, c in random_inputs(rng, 50):
            assert_allclose(flip @ dirac.dirac_matrix(k, m, hbar, c) @ flip,
                            dirac.adjoint_dirac_matrix(k, m, hbar, c), atol=0)


class TestChiSpinors:
    def test_rest_frame(self):
        w = 1.7
        r_up, _, l_up, _ = dirac.chi_spinors([0, 0, 0], w, m=w)
        assert_allclose(r_up, np.sqrt(w) * np.array([1, 0]), atol=1e-15)
        assert_allclose(l_up, r_up, atol=1e-15)

    def test_along_z(self):
        kappa, m = 0.8, 1.1
        w = dirac.on_shell_omega([0, 0, kappa], m)
        r_up, _, l_up, _ = dirac.chi_spinors([0, 0, kappa], w, m=m)
        assert_allclose(r_up, np.sqrt(w + kappa) * np.array([1, 0]), atol=1e-14)
        assert_allclose(l_up, np.sqrt(w - kappa) * np.array([1, 0]), atol=1e-14)

    def test_square_root_squares_back(self, rng):
        for k, m, hbar, c in random_inputs(rng, 50):
            w = dirac.on_shell_omega(k, m, hbar, c)
            a = w * dirac.I2 + c * dirac.sigma_dot(k)
            root = dirac.hermitian_sqrt(a, w)
            assert_allclose(root @ root, a, atol=1e-12 * w)

    def test_off_shell_raises(self):
        with pytest.raises(OffShell):
            dirac.chi_spinors([0, 0, 2.0], omega=1.0, m=0.5)

    def test_massless_on_shell_clamps(self):
        # omega = |k| makes omega - sigma.k singular; rounding must not raise
        k = np.array([0.3, -0.4, 1.2])
        w = dirac.on_shell_omega(k, 0.0)
        r_up, r_down, l_up, l_down = dirac.chi_spinors(k, w, m=0.0)
        assert np.all(np.isfinite([r_up, r_down, l_up, l_down]))


class TestSolutions:
    def test_frequency(self):
        *_, wp, wm = dirac.dirac_solutions([1, 0, 0], 1.0)
        assert_allclose(wp, np.sqrt(2), rtol=1e-15)
        assert wm == -wp

    def test_unnormalized_norm(self, rng):
        for k, m, hbar, c in random_inputs(rng, 50):
            sols = dirac.dirac_solutions(k, m, hbar, c)
            w = sols[4]
            for s in sols[:4]:
                assert_allclose(np.vdot(s, s).real, 2 * w, rtol=1e-12)

    def test_gram_identity(self, rng):
        for k, m, hbar, c in random_inputs(rng, 1000):
            assert_allclose(dirac.gram_matrix(k, m, hbar, c), np.eye(4), atol=1e-10)

    def test_eigen_residuals(self, rng):
        for k, m, hbar, c in random_inputs(rng, 1000):
            w = dirac.on_shell_omega(k, m, hbar, c)
            assert np.all(dirac.eigen_residuals(k, m, hbar, c) < 1e-10 * max(1.0, w))


class TestAntiparticle:
    def test_rest_frame(self):
        up, _ = dirac.antiparticle_spinor([0, 0, 0], 1.0)
        r_up, _, l_up, _ = dirac.chi_spinors([0, 0, 0], m=1.0)
        assert_allclose(up, np.concatenate([l_up, -r_up]))
        assert_allclose(l_up, r_up)

    def test_norm_matches_reversed_negative_solution(self, rng):
        for k, m, hbar, c in random_inputs(rng, 100):
            up, down = dirac.antiparticle_spinor(k, m, hbar, c)
            _, _, nu_up, nu_down, _, _ = dirac.dirac_solutions(-k, m, hbar, c)
            assert_allclose(np.linalg.norm(up), np.linalg.norm(nu_up), rtol=1e-12)
            assert_allclose(np.linalg.norm(down), np.linalg.norm(nu_down), rtol=1e-12)

    def test_phase_evolution_keeps_modulus(self):
        up, _ = dirac.antiparticle_spinor([0.4, 1.0, -0.2], 0.9)
        w = dirac.on_shell_omega([0.4, 1.0, -0.2], 0.9)
        for t in (0.0, 0.3, 7.1, 100.0):
            assert_allclose(np.abs(dirac.evolve_spinor(up, w, t)), np.abs(up), rtol=1e-14)
