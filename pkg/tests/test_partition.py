import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from conftest import band_limited_field
from qdisp.dispersion import DispersionModel
from qdisp.errors import ConfigError, NormalizationFailure, TooFewSamples
from qdisp.gaussian import CoherentPacket, evolve_packet
from qdisp.grid import EntropyTrajectory, GridField, GridSpec, numerical_entropy
from qdisp.partition import (PartitionClass, StationaryPair, classify, interval_signs,
                             stationary_density_check, superposition_trajectory)

SCHRODINGER = DispersionModel.schrodinger(1.0)


def traj(values, tol=1e-8):
    return EntropyTrajectory(np.arange(len(values), dtype=float), values, tol)


class TestClassify:
    def test_constant(self):
        assert classify(traj([1.0, 1.0, 1.0])) is PartitionClass.C

    def test_increasing(self):
        assert classify(traj([1.0, 2.0, 3.0])) is PartitionClass.M

    def test_decreasing(self):
        assert classify(traj([3.0, 2.0, 1.0])) is PartitionClass.W

    def test_rise_then_fall(self):
        assert classify(traj([1.0, 2.0, 1.5])) is PartitionClass.I

    def test_plateaus_allowed(self):
        assert classify(traj([1.0, 1.0, 2.0, 2.0])) is PartitionClass.M

    def test_tolerance(self):
        noisy = [1.0, 1.0 + 4e-5, 1.0 - 4e-5, 1.0]
        assert classify(traj(noisy, 1e-4)) is PartitionClass.C
        assert classify(traj(noisy, 1e-8)) is PartitionClass.I

    def test_too_few(self):
        with pytest.raises(TooFewSamples):
            classify(traj([1.0, 2.0]))

    def test_signs(self):
        assert list(interval_signs(traj([0.0, 1.0, 1.0, 0.5]))) == [1, 0, -1]


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=3, max_size=30))
def test_reversal_swaps_increasing_and_decreasing(values):
    t = traj(values, 1e-6)
    swap = {PartitionClass.M: PartitionClass.W, PartitionClass.W: PartitionClass.M,
            PartitionClass.C: PartitionClass.C, PartitionClass.I: PartitionClass.I}
    assert classify(t.reversed()) is swap[classify(t)]


class TestStationaryDensity:
    spec = GridSpec.from_bounds(-20, 20, 256)

    def mode(self, index):
        x = self.spec.axes()[0]
        k = self.spec.wavenumber_axes()[0][index]
        return np.exp(1j * k * x)

    def test_single_mode(self):
        f = GridField(self.spec, self.mode(9)).normalized()
        assert stationary_density_check(f, SCHRODINGER, [0.5, 3.0, 17.0])

    def test_two_modes_beat(self):
        f = GridField(self.spec, self.mode(3) + self.mode(9)).normalized()
        assert not stationary_density_check(f, SCHRODINGER, [0.5, 3.0, 17.0])

    def test_coherent_packet_moves(self):
        p = CoherentPacket.isotropic(1.0, 0.0, 1.0)
        f = evolve_packet(p, SCHRODINGER, 0.0).sample(self.spec)
        assert not stationary_density_check(f, SCHRODINGER, [1.0])

    def test_set_c_fields(self, rng):
        # A(r) exp(i f(r, t)) with time-independent A: density and entropy constant
        a = np.abs(band_limited_field(rng, self.spec).amplitude)
        x = self.spec.axes()[0]
        entropies = []
        for t in np.linspace(0, 5, 11):
            phase = np.sin(x * t) + t ** 2 * x
            entropies.append(numerical_entropy(GridField(self.spec, a * np.exp(1j * phase))))
        assert classify(EntropyTrajectory(np.linspace(0, 5, 11), entropies, 1e-12)) is PartitionClass.C


class TestSuperposition:
    def test_oscillator_pair_oscillates(self):
        pair = StationaryPair.harmonic_oscillator()
        assert pair.delta_omega == -1.0
        assert classify(superposition_trajectory(pair, 4.0, 81)) is PartitionClass.I

    def test_single_state_constant(self):
        pair = StationaryPair.harmonic_oscillator(second=False)
        assert classify(superposition_trajectory(pair, 4.0, 81)) is PartitionClass.C

    def test_periodic(self):
        pair = StationaryPair.harmonic_oscillator()
        period = 2 * np.pi
        times_a = superposition_trajectory(pair, 3.0, 31)
        shifted = [numerical_entropy(pair.field(t + period)) for t in times_a.times]
        assert np.max(np.abs(np.array(shifted) - times_a.entropies)) < 1e-9

    def test_interference_density(self):
        pair = StationaryPair.harmonic_oscillator(mix=(0.6, 0.8))
        t = 1.1
        a1, a2 = pair.a1, pair.a2
        ref = (0.36 * a1 ** 2 + 0.64 * a2 ** 2 + 2 * 0.48 * a1 * a2 * np.cos(pair.delta_omega * t))
        ref /= ref.sum() * pair.spec.cell_volume
        assert_allclose(pair.field(t).density, ref, atol=1e-14)

    def test_non_orthogonal_pair_fails(self):
        spec = GridSpec.from_bounds(-10, 10, 256)
        x = spec.axes()[0]
        g = np.exp(-x ** 2)
        pair = StationaryPair(spec, g, np.exp(-(x - 0.5) ** 2), 0.0, 0.0, 1.0, 2.0)
        with pytest.raises(NormalizationFailure):
            superposition_trajectory(pair, 4.0, 21)

    def test_equal_frequencies_rejected(self):
        spec = GridSpec.from_bounds(-10, 10, 64)
        with pytest.raises(ConfigError):
            StationaryPair(spec, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0)

    def test_vanishing_pair(self):
        spec = GridSpec.from_bounds(-10, 10, 64)
        pair = StationaryPair(spec, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0)
        with pytest.raises(NormalizationFailure):
            superposition_trajectory(pair, 1.0, 5)
