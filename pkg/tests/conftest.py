import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_spd(rng, d, scale=1.0):
    a = rng.normal(size=(d, d))
    return scale * (a @ a.T + 0.5 * np.eye(d))


def random_symmetric(rng, d):
    a = rng.normal(size=(d, d))
    return 0.5 * (a + a.T)


def band_limited_field(rng, spec, fraction=0.5):
    """Random field with spectrum confined to ``fraction`` of the Nyquist band, unit mass."""
    from qdisp.grid import GridField

    kk = spec.wavenumbers()
    inside = np.all(np.abs(kk) < fraction * np.asarray(spec.nyquist), axis=-1)
    spectrum = (rng.normal(size=spec.shape) + 1j * rng.normal(size=spec.shape)) * inside
    return GridField(spec, np.fft.ifftn(spectrum)).normalized()
