import numpy as np

from toroidal_psido.fourier_core import CoeffVector, inverse_transform


def random_band_limited(rng, N, M, decay=0.0):
    """Random coefficient vector on |k| <= N and its samples on the M-grid."""
    ks = np.arange(-N, N + 1)
    c = (rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1)) / (1.0 + np.abs(ks)) ** decay
    return CoeffVector(c), inverse_transform(CoeffVector(c), M)


def bracket(k):
    return np.sqrt(1.0 + np.asarray(k, dtype=float) ** 2)
