import numpy as np
import pytest

from retroq import linalg


@pytest.fixture
def gen():
    return np.random.default_rng(20_250_817)


def random_hermitian(gen, d, scale=1.0):
    a = gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d))
    return scale * (a + a.conj().T) / 2


def random_psd(gen, d, rank=None):
    rank = d if rank is None else rank
    g = (gen.standard_normal((d, rank)) + 1j * gen.standard_normal((d, rank))) / np.sqrt(2)
    return g @ g.conj().T


def random_unitary(gen, d):
    q, r = np.linalg.qr(gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def maxabs(a):
    return float(np.abs(a).max())


def assert_close(a, b, tol, msg=""):
    err = maxabs(np.asarray(a) - np.asarray(b))
    assert err <= tol, f"{msg} max abs error {err:.3e} > {tol:.3e}"


def dense_cq(state):
    """Materialize a CqState as its full block-diagonal matrix (test oracle only)."""
    d = state.dim
    k = len(state.blocks)
    out = np.zeros((k * d, k * d), dtype=complex)
    for i, block in enumerate(state.blocks):
        out[i * d:(i + 1) * d, i * d:(i + 1) * d] = block
    return out
