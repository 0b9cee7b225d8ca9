"""Validated quantum state / measurement types and random ensembles.

Randomness is explicit: every sampler takes either an :class:`RngStream`
(a reproducible, counter-based stream identified by ``(master_seed,
stream_index)``) or a ``numpy.random.Generator`` for sequential draws.
There is no hidden global RNG, so per-trial results are independent of
scheduling and thread count.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateSuperpositionError, ValidationError
from .linalg import NEG_EIG_BAND, dag, require_hermitian

TRACE_TOL = 1e-10
COMPLETENESS_TOL = 1e-9
RANK_TOL = 1e-10

STATE_ENSEMBLES = ("hilbert-schmidt", "uniform-spectrum")


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream: same (master_seed, stream_index), same draws.

    Backed by the counter-based Philox generator, so streams with different
    indices are statistically independent and cheap to create per trial.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not (0 <= int(self.master_seed) < 2**64):
            raise ValidationError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed!r}")
        if int(self.stream_index) < 0:
            raise ValidationError(f"stream_index must be nonnegative, got {self.stream_index!r}")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        return self.child()

    def child(self, *keys: int) -> np.random.Generator:
        """Derived generator for a sub-task (e.g. one candidate of one instance)."""
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index, *keys))
        return np.random.Generator(np.random.Philox(seq))


def _as_generator(rng: RngStream | np.random.Generator) -> np.random.Generator:
    return rng.generator() if isinstance(rng, RngStream) else rng


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """PSD, unit-trace Hermitian operator."""

    mat: np.ndarray

    def __post_init__(self):
        m = require_hermitian(self.mat, "density matrix")
        w, v = np.linalg.eigh(m)
        if w.min() < -NEG_EIG_BAND:
            raise ValidationError(f"density matrix: negative eigenvalue {w.min()!r}")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"density matrix: trace {tr!r} != 1")
        object.__setattr__(self, "mat", _readonly(m))
        object.__setattr__(self, "_eig", (np.maximum(w, 0.0), v))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eig[0]

    @cached_property
    def sqrt(self) -> np.ndarray:
        w, v = self._eig
        s = (v * np.sqrt(w)) @ dag(v)
        return _readonly((s + dag(s)) / 2)

    @cached_property
    def rank(self) -> int:
        return int(np.count_nonzero(self.eigenvalues > RANK_TOL))

    @classmethod
    def pure(cls, vec: np.ndarray) -> "DensityMatrix":
        v = np.asarray(vec, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(v)
        if nrm < 1e-12:
            raise ValidationError("pure state: zero vector")
        v = v / nrm
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls(np.eye(d, dtype=complex) / d)


@dataclass(frozen=True, eq=False)
class Povm:
    """Ordered PSD operators summing to the identity; outcome labels 0..n-1."""

    elements: tuple

    def __post_init__(self):
        elems = tuple(require_hermitian(e, f"POVM element {i}") for i, e in enumerate(self.elements))
        if not elems:
            raise ValidationError("POVM: needs at least one element")
        d = elems[0].shape[0]
        eigs = []
        for i, e in enumerate(elems):
            if e.shape != (d, d):
                raise ValidationError(f"POVM element {i}: shape {e.shape} != ({d}, {d})")
            w, v = np.linalg.eigh(e)
            if w.min() < -NEG_EIG_BAND:
                raise ValidationError(f"POVM element {i}: negative eigenvalue {w.min()!r}")
            eigs.append((np.maximum(w, 0.0), v))
        defect = float(np.abs(sum(elems) - np.eye(d)).max())
        if defect > COMPLETENESS_TOL:
            raise ValidationError(f"POVM: completeness defect {defect:.3e} (max entrywise |sum - I|)")
        object.__setattr__(self, "elements", tuple(_readonly(e) for e in elems))
        object.__setattr__(self, "_eigs", tuple(eigs))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, x: int) -> np.ndarray:
        return self.elements[x]

    @cached_property
    def sqrts(self) -> tuple:
        out = []
        for w, v in self._eigs:
            s = (v * np.sqrt(w)) @ dag(v)
            out.append(_readonly((s + dag(s)) / 2))
        return tuple(out)

    @cached_property
    def is_rank_one(self) -> bool:
        """True when every element of non-negligible norm has rank one."""
        for w, _ in self._eigs:
            if w[-1] <= RANK_TOL:
                continue  # numerically zero element
            if w.size > 1 and w[-2] > RANK_TOL:
                return False
        return True

    def outcome_probabilities(self, gamma: DensityMatrix) -> np.ndarray:
        """Born probabilities Tr{M_x gamma}."""
        return np.array([float(np.einsum("ij,ji->", e, gamma.mat).real) for e in self.elements])


def ginibre(rng: RngStream | np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    """Matrix of i.i.d. standard complex Gaussian entries."""
    gen = _as_generator(rng)
    cols = rows if cols is None else cols
    return (gen.standard_normal((rows, cols)) + 1j * gen.standard_normal((rows, cols))) / np.sqrt(2)


def haar_unitary(d: int, rng: RngStream | np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with the R-diagonal phase fix."""
    q, r = np.linalg.qr(ginibre(rng, d))
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_density_matrix(
    d: int,
    rng: RngStream | np.random.Generator,
    ensemble: str = "hilbert-schmidt",
) -> DensityMatrix:
    """Random state from one of two unitarily invariant ensembles.

    ``hilbert-schmidt``: normalized Ginibre product G G^dag / Tr, the standard
    unstructured measure. ``uniform-spectrum``: eigenvalues are i.i.d.
    Uniform(0,1) normalized to sum 1, conjugated by a Haar unitary; this is
    the benchmark harness default.
    """
    if d < 1:
        raise ValidationError(f"dimension must be >= 1, got {d}")
    gen = _as_generator(rng)
    if ensemble == "hilbert-schmidt":
        g = ginibre(gen, d)
        rho = g @ dag(g)
        rho = rho / np.trace(rho).real
    elif ensemble == "uniform-spectrum":
        w = gen.random(d)
        w = w / w.sum()
        u = haar_unitary(d, gen)
        rho = (u * w) @ dag(u)
    else:
        raise ValidationError(f"unknown state ensemble {ensemble!r}; expected one of {STATE_ENSEMBLES}")
    return DensityMatrix(rho)


def random_pvm(d: int, rng: RngStream | np.random.Generator) -> Povm:
    """Haar-random rank-one PVM: projectors onto a Haar-random orthonormal basis."""
    if d < 1:
        raise ValidationError(f"dimension must be >= 1, got {d}")
    u = haar_unitary(d, rng)
    return Povm(tuple(np.outer(u[:, x], u[:, x].conj()) for x in range(d)))


def random_rank_one_povm(d: int, n: int, rng: RngStream | np.random.Generator) -> Povm:
    """Rank-one POVM from a Gram-normalized Ginibre frame.

    Draws n Ginibre vectors g_i, forms S = sum_i g_i g_i^dag and returns
    elements S^(-1/2) g_i g_i^dag S^(-1/2), which are rank-one and complete
    by construction.
    """
    if n < d:
        raise ValidationError(f"need n >= d outcomes, got n={n}, d={d}")
    gen = _as_generator(rng)
    for _ in range(8):
        g = ginibre(gen, d, n)
        s = g @ dag(g)
        w, v = np.linalg.eigh(s)
        if w.min() > 1e-12 * max(1.0, w.max()):
            s_isqrt = (v * (w**-0.5)) @ dag(v)
            vecs = s_isqrt @ g
            return Povm(tuple(np.outer(vecs[:, i], vecs[:, i].conj()) for i in range(n)))
    raise ValidationError("random_rank_one_povm: frame Gram matrix singular after 8 resamples")


def random_full_rank_povm(d: int, n: int, rng: RngStream | np.random.Generator) -> Povm:
    """POVM with generically full-rank elements (Gram-normalized Wishart blocks)."""
    if n < 1:
        raise ValidationError(f"need n >= 1 outcomes, got n={n}")
    gen = _as_generator(rng)
    blocks = []
    for _ in range(n):
        g = ginibre(gen, d)
        blocks.append(g @ dag(g))
    s = sum(blocks)
    w, v = np.linalg.eigh(s)
    s_isqrt = (v * (w**-0.5)) @ dag(v)
    return Povm(tuple(s_isqrt @ b @ s_isqrt for b in blocks))


def _is_prime(d: int) -> bool:
    if d < 2:
        return False
    k = 2
    while k * k <= d:
        if d % k == 0:
            return False
        k += 1
    return True


def fourier_basis(d: int) -> np.ndarray:
    """Columns f_k with entries exp(2 pi i j k / d) / sqrt(d)."""
    j = np.arange(d).reshape(-1, 1)
    k = np.arange(d).reshape(1, -1)
    return np.exp(2j * np.pi * j * k / d) / np.sqrt(d)


def mub_pair(d: int) -> tuple[Povm, Povm]:
    """Computational and Fourier bases: mutually unbiased PVMs in prime dimension."""
    if not _is_prime(d):
        raise ValidationError(f"mub_pair requires a prime dimension, got {d}")
    comp = Povm(tuple(np.diag(np.eye(d, dtype=complex)[x]) for x in range(d)))
    f = fourier_basis(d)
    four = Povm(tuple(np.outer(f[:, k], f[:, k].conj()) for k in range(d)))
    return comp, four


def counterexample_state(d: int, p: float, theta: float, basis_index: int = 0) -> DensityMatrix:
    """Mixture (1-p) I/d + p |psi><psi| interpolating between the two MUBs.

    ``|psi>`` is the normalized superposition cos(theta)|m_x> + sin(theta)|n_x>
    of the computational and Fourier basis vectors with index ``basis_index``;
    ``theta`` is in radians.
    """
    if not (0.0 <= p <= 1.0):
        raise ValidationError(f"mixing weight p must be in [0, 1], got {p!r}")
    if not _is_prime(d):
        raise ValidationError(f"counterexample_state requires a prime dimension, got {d}")
    if not (0 <= basis_index < d):
        raise ValidationError(f"basis_index must be in [0, {d}), got {basis_index}")
    m = np.zeros(d, dtype=complex)
    m[basis_index] = 1.0
    n = fourier_basis(d)[:, basis_index]
    psi = np.cos(theta) * m + np.sin(theta) * n
    nrm = np.linalg.norm(psi)
    if nrm < 1e-12:
        raise DegenerateSuperpositionError(
            f"cos(theta)|m> + sin(theta)|n> has norm {nrm!r} at theta={theta!r}"
        )
    psi = psi / nrm
    rho = (1.0 - p) * np.eye(d, dtype=complex) / d + p * np.outer(psi, psi.conj())
    return DensityMatrix(rho)
