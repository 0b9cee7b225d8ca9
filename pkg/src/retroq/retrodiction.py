"""Minimum-change retrodiction: Bayesian inverse states and the symmetric joint.

The central objects are the retrodicted state sqrt(g) M_x sqrt(g) / Tr{g M_x}
for an observed outcome x, the block-diagonal forward state with blocks
sqrt(g) M_x sqrt(g), and the joint distribution
Pr{y <- x} = Tr{N_y sqrt(g) M_x sqrt(g)}, which is symmetric in the two
measurements and marginalizes to the Born probabilities of each.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConsistencyError, ValidationError, ZeroProbabilityOutcomeError
from .linalg import NEG_EIG_BAND, require_hermitian
from .quantum import DensityMatrix, Povm, _readonly

PROB_CLAMP = 1e-12
IMAG_RESIDUE_TOL = 1e-9
JOINT_SUM_TOL = 1e-9
MARGINAL_TOL = 1e-9


def _entropy_bits(p: np.ndarray) -> float:
    p = p[p > PROB_CLAMP]
    return float(-(p * np.log2(p)).sum()) if p.size else 0.0


@dataclass(frozen=True, eq=False)
class CqState:
    """Classical-quantum state as an ordered list of (label, PSD block) pairs.

    Stores the blocks of sum_x |x><x| (x) B_x directly instead of the
    |X| d x |X| d block-diagonal matrix. Block traces must sum to one.
    """

    labels: tuple
    blocks: tuple

    def __post_init__(self):
        if len(self.labels) != len(self.blocks) or not self.blocks:
            raise ValidationError("CqState: labels and blocks must be equal-length and nonempty")
        blocks = tuple(require_hermitian(b, f"cq block {x}") for x, b in zip(self.labels, self.blocks))
        d = blocks[0].shape[0]
        total = 0.0
        for x, b in zip(self.labels, blocks):
            if b.shape != (d, d):
                raise ValidationError(f"cq block {x}: shape {b.shape} != ({d}, {d})")
            w_min = float(np.linalg.eigvalsh(b).min())
            if w_min < -NEG_EIG_BAND:
                raise ValidationError(f"cq block {x}: negative eigenvalue {w_min!r}")
            total += float(np.trace(b).real)
        if abs(total - 1.0) > JOINT_SUM_TOL:
            raise ValidationError(f"CqState: block traces sum to {total!r}, expected 1")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "blocks", tuple(_readonly(b) for b in blocks))

    @property
    def dim(self) -> int:
        return self.blocks[0].shape[0]

    def label_marginal(self) -> np.ndarray:
        """Probabilities of the classical register (block traces)."""
        return np.array([float(np.trace(b).real) for b in self.blocks])

    def system_marginal(self) -> np.ndarray:
        """Reduced operator on the quantum system (sum of blocks)."""
        return sum(self.blocks)


def bayesian_inverse(gamma: DensityMatrix, m: Povm, x: int) -> DensityMatrix:
    """Minimum-change retrodicted state sqrt(g) M_x sqrt(g) / Tr{g M_x}.

    Raises :class:`ZeroProbabilityOutcomeError` when the outcome probability
    is at most 1e-12: retrodiction from an impossible outcome is undefined.
    """
    if gamma.dim != m.dim:
        raise ValidationError(f"dimension mismatch: state {gamma.dim}, POVM {m.dim}")
    if not (0 <= x < m.n_outcomes):
        raise ValidationError(f"outcome {x} out of range [0, {m.n_outcomes})")
    sg = gamma.sqrt
    block = sg @ m[x] @ sg
    p = float(np.trace(block).real)
    if p <= PROB_CLAMP:
        raise ZeroProbabilityOutcomeError(f"outcome {x} has probability {p!r}")
    return DensityMatrix(block / p)


def forward_state(gamma: DensityMatrix, m: Povm) -> CqState:
    """Bipartite forward state with blocks sqrt(g) M_x sqrt(g).

    Its classical marginal is the outcome distribution and its quantum
    marginal recovers ``gamma``.
    """
    if gamma.dim != m.dim:
        raise ValidationError(f"dimension mismatch: state {gamma.dim}, POVM {m.dim}")
    sg = gamma.sqrt
    return CqState(tuple(range(m.n_outcomes)), tuple(sg @ e @ sg for e in m.elements))


@dataclass(frozen=True, eq=False)
class RetroJoint:
    """Joint distribution Pr{y <- x} with its exact marginals."""

    probs: np.ndarray
    row_marginal: np.ndarray
    col_marginal: np.ndarray

    @property
    def shape(self) -> tuple:
        return self.probs.shape

    @cached_property
    def entropy_m(self) -> float:
        return _entropy_bits(self.row_marginal)

    @cached_property
    def entropy_n(self) -> float:
        return _entropy_bits(self.col_marginal)

    @cached_property
    def joint_entropy(self) -> float:
        return _entropy_bits(self.probs.reshape(-1))

    def mutual_information(self) -> float:
        """I(X;Y) in bits, computed from the joint and its exact marginals."""
        return self.entropy_m + self.entropy_n - self.joint_entropy


def retro_joint(gamma: DensityMatrix, m: Povm, n: Povm) -> RetroJoint:
    """Symmetric retrodictive joint Pr{y <- x} = Tr{N_y sqrt(g) M_x sqrt(g)}."""
    if not (gamma.dim == m.dim == n.dim):
        raise ValidationError(
            f"dimension mismatch: state {gamma.dim}, POVMs {m.dim} and {n.dim}"
        )
    sg = gamma.sqrt
    blocks = [sg @ e @ sg for e in m.elements]
    raw = np.array([[np.einsum("ij,ji->", ny, bx) for ny in n.elements] for bx in blocks])
    residue = float(np.abs(raw.imag).max())
    if residue > IMAG_RESIDUE_TOL:
        raise ConsistencyError(f"joint probabilities have imaginary residue {residue:.3e}")
    probs = raw.real
    low = float(probs.min())
    if low < -NEG_EIG_BAND:
        raise ConsistencyError(f"joint probability {low!r} below clamp band")
    probs = np.maximum(probs, 0.0)
    total = float(probs.sum())
    if abs(total - 1.0) > JOINT_SUM_TOL:
        raise ConsistencyError(f"joint probabilities sum to {total!r}")
    row = probs.sum(axis=1)
    col = probs.sum(axis=0)
    born_m = m.outcome_probabilities(gamma)
    born_n = n.outcome_probabilities(gamma)
    if np.abs(row - born_m).max() > MARGINAL_TOL or np.abs(col - born_n).max() > MARGINAL_TOL:
        raise ConsistencyError("joint marginals disagree with Born probabilities")
    return RetroJoint(_readonly(probs), _readonly(row), _readonly(col))


def mutual_retrodictability(gamma: DensityMatrix, m: Povm, n: Povm) -> float:
    """Mutual information of the retrodictive joint, in bits.

    Bounded by 0 <= R <= H(gamma); the upper bound is saturated e.g. when
    both measurements project onto the eigenbasis of ``gamma``.
    """
    return retro_joint(gamma, m, n).mutual_information()
