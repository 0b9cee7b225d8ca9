"""Entropic uncertainty bounds built on the retrodictive joint distribution.

Three lower bounds on H(M) + H(N) are compared:

* ``eur1``: -log2 of the largest entry of the retrodictive joint.
* ``eur2``: H(gamma) plus the larger Umegaki divergence between the prior and
  the two polar-instrument pullback states (valid when the prior or one of
  the POVMs is rank-one).
* ``eur3``: the Berta-style bound H(gamma) - log2 of the largest squared
  operator-norm overlap between the measurement square roots. A variant that
  subtracts the raw overlap instead of its logarithm is available behind
  ``no_log=True`` for comparison.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .divergences import umegaki, shannon_entropy, von_neumann_entropy
from .errors import ConsistencyError, ValidationError
from .linalg import dag, polar_unitary
from .quantum import DensityMatrix, Povm
from .retrodiction import RetroJoint, retro_joint

POLAR_IDENTITY_TOL = 1e-8
TRACE_SLACK = 1e-9
PROB_CLAMP = 1e-12


@dataclass(frozen=True)
class EurRecord:
    """Per-trial bundle of entropies, bounds, gaps and validity flags."""

    h_m: float
    h_n: float
    h_gamma: float
    r_mutual: float
    eur1: float
    eur2: float
    eur3: float
    gap13: float
    gap23: float
    gap21: float
    rank_one_ok: bool
    eur2_finite: bool


def _require_same_dim(gamma: DensityMatrix, m: Povm, n: Povm) -> None:
    if not (gamma.dim == m.dim == n.dim):
        raise ValidationError(
            f"dimension mismatch: state {gamma.dim}, POVMs {m.dim} and {n.dim}"
        )


def polar_instrument_unitaries(gamma: DensityMatrix, m: Povm) -> tuple:
    """Unitaries U_x with U_x sqrt(M_x) g sqrt(M_x) U_x^dag = sqrt(g) M_x sqrt(g).

    U_x is the polar unitary of sqrt(g) sqrt(M_x); the defining identity is
    re-checked and a failure beyond 1e-8 signals broken inputs upstream.
    """
    sg = gamma.sqrt
    out = []
    for x, sm in enumerate(m.sqrts):
        u = polar_unitary(sg @ sm)
        lhs = u @ (sm @ gamma.mat @ sm) @ dag(u)
        rhs = sg @ m[x] @ sg
        defect = float(np.abs(lhs - rhs).max())
        if defect > POLAR_IDENTITY_TOL:
            raise ConsistencyError(
                f"polar instrument identity failed at outcome {x} (defect {defect:.3e})"
            )
        out.append(u)
    return tuple(out)


def instrument_state_mn(gamma: DensityMatrix, m: Povm, n: Povm) -> np.ndarray:
    """Pullback state of the M-then-N polar instrument (subnormalized PSD)."""
    _require_same_dim(gamma, m, n)
    sg = gamma.sqrt
    unitaries = polar_instrument_unitaries(gamma, m)
    d = gamma.dim
    out = np.zeros((d, d), dtype=complex)
    for x, u in enumerate(unitaries):
        t_x = sg @ m[x] @ sg
        inner = np.zeros((d, d), dtype=complex)
        for ny in n.elements:
            inner += ny @ t_x @ ny
        c = u @ m.sqrts[x]
        out += dag(c) @ inner @ c
    out = (out + dag(out)) / 2
    tr = float(np.trace(out).real)
    if tr > 1.0 + TRACE_SLACK:
        raise ConsistencyError(f"instrument state trace {tr!r} exceeds 1")
    return out


def instrument_state_nm(gamma: DensityMatrix, m: Povm, n: Povm) -> np.ndarray:
    """Pullback state of the N-then-M polar instrument (roles of M and N swapped)."""
    return instrument_state_mn(gamma, n, m)


def eur1_from_joint(joint: RetroJoint) -> float:
    p_max = float(joint.probs.max())
    if p_max <= 0.0:
        raise ConsistencyError("retrodictive joint has no positive entry")
    return -math.log2(p_max)


def eur1(gamma: DensityMatrix, m: Povm, n: Povm) -> float:
    """-log2 max_xy Pr{y <- x}; always a valid lower bound on H(M) + H(N)."""
    _require_same_dim(gamma, m, n)
    return eur1_from_joint(retro_joint(gamma, m, n))


def eur2(gamma: DensityMatrix, m: Povm, n: Povm) -> float:
    """H(gamma) + max of the two prior-vs-pullback divergences (extended real).

    A support violation in either divergence yields +inf; callers should
    consult :func:`rank_one_condition` before reading this as a bound.
    """
    _require_same_dim(gamma, m, n)
    h_gamma = von_neumann_entropy(gamma)
    d_mn = umegaki(gamma.mat, instrument_state_mn(gamma, m, n))
    d_nm = umegaki(gamma.mat, instrument_state_nm(gamma, m, n))
    return h_gamma + max(d_mn, d_nm)


def berta_overlap(m: Povm, n: Povm) -> float:
    """max_xy ||sqrt(N_y) sqrt(M_x)||_inf^2, the squared measurement overlap."""
    if m.dim != n.dim:
        raise ValidationError(f"dimension mismatch: POVMs {m.dim} and {n.dim}")
    best = 0.0
    for sm in m.sqrts:
        for ny in n.elements:
            top = float(np.linalg.eigvalsh(sm @ ny @ sm)[-1])
            if top > best:
                best = top
    return best


def eur3(gamma: DensityMatrix, m: Povm, n: Povm, no_log: bool = False) -> float:
    """Berta-style bound H(gamma) - log2(overlap); requires a rank-one POVM.

    ``no_log=True`` subtracts the overlap itself instead of its logarithm
    (a non-standard variant kept for comparison).
    """
    _require_same_dim(gamma, m, n)
    c = berta_overlap(m, n)
    h_gamma = von_neumann_entropy(gamma)
    if no_log:
        return h_gamma - c
    return h_gamma - math.log2(c)


def rank_one_condition(gamma: DensityMatrix, m: Povm, n: Povm) -> bool:
    """True when gamma, M, or N is rank-one (the eur2 validity condition)."""
    return gamma.rank == 1 or m.is_rank_one or n.is_rank_one


def go_information_gain(gamma: DensityMatrix, m: Povm, n: Povm) -> float:
    """Information gain of the sequential polar instrument, in bits.

    H(gamma) minus the average entropy of the normalized post-measurement
    states sqrt(N_y) sqrt(g) M_x sqrt(g) sqrt(N_y) / Pr(x, y). Equals
    H(gamma) whenever a rank-one element is involved.
    """
    _require_same_dim(gamma, m, n)
    sg = gamma.sqrt
    h_gamma = von_neumann_entropy(gamma)
    avg = 0.0
    for mx in m.elements:
        t_x = sg @ mx @ sg
        for sn in n.sqrts:
            cell = sn @ t_x @ sn
            p = float(np.trace(cell).real)
            if p <= PROB_CLAMP:
                continue
            w = np.maximum(np.linalg.eigvalsh((cell + dag(cell)) / 2), 0.0) / p
            avg += p * shannon_entropy(w, validate=False)
    return h_gamma - avg


def eur_record(gamma: DensityMatrix, m: Povm, n: Povm, eur3_no_log: bool = False) -> EurRecord:
    """All bounds, entropies and gaps for one (state, M, N) triple."""
    _require_same_dim(gamma, m, n)
    joint = retro_joint(gamma, m, n)
    h_m = joint.entropy_m
    h_n = joint.entropy_n
    h_gamma = von_neumann_entropy(gamma)
    r_mutual = joint.mutual_information()
    e1 = eur1_from_joint(joint)
    e2 = eur2(gamma, m, n)
    e3 = eur3(gamma, m, n, no_log=eur3_no_log)
    return EurRecord(
        h_m=h_m,
        h_n=h_n,
        h_gamma=h_gamma,
        r_mutual=r_mutual,
        eur1=e1,
        eur2=e2,
        eur3=e3,
        gap13=e1 - e3,
        gap23=e2 - e3,
        gap21=e2 - e1,
        rank_one_ok=rank_one_condition(gamma, m, n),
        eur2_finite=math.isfinite(e2),
    )
