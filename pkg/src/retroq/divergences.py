"""Classical and quantum entropies and divergences, all in base-2 bits.

Support handling is uniform: eigenvalues at or below ``SUPPORT_CUTOFF`` count
as zero, inverse powers are taken on the support only, and a first argument
whose support leaks outside the second argument's support yields ``+inf``
(which propagates through ``max``; callers treat it as a flagged value, not an
error). The second argument may be subnormalized (trace <= 1), as required
for the instrument-state bounds.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError
from .linalg import NEG_EIG_BAND, dag, require_hermitian
from .retrodiction import CqState

SUPPORT_CUTOFF = 1e-10
PROB_CLAMP = 1e-12
TRACE_SLACK = 1e-9

DIVERGENCE_IDS = ("umegaki", "petz:ALPHA", "sandwiched:ALPHA", "geometric:ALPHA", "bs", "trace")


def _as_psd_matrix(a, what: str) -> np.ndarray:
    mat = getattr(a, "mat", a)
    return require_hermitian(mat, what)


def _psd_eig(a, what: str):
    """Eigen-decompose a PSD operand, clamping the -1e-12 noise band to zero."""
    m = _as_psd_matrix(a, what)
    w, v = np.linalg.eigh(m)
    if w.min() < -NEG_EIG_BAND:
        raise ValidationError(f"{what}: negative eigenvalue {w.min()!r}")
    return m, np.maximum(w, 0.0), v


def _support_power(w: np.ndarray, v: np.ndarray, p: float, cutoff: float) -> np.ndarray:
    """Matrix power on the support: eigenvalues <= cutoff map to 0."""
    on = w > cutoff
    wp = np.zeros_like(w)
    wp[on] = w[on] ** p
    return (v * wp) @ dag(v)


def _support_leak(a: np.ndarray, wb: np.ndarray, vb: np.ndarray, cutoff: float) -> bool:
    """True when the first operand has weight on the kernel of the second."""
    ker = vb[:, wb <= cutoff]
    if ker.shape[1] == 0:
        return False
    mass = float(np.einsum("ij,jk,ki->", dag(ker), a, ker).real)
    return mass > cutoff


def shannon_entropy(p: np.ndarray, validate: bool = True) -> float:
    """-sum p log2 p with the 0 log 0 = 0 convention."""
    p = np.asarray(p, dtype=float).reshape(-1)
    if validate:
        if p.size == 0 or not np.all(np.isfinite(p)):
            raise ValidationError("probability vector must be nonempty and finite")
        if p.min() < -NEG_EIG_BAND:
            raise ValidationError(f"negative probability {p.min()!r}")
        total = float(p.sum())
        if abs(total - 1.0) > TRACE_SLACK:
            raise ValidationError(f"probabilities sum to {total!r}, expected 1")
    p = p[p > PROB_CLAMP]
    return float(-(p * np.log2(p)).sum()) if p.size else 0.0


def von_neumann_entropy(rho) -> float:
    """Shannon entropy of the (clamped) spectrum, in bits."""
    _, w, _ = _psd_eig(rho, "state")
    return shannon_entropy(w, validate=False)


def _check_first_arg_trace(a: np.ndarray, what: str) -> None:
    tr = float(np.trace(a).real)
    if tr > 1.0 + TRACE_SLACK:
        raise ValidationError(f"{what}: first argument trace {tr!r} exceeds 1")


def umegaki(a, b, support_cutoff: float = SUPPORT_CUTOFF) -> float:
    """Tr{A (log2 A - log2 B)} on supports; +inf when supp(A) leaks past supp(B)."""
    ma, wa, _ = _psd_eig(a, "umegaki: first argument")
    mb, wb, vb = _psd_eig(b, "umegaki: second argument")
    _check_first_arg_trace(ma, "umegaki")
    if _support_leak(ma, wb, vb, support_cutoff):
        return math.inf
    on_a = wa > support_cutoff
    tr_a_log_a = float((wa[on_a] * np.log2(wa[on_a])).sum())
    on_b = wb > support_cutoff
    log_b = (vb[:, on_b] * np.log2(wb[on_b])) @ dag(vb[:, on_b])
    return tr_a_log_a - float(np.einsum("ij,ji->", ma, log_b).real)


def _petz_q(a, b, alpha: float, cutoff: float) -> float:
    """Block contribution Tr{A^alpha B^(1-alpha)}; inf marks a support violation."""
    ma, wa, va = _psd_eig(a, "petz: first argument")
    mb, wb, vb = _psd_eig(b, "petz: second argument")
    if alpha > 1.0 and _support_leak(ma, wb, vb, cutoff):
        return math.inf
    a_pow = _support_power(wa, va, alpha, cutoff)
    b_pow = _support_power(wb, vb, 1.0 - alpha, cutoff)
    return float(np.einsum("ij,ji->", a_pow, b_pow).real)


def _sandwiched_q(a, b, alpha: float, cutoff: float) -> float:
    """Block contribution Tr{(B^e A B^e)^alpha}, e = (1-alpha)/(2 alpha)."""
    ma, _, _ = _psd_eig(a, "sandwiched: first argument")
    mb, wb, vb = _psd_eig(b, "sandwiched: second argument")
    if alpha > 1.0 and _support_leak(ma, wb, vb, cutoff):
        return math.inf
    b_e = _support_power(wb, vb, (1.0 - alpha) / (2.0 * alpha), cutoff)
    x = b_e @ ma @ b_e
    wx = np.maximum(np.linalg.eigvalsh((x + dag(x)) / 2), 0.0)
    wx = wx[wx > cutoff]
    return float((wx**alpha).sum())


def _geometric_q(a, b, alpha: float, cutoff: float) -> float:
    """Block contribution Tr{B (B^(-1/2) A B^(-1/2))^alpha}."""
    ma, _, _ = _psd_eig(a, "geometric: first argument")
    mb, wb, vb = _psd_eig(b, "geometric: second argument")
    if _support_leak(ma, wb, vb, cutoff):
        return math.inf
    b_isqrt = _support_power(wb, vb, -0.5, cutoff)
    x = b_isqrt @ ma @ b_isqrt
    wx, vx = np.linalg.eigh((x + dag(x)) / 2)
    x_pow = _support_power(np.maximum(wx, 0.0), vx, alpha, cutoff)
    return float(np.einsum("ij,ji->", mb, x_pow).real)


def _bs_term(a, b, cutoff: float) -> float:
    """Block contribution Tr{A log2(A^(1/2) B^(-1) A^(1/2))}."""
    ma, wa, va = _psd_eig(a, "bs: first argument")
    mb, wb, vb = _psd_eig(b, "bs: second argument")
    if _support_leak(ma, wb, vb, cutoff):
        return math.inf
    sqrt_a = _support_power(wa, va, 0.5, cutoff)
    b_inv = _support_power(wb, vb, -1.0, cutoff)
    x = sqrt_a @ b_inv @ sqrt_a
    wx, vx = np.linalg.eigh((x + dag(x)) / 2)
    on = wx > cutoff
    log_x = (vx[:, on] * np.log2(wx[on])) @ dag(vx[:, on])
    return float(np.einsum("ij,ji->", ma, log_x).real)


def _validate_petz_alpha(alpha: float) -> None:
    if not (0.0 < alpha <= 2.0) or alpha == 1.0:
        raise ValidationError(f"petz alpha must lie in (0,1) or (1,2], got {alpha!r}")


def _validate_sandwiched_alpha(alpha: float) -> None:
    if alpha < 0.5 or alpha == 1.0 or not math.isfinite(alpha):
        raise ValidationError(f"sandwiched alpha must lie in [1/2,1) or (1,inf), got {alpha!r}")


def _validate_geometric_alpha(alpha: float) -> None:
    if not (0.0 < alpha <= 2.0) or alpha == 1.0:
        raise ValidationError(f"geometric alpha must lie in (0,1) or (1,2], got {alpha!r}")


def _renyi_from_q(q: float, alpha: float) -> float:
    if not math.isfinite(q):
        return math.inf
    if q <= 0.0:
        return math.inf
    return math.log2(q) / (alpha - 1.0)


def petz_renyi(a, b, alpha: float, support_cutoff: float = SUPPORT_CUTOFF) -> float:
    """Petz-Renyi divergence (alpha in (0,1) or (1,2])."""
    _validate_petz_alpha(alpha)
    _check_first_arg_trace(_as_psd_matrix(a, "petz"), "petz")
    return _renyi_from_q(_petz_q(a, b, alpha, support_cutoff), alpha)


def sandwiched_renyi(a, b, alpha: float, support_cutoff: float = SUPPORT_CUTOFF) -> float:
    """Sandwiched Renyi divergence (alpha in [1/2,1) or (1,inf))."""
    _validate_sandwiched_alpha(alpha)
    _check_first_arg_trace(_as_psd_matrix(a, "sandwiched"), "sandwiched")
    return _renyi_from_q(_sandwiched_q(a, b, alpha, support_cutoff), alpha)


def geometric_renyi(a, b, alpha: float, support_cutoff: float = SUPPORT_CUTOFF) -> float:
    """Geometric Renyi divergence (alpha in (0,1) or (1,2])."""
    _validate_geometric_alpha(alpha)
    _check_first_arg_trace(_as_psd_matrix(a, "geometric"), "geometric")
    return _renyi_from_q(_geometric_q(a, b, alpha, support_cutoff), alpha)


def belavkin_staszewski(a, b, support_cutoff: float = SUPPORT_CUTOFF) -> float:
    """Belavkin-Staszewski relative entropy."""
    _check_first_arg_trace(_as_psd_matrix(a, "bs"), "bs")
    return _bs_term(a, b, support_cutoff)


def trace_distance(a, b) -> float:
    """Half the trace norm of the difference of two Hermitian operators."""
    ma = _as_psd_matrix(a, "trace_distance: first argument")
    mb = _as_psd_matrix(b, "trace_distance: second argument")
    if ma.shape != mb.shape:
        raise ValidationError(f"trace_distance: shapes {ma.shape} and {mb.shape} differ")
    return 0.5 * float(np.abs(np.linalg.eigvalsh(ma - mb)).sum())


def parse_divergence(div: str) -> tuple:
    """Parse an id like ``"umegaki"`` or ``"sandwiched:2"`` into (kind, alpha)."""
    if not isinstance(div, str):
        raise ValidationError(f"divergence id must be a string, got {div!r}")
    kind, _, alpha_s = div.partition(":")
    kind = kind.strip().lower()
    if kind in ("umegaki", "bs", "trace"):
        if alpha_s:
            raise ValidationError(f"divergence {kind!r} takes no alpha parameter")
        return kind, None
    if kind in ("petz", "sandwiched", "geometric"):
        try:
            alpha = float(alpha_s)
        except ValueError:
            raise ValidationError(f"divergence {div!r}: expected {kind}:ALPHA with a numeric alpha")
        {"petz": _validate_petz_alpha,
         "sandwiched": _validate_sandwiched_alpha,
         "geometric": _validate_geometric_alpha}[kind](alpha)
        return kind, alpha
    raise ValidationError(f"unknown divergence {div!r}; expected one of {DIVERGENCE_IDS}")


def pair_divergence(div: str, a, b, support_cutoff: float = SUPPORT_CUTOFF) -> float:
    """Evaluate a divergence id on a single pair of PSD operators."""
    kind, alpha = parse_divergence(div)
    if kind == "umegaki":
        return umegaki(a, b, support_cutoff)
    if kind == "petz":
        return petz_renyi(a, b, alpha, support_cutoff)
    if kind == "sandwiched":
        return sandwiched_renyi(a, b, alpha, support_cutoff)
    if kind == "geometric":
        return geometric_renyi(a, b, alpha, support_cutoff)
    if kind == "bs":
        return belavkin_staszewski(a, b, support_cutoff)
    return trace_distance(a, b)


def cq_divergence(div: str, sigma: CqState, gamma: CqState,
                  support_cutoff: float = SUPPORT_CUTOFF) -> float:
    """Divergence between block-diagonal cq states, computed block-wise.

    Exploits the direct-sum structure: additive divergences sum block terms,
    the Renyi families aggregate the trace functional across blocks before
    taking the logarithm. The full |X| d-dimensional matrices are never
    materialized.
    """
    kind, alpha = parse_divergence(div)
    if sigma.labels != gamma.labels:
        raise ValidationError("cq_divergence: states carry different outcome labels")
    if sigma.dim != gamma.dim:
        raise ValidationError("cq_divergence: block dimensions differ")
    pairs = list(zip(sigma.blocks, gamma.blocks))
    if kind == "umegaki":
        return float(sum(umegaki(a, b, support_cutoff) for a, b in pairs))
    if kind == "bs":
        return float(sum(_bs_term(a, b, support_cutoff) for a, b in pairs))
    if kind == "trace":
        return float(sum(trace_distance(a, b) for a, b in pairs))
    block_q = {"petz": _petz_q, "sandwiched": _sandwiched_q, "geometric": _geometric_q}[kind]
    q = 0.0
    for a, b in pairs:
        q_x = block_q(a, b, alpha, support_cutoff)
        if not math.isfinite(q_x):
            return math.inf
        q += q_x
    return _renyi_from_q(q, alpha)
