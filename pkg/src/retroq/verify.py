"""Monte-Carlo oracle for the minimum-change theorems.

For a state, a POVM and a target outcome distribution tau, the claimed
minimizer of D(sigma_XQ || gamma_XQ) over backward cq states is the Bayesian
inverse assembled with weights tau. The oracle checks that (a) the value at
the claimed minimizer equals the classical divergence D(tau || p), (b) no
random or perturbed candidate beats it, and (c) the value is nondecreasing
along mixing rays away from it, with strict increase at weights >= 1e-2
(uniqueness evidence, for the relative-entropy families).

The strict-increase check is deliberately not applied to the trace distance:
when tau != p the trace-distance minimum is attained on a larger set (mixing
the inverse with extra PSD weight can keep the per-outcome difference
semidefinite), so only the minimum value itself is certified there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .divergences import cq_divergence, parse_divergence
from .errors import ValidationError
from .quantum import DensityMatrix, Povm, RngStream, random_density_matrix
from .retrodiction import CqState, bayesian_inverse, forward_state
from .serialize import density_matrix_to_obj, matrix_to_obj, povm_to_obj

PROB_CLAMP = 1e-12
MINIMIZER_TOL = 1e-8
BEAT_TOL = 1e-9
STRICT_INCREASE_TOL = 1e-10
MONOTONE_SLACK = 1e-10
PERTURBATION_WEIGHTS = (1e-3, 1e-2, 1e-1, 0.5)

TAU_KINDS = ("uniform", "point", "dirichlet")


@dataclass(frozen=True, eq=False)
class BackwardCandidate:
    """Target outcome distribution plus one conditional state per outcome."""

    tau: np.ndarray
    states: tuple

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float).reshape(-1)
        if tau.size != len(self.states):
            raise ValidationError("BackwardCandidate: one conditional state per outcome required")
        if tau.min() < -PROB_CLAMP or abs(float(tau.sum()) - 1.0) > 1e-9:
            raise ValidationError(f"BackwardCandidate: tau is not a probability vector: {tau!r}")
        object.__setattr__(self, "tau", np.maximum(tau, 0.0))
        object.__setattr__(self, "states", tuple(self.states))


def candidate_to_cq(candidate: BackwardCandidate) -> CqState:
    """Blocks tau(x) sigma_x of the backward bipartite state."""
    blocks = tuple(t * s.mat for t, s in zip(candidate.tau, candidate.states))
    return CqState(tuple(range(len(blocks))), blocks)


def classical_divergence(div: str, tau: np.ndarray, p: np.ndarray) -> float:
    """Scalar divergence D(tau || p); the independent oracle for the minimum value."""
    kind, alpha = parse_divergence(div)
    tau = np.asarray(tau, dtype=float).reshape(-1)
    p = np.asarray(p, dtype=float).reshape(-1)
    if tau.shape != p.shape:
        raise ValidationError("classical_divergence: length mismatch")
    if kind == "trace":
        return 0.5 * float(np.abs(tau - p).sum())
    if kind in ("umegaki", "bs"):
        total = 0.0
        for t, q in zip(tau, p):
            if t <= PROB_CLAMP:
                continue
            if q <= PROB_CLAMP:
                return math.inf
            total += t * math.log2(t / q)
        return total
    # petz / sandwiched / geometric all reduce to the classical Renyi divergence
    acc = 0.0
    for t, q in zip(tau, p):
        if t <= PROB_CLAMP:
            continue
        if q <= PROB_CLAMP:
            if alpha > 1.0:
                return math.inf
            continue
        acc += t**alpha * q ** (1.0 - alpha)
    if acc <= 0.0:
        return math.inf
    return math.log2(acc) / (alpha - 1.0)


def minimizer_candidate(gamma: DensityMatrix, m: Povm, tau: np.ndarray) -> BackwardCandidate:
    """The claimed optimum: Bayesian inverse states weighted by tau."""
    states = tuple(bayesian_inverse(gamma, m, x) for x in range(m.n_outcomes))
    return BackwardCandidate(np.asarray(tau, dtype=float), states)


def draw_tau(n: int, rng: np.random.Generator, kind: str = "dirichlet") -> np.ndarray:
    """Target distributions covering textbook Bayes (point mass) and soft evidence."""
    if kind == "uniform":
        return np.full(n, 1.0 / n)
    if kind == "point":
        tau = np.zeros(n)
        tau[int(rng.integers(n))] = 1.0
        return tau
    if kind == "dirichlet":
        return rng.dirichlet(np.ones(n))
    raise ValidationError(f"unknown tau kind {kind!r}; expected one of {TAU_KINDS}")


@dataclass
class VerifyReport:
    """Outcome of one oracle run; ``counterexample`` holds the first failure."""

    theorem: str
    divergence: str
    dim: int
    n_outcomes: int
    expected_minimum: float
    value_at_minimizer: float
    minimizer_abs_error: float
    n_evaluations: int = 0
    n_beating_candidates: int = 0
    worst_candidate_margin: float = math.inf
    n_monotonicity_violations: int = 0
    n_strict_increase_failures: int = 0
    passed: bool = True
    counterexample: dict | None = field(default=None, repr=False)

    def to_jsonable(self) -> dict:
        out = dict(self.__dict__)
        for key in ("expected_minimum", "value_at_minimizer", "minimizer_abs_error",
                    "worst_candidate_margin"):
            v = out[key]
            out[key] = repr(v) if not math.isfinite(v) else v
        return out


def _counterexample(gamma, m, tau, div, candidate, value, minimum, expected, note) -> dict:
    return {
        "note": note,
        "divergence": div,
        "state": density_matrix_to_obj(gamma),
        "povm": povm_to_obj(m),
        "tau": [float(t) for t in tau],
        "candidate_states": None if candidate is None
        else [matrix_to_obj(s.mat) for s in candidate.states],
        "value": repr(value),
        "value_at_minimizer": repr(minimum),
        "expected_minimum": repr(expected),
    }


def _random_states(d: int, count: int, gen: np.random.Generator) -> tuple:
    return tuple(random_density_matrix(d, gen, ensemble="hilbert-schmidt") for _ in range(count))


def _mix(minimizer_states, targets, weight: float) -> tuple:
    return tuple(
        DensityMatrix((1.0 - weight) * a.mat + weight * b.mat)
        for a, b in zip(minimizer_states, targets)
    )


def _verify(theorem: str, gamma: DensityMatrix, m: Povm, tau, divergence: str,
            n_candidates: int, rng: RngStream, require_strict_increase: bool) -> VerifyReport:
    tau = np.asarray(tau, dtype=float).reshape(-1)
    if tau.size != m.n_outcomes:
        raise ValidationError("tau must assign a probability to every outcome")
    p = m.outcome_probabilities(gamma)
    if p.min() <= PROB_CLAMP:
        raise ValidationError(
            f"theorem precondition Tr{{gamma M_x}} > 0 violated (min {p.min()!r})"
        )
    forward = forward_state(gamma, m)
    minimizer = minimizer_candidate(gamma, m, tau)
    minimizer_states = minimizer.states
    v_min = cq_divergence(divergence, candidate_to_cq(minimizer), forward)
    expected = classical_divergence(divergence, tau, p)
    err = abs(v_min - expected) if math.isfinite(v_min) and math.isfinite(expected) \
        else (0.0 if v_min == expected else math.inf)
    report = VerifyReport(
        theorem=theorem,
        divergence=divergence,
        dim=gamma.dim,
        n_outcomes=m.n_outcomes,
        expected_minimum=expected,
        value_at_minimizer=v_min,
        minimizer_abs_error=err,
    )
    if err > MINIMIZER_TOL:
        report.passed = False
        report.counterexample = _counterexample(
            gamma, m, tau, divergence, None, v_min, v_min, expected,
            "value at claimed minimizer differs from classical divergence")
        return report

    def check(candidate, value, note):
        margin = value - v_min
        if math.isfinite(margin):
            report.worst_candidate_margin = min(report.worst_candidate_margin, margin)
        if margin < -BEAT_TOL:
            report.n_beating_candidates += 1
            report.passed = False
            if report.counterexample is None:
                report.counterexample = _counterexample(
                    gamma, m, tau, divergence, candidate, value, v_min, expected, note)

    d = gamma.dim
    n_out = m.n_outcomes
    for k in range(n_candidates):
        gen = rng.child(k)
        if k % 2 == 0:
            weight = PERTURBATION_WEIGHTS[(k // 2) % len(PERTURBATION_WEIGHTS)]
            states = _mix(minimizer_states, _random_states(d, n_out, gen), weight)
            note = f"perturbation at weight {weight}"
        else:
            states = _random_states(d, n_out, gen)
            note = "fully random candidate"
        candidate = BackwardCandidate(tau, states)
        value = cq_divergence(divergence, candidate_to_cq(candidate), forward)
        report.n_evaluations += 1
        check(candidate, value, note)

    n_rays = max(4, n_candidates // 128)
    for r in range(n_rays):
        gen = rng.child(1_000_000 + r)
        targets = _random_states(d, n_out, gen)
        previous = v_min
        for weight in PERTURBATION_WEIGHTS:
            candidate = BackwardCandidate(tau, _mix(minimizer_states, targets, weight))
            value = cq_divergence(divergence, candidate_to_cq(candidate), forward)
            report.n_evaluations += 1
            check(candidate, value, f"ray perturbation at weight {weight}")
            if value < previous - MONOTONE_SLACK:
                report.n_monotonicity_violations += 1
                report.passed = False
                if report.counterexample is None:
                    report.counterexample = _counterexample(
                        gamma, m, tau, divergence, candidate, value, v_min, expected,
                        f"value decreased along mixing ray at weight {weight}")
            previous = value
            if require_strict_increase and weight >= 1e-2:
                if not (value > v_min + STRICT_INCREASE_TOL):
                    report.n_strict_increase_failures += 1
                    report.passed = False
                    if report.counterexample is None:
                        report.counterexample = _counterexample(
                            gamma, m, tau, divergence, candidate, value, v_min, expected,
                            f"no strict increase at perturbation weight {weight}")
    return report


def verify_theorem1(gamma: DensityMatrix, m: Povm, tau, divergence: str,
                    n_candidates: int, rng: RngStream) -> VerifyReport:
    """Check the divergence-independent minimizer claim for one instance."""
    kind, _ = parse_divergence(divergence)
    if kind == "trace":
        raise ValidationError("use verify_theorem2 for the trace distance")
    return _verify("theorem1", gamma, m, tau, divergence, n_candidates, rng,
                   require_strict_increase=True)


def verify_theorem2(gamma: DensityMatrix, m: Povm, tau,
                    n_candidates: int, rng: RngStream) -> VerifyReport:
    """Check the trace-distance minimum value 0.5 sum |tau - p| for one instance."""
    return _verify("theorem2", gamma, m, tau, "trace", n_candidates, rng,
                   require_strict_increase=False)
