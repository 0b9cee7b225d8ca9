import numpy as np
import pytest

from retroq import (
    CqState,
    DensityMatrix,
    Povm,
    ValidationError,
    ZeroProbabilityOutcomeError,
    bayesian_inverse,
    forward_state,
    matrix_sqrt,
    mub_pair,
    mutual_retrodictability,
    random_density_matrix,
    random_pvm,
    random_rank_one_povm,
    retro_joint,
    schatten_norm,
    von_neumann_entropy,
)
from conftest import assert_close, maxabs


def computational_pvm(d):
    eye = np.eye(d, dtype=complex)
    return Povm(tuple(np.outer(eye[:, x], eye[:, x]) for x in range(d)))


def random_triple(gen, d, n_outcomes=None, povm=False, ensemble="hilbert-schmidt"):
    gamma = random_density_matrix(d, gen, ensemble=ensemble)
    if povm:
        n_outcomes = n_outcomes or d
        return gamma, random_rank_one_povm(d, n_outcomes, gen), random_rank_one_povm(d, n_outcomes, gen)
    return gamma, random_pvm(d, gen), random_pvm(d, gen)


class TestCqState:
    def test_traces_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            CqState((0, 1), (np.eye(2, dtype=complex) / 2, np.eye(2, dtype=complex) / 2))

    def test_blocks_must_be_psd(self):
        with pytest.raises(ValidationError):
            CqState((0,), (np.diag([1.5, -0.5]).astype(complex),))

    def test_marginals(self):
        blocks = (np.diag([0.3, 0.1]).astype(complex), np.diag([0.2, 0.4]).astype(complex))
        cq = CqState((0, 1), blocks)
        assert_close(cq.label_marginal(), [0.4, 0.6], 1e-12)
        assert_close(cq.system_marginal(), np.diag([0.5, 0.5]), 1e-12)


class TestBayesianInverse:
    def test_maximally_mixed_prior_returns_projector(self):
        gamma = DensityMatrix.maximally_mixed(2)
        post = bayesian_inverse(gamma, computational_pvm(2), 0)
        assert_close(post.mat, np.diag([1.0, 0.0]), 1e-12)

    def test_pure_prior_is_inferential_firewall(self, gen):
        # A pure prior is returned unchanged for every outcome of positive
        # probability. sqrt() of a numerically pure state amplifies eigenvalue
        # noise to ~sqrt(eps), so the comparison tolerance is 1e-6, not 1e-9.
        for _ in range(10):
            v = gen.standard_normal(3) + 1j * gen.standard_normal(3)
            gamma = DensityMatrix.pure(v)
            povm = random_pvm(3, gen)
            for x in range(3):
                p = float(np.trace(povm[x] @ gamma.mat).real)
                if p <= 1e-6:
                    continue
                post = bayesian_inverse(gamma, povm, x)
                assert maxabs(post.mat - gamma.mat) <= 1e-6

    def test_diagonal_case_matches_classical_bayes(self, gen):
        # scalar Bayes oracle on the diagonals
        d = 4
        spec = gen.dirichlet(np.ones(d))
        gamma = DensityMatrix(np.diag(spec).astype(complex))
        likelihood = gen.random((d, d))  # likelihood[x][s]
        likelihood /= likelihood.sum(axis=0, keepdims=True)
        povm = Povm(tuple(np.diag(likelihood[x]).astype(complex) for x in range(d)))
        for x in range(d):
            post = bayesian_inverse(gamma, povm, x)
            expected = spec * likelihood[x]
            expected /= expected.sum()
            assert_close(np.diag(post.mat).real, expected, 1e-10)

    def test_zero_probability_outcome_rejected(self):
        gamma = DensityMatrix(np.diag([1.0, 0.0]).astype(complex))
        with pytest.raises(ZeroProbabilityOutcomeError):
            bayesian_inverse(gamma, computational_pvm(2), 1)

    def test_outputs_are_valid_states(self, gen):
        for _ in range(20):
            gamma, m, _ = random_triple(gen, 3)
            for x in range(3):
                post = bayesian_inverse(gamma, m, x)
                assert float(np.trace(post.mat).real) == pytest.approx(1.0, abs=1e-10)


class TestForwardState:
    def test_trivial_povm_single_block(self, gen):
        gamma = random_density_matrix(3, gen)
        cq = forward_state(gamma, Povm((np.eye(3, dtype=complex),)))
        assert len(cq.blocks) == 1
        assert maxabs(cq.blocks[0] - gamma.mat) <= 1e-10

    def test_maximally_mixed_with_pvm(self, gen):
        d = 3
        gamma = DensityMatrix.maximally_mixed(d)
        pvm = random_pvm(d, gen)
        cq = forward_state(gamma, pvm)
        for block, proj in zip(cq.blocks, pvm.elements):
            assert maxabs(block - proj / d) <= 1e-10

    def test_system_marginal_recovers_state(self, gen):
        for povm in (False, True):
            for _ in range(10):
                gamma, m, _ = random_triple(gen, 3, n_outcomes=5, povm=povm)
                cq = forward_state(gamma, m)
                assert maxabs(cq.system_marginal() - gamma.mat) <= 1e-9

    def test_label_marginal_is_born_rule(self, gen):
        gamma, m, _ = random_triple(gen, 4)
        cq = forward_state(gamma, m)
        assert_close(cq.label_marginal(), m.outcome_probabilities(gamma), 1e-9)


class TestRetroJoint:
    def test_mub_maximally_mixed_uniform(self):
        for d in (2, 3, 5):
            gamma = DensityMatrix.maximally_mixed(d)
            m, n = mub_pair(d)
            joint = retro_joint(gamma, m, n)
            assert maxabs(joint.probs - 1.0 / d**2) <= 1e-12

    def test_deterministic_case(self):
        gamma = DensityMatrix(np.diag([1.0, 0.0]).astype(complex))
        pvm = computational_pvm(2)
        joint = retro_joint(gamma, pvm, pvm)
        expected = np.zeros((2, 2))
        expected[0, 0] = 1.0
        assert_close(joint.probs, expected, 1e-12)

    def test_equals_squared_frobenius_of_sqrt_product(self, gen):
        # independent oracle: ||sqrt(N_y) sqrt(g) sqrt(M_x)||_2^2 entry by entry
        for povm in (False, True):
            for _ in range(10):
                gamma, m, n = random_triple(gen, 3, n_outcomes=4, povm=povm)
                joint = retro_joint(gamma, m, n)
                sg = matrix_sqrt(gamma.mat)
                for x in range(m.n_outcomes):
                    for y in range(n.n_outcomes):
                        expected = schatten_norm(n.sqrts[y] @ sg @ m.sqrts[x], 2) ** 2
                        assert abs(joint.probs[x, y] - expected) <= 1e-10

    def test_symmetry_under_swap(self, gen):
        for povm in (False, True):
            for _ in range(25):
                gamma, m, n = random_triple(gen, 3, n_outcomes=4, povm=povm)
                a = retro_joint(gamma, m, n).probs
                b = retro_joint(gamma, n, m).probs
                assert maxabs(a - b.T) <= 1e-10

    def test_marginals_match_born_rule(self, gen):
        for _ in range(25):
            gamma, m, n = random_triple(gen, 4)
            joint = retro_joint(gamma, m, n)
            assert maxabs(joint.row_marginal - m.outcome_probabilities(gamma)) <= 1e-9
            assert maxabs(joint.col_marginal - n.outcome_probabilities(gamma)) <= 1e-9
            assert float(joint.probs.sum()) == pytest.approx(1.0, abs=1e-9)

    def test_dimension_mismatch_rejected(self, gen):
        gamma = random_density_matrix(2, gen)
        with pytest.raises(ValidationError):
            retro_joint(gamma, random_pvm(3, gen), random_pvm(3, gen))


class TestMutualRetrodictability:
    def test_pure_prior_vanishes(self, gen):
        for _ in range(10):
            v = gen.standard_normal(3) + 1j * gen.standard_normal(3)
            gamma = DensityMatrix.pure(v)
            m, n = random_pvm(3, gen), random_pvm(3, gen)
            assert abs(mutual_retrodictability(gamma, m, n)) <= 1e-12

    def test_eigenbasis_pvm_twice_saturates_entropy(self):
        # frozen oracle: binary entropy of 0.25 = 0.25*2 + 0.75*log2(4/3)
        gamma = DensityMatrix(np.diag([0.75, 0.25]).astype(complex))
        pvm = computational_pvm(2)
        r = mutual_retrodictability(gamma, pvm, pvm)
        expected = -(0.75 * np.log2(0.75) + 0.25 * np.log2(0.25))
        assert r == pytest.approx(0.8112781244591328, abs=1e-12)
        assert r == pytest.approx(expected, abs=1e-9)

    def test_mub_on_maximally_mixed_vanishes(self):
        for d in (2, 3, 5):
            gamma = DensityMatrix.maximally_mixed(d)
            m, n = mub_pair(d)
            assert abs(mutual_retrodictability(gamma, m, n)) <= 1e-12

    def test_bounded_by_prior_entropy(self, gen):
        # Monte-Carlo sweep of the two-sided bound (the acceptance suite runs 1e4/dim)
        for d in (2, 3, 4):
            for povm in (False, True):
                for _ in range(100):
                    gamma, m, n = random_triple(gen, d, n_outcomes=d + 1, povm=povm)
                    r = mutual_retrodictability(gamma, m, n)
                    assert r >= -1e-12
                    assert r <= von_neumann_entropy(gamma) + 1e-9

    def test_eigenbasis_equality_witness_random_states(self, gen):
        for _ in range(20):
            gamma = random_density_matrix(3, gen)
            w, v = np.linalg.eigh(gamma.mat)
            pvm = Povm(tuple(np.outer(v[:, k], v[:, k].conj()) for k in range(3)))
            r = mutual_retrodictability(gamma, pvm, pvm)
            assert abs(r - von_neumann_entropy(gamma)) <= 1e-9
