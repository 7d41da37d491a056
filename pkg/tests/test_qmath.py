import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from approxud.qmath import (
    DensityMatrix,
    PureState,
    StateEnsemble,
    fidelity,
    matrix_sqrt,
    max_entangled,
    partial_trace,
    projector,
    random_density_matrix,
    random_pure_state,
    trace_norm,
)

RNG = np.random.default_rng(20240817)


def basis_state(dim, k):
    v = np.zeros(dim, dtype=complex)
    v[k] = 1.0
    return v


class TestFidelity:
    def test_identical_states(self):
        rho = random_density_matrix(3, RNG)
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)

    def test_orthogonal_pure_states(self):
        r0 = DensityMatrix(projector(basis_state(2, 0)))
        r1 = DensityMatrix(projector(basis_state(2, 1)))
        assert fidelity(r0, r1) == pytest.approx(0.0, abs=1e-10)

    def test_depolarizing_pair_against_eigendecomposition_oracle(self):
        # oracle: build sqrt(rho_q) by explicit eigendecomposition and sum the
        # square roots of the eigenvalues of sqrt(rho_q) rho_p sqrt(rho_q)
        eta = 0.6
        plus = (basis_state(4, 0) + basis_state(4, 3)) / np.sqrt(2)
        minus = (basis_state(4, 0) - basis_state(4, 3)) / np.sqrt(2)
        rho_p = eta * projector(plus) + (1 - eta) * np.eye(4) / 4
        rho_q = eta * projector(minus) + (1 - eta) * np.eye(4) / 4

        w, v = np.linalg.eigh(rho_q)
        sq = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
        inner = sq @ rho_p @ sq
        oracle = float(np.sum(np.sqrt(np.clip(np.linalg.eigvalsh(inner), 0, None))))

        got = fidelity(DensityMatrix(rho_p), DensityMatrix(rho_q))
        assert got == pytest.approx(oracle, abs=1e-10)
        assert got == pytest.approx((0.4 + np.sqrt(1.12)) / 2, abs=1e-9)

    def test_symmetry(self):
        a = random_density_matrix(4, RNG)
        b = random_density_matrix(4, RNG)
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-8)

    def test_pure_state_overlap(self):
        for _ in range(5):
            psi = random_pure_state(3, RNG)
            phi = random_pure_state(3, RNG)
            expect = abs(psi.overlap(phi))
            assert fidelity(psi.density(), phi.density()) == pytest.approx(expect, abs=1e-8)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            fidelity(random_density_matrix(2, RNG), random_density_matrix(3, RNG))

    def test_non_psd_rejected(self):
        bad = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(ValueError):
            fidelity(bad, np.eye(2) / 2)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_range_and_discrimination(self, seed):
        rng = np.random.default_rng(seed)
        a = random_density_matrix(3, rng)
        b = random_density_matrix(3, rng)
        f = fidelity(a, b)
        assert 0.0 <= f <= 1.0
        if np.max(np.abs(a.mat - b.mat)) > 1e-3:
            assert f < 1.0 - 1e-9


class TestTraceNorm:
    def test_zero_matrix(self):
        assert trace_norm(np.zeros((3, 3))) == 0.0

    def test_diag_plus_minus(self):
        assert trace_norm(np.diag([1.0, -1.0])) == pytest.approx(2.0, abs=1e-12)

    def test_against_sdp_variational_oracle(self):
        # oracle: ||D||_1 = 2 max Tr(P D) - Tr(D) over 0 <= P <= I, solved as
        # a two-block SDP (P, I - P)
        from approxud.conesolver import ConeDims, solve_conelp, svec, svec_dim

        rho = random_density_matrix(2, RNG).mat
        sigma = random_density_matrix(2, RNG).mat
        diff = rho - sigma

        def realify(h):
            return np.block([[h.real, -h.imag], [h.imag, h.real]])

        ns = svec_dim(4)
        a = np.hstack([np.eye(ns), np.eye(ns)])
        b = svec(np.eye(4))
        c = np.concatenate([svec(realify(-diff) / 2), np.zeros(ns)])
        res = solve_conelp(c, a, b, ConeDims(psd=(4, 4)))
        max_trace = -res.pcost
        oracle = 2 * max_trace - np.trace(diff).real
        assert trace_norm(diff) == pytest.approx(oracle, abs=1e-7)

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            trace_norm(np.ones((2, 3)))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_half_distance_in_unit_interval(self, seed):
        rng = np.random.default_rng(seed)
        a = random_density_matrix(3, rng)
        b = random_density_matrix(3, rng)
        t = trace_norm(a.mat - b.mat) / 2
        assert -1e-12 <= t <= 1.0 + 1e-12
        assert trace_norm(a.mat - a.mat) == 0.0


class TestMaxEntangled:
    def test_two_qubits(self):
        z = max_entangled(2)
        expect = np.zeros(4)
        expect[0] = expect[3] = 1 / np.sqrt(2)
        np.testing.assert_allclose(z.amplitudes, expect, atol=1e-14)

    def test_qutrits(self):
        z = max_entangled(3)
        assert z.dim == 9
        nonzero = [0, 4, 8]
        np.testing.assert_allclose(z.amplitudes[nonzero], np.full(3, 1 / np.sqrt(3)), atol=1e-14)
        rest = np.delete(z.amplitudes, nonzero)
        np.testing.assert_allclose(rest, 0, atol=1e-14)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_reduced_state_is_maximally_mixed(self, d):
        z = max_entangled(d).density()
        for side in ("A", "B"):
            red = partial_trace(z, d, d, trace_out=side)
            np.testing.assert_allclose(red.mat, np.eye(d) / d, atol=1e-12)

    def test_rejects_trivial_dimension(self):
        with pytest.raises(ValueError):
            max_entangled(1)


class TestPartialTrace:
    def test_product_state(self):
        a = random_density_matrix(2, RNG)
        b = random_density_matrix(3, RNG)
        joint = DensityMatrix(np.kron(a.mat, b.mat))
        np.testing.assert_allclose(partial_trace(joint, 2, 3, "B").mat, a.mat, atol=1e-12)
        np.testing.assert_allclose(partial_trace(joint, 2, 3, "A").mat, b.mat, atol=1e-12)

    def test_against_index_contraction_oracle(self):
        rho = random_density_matrix(4, RNG)
        t = rho.mat.reshape(2, 2, 2, 2)
        oracle = np.zeros((2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    oracle[i, j] += t[i, k, j, k]
        np.testing.assert_allclose(partial_trace(rho, 2, 2, "B").mat, oracle, atol=1e-12)

    def test_trace_and_psd_preserved(self):
        rho = random_density_matrix(6, RNG)
        red = partial_trace(rho, 2, 3, "A")
        assert np.trace(red.mat).real == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.eigvalsh(red.mat).min() >= -1e-12

    def test_bad_factorization(self):
        rho = random_density_matrix(6, RNG)
        with pytest.raises(ValueError):
            partial_trace(rho, 4, 2)


class TestMatrixSqrt:
    def test_identity(self):
        np.testing.assert_allclose(matrix_sqrt(np.eye(3)), np.eye(3), atol=1e-12)

    def test_diagonal(self):
        np.testing.assert_allclose(matrix_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-12)

    def test_square_recovers_input(self):
        m = random_density_matrix(5, RNG).mat
        s = matrix_sqrt(m)
        assert np.linalg.norm(s @ s - m) < 1e-8

    def test_clamps_tiny_negative(self):
        m = np.diag([1.0, -5e-11]).astype(complex)
        s = matrix_sqrt(m)
        np.testing.assert_allclose(s, np.diag([1.0, 0.0]), atol=1e-5)

    def test_rejects_genuinely_negative(self):
        with pytest.raises(ValueError, match="non-PSD"):
            matrix_sqrt(np.diag([1.0, -1e-6]))


class TestTypes:
    def test_density_matrix_rejects_non_hermitian(self):
        m = np.array([[0.5, 0.3], [0.0, 0.5]], dtype=complex)
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix(m)

    def test_density_matrix_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(np.eye(2, dtype=complex))

    def test_density_matrix_rejects_negative_eigenvalue(self):
        with pytest.raises(ValueError, match="negative"):
            DensityMatrix(np.diag([1.5, -0.5]).astype(complex))

    def test_unchecked_constructor_skips_validation(self):
        dm = DensityMatrix.unchecked(np.eye(2, dtype=complex))
        assert dm.dim == 2

    def test_pure_state_norm(self):
        with pytest.raises(ValueError, match="unit norm"):
            PureState(np.array([1.0, 1.0]))

    def test_ensemble_validation(self):
        a = random_density_matrix(2, RNG)
        b = random_density_matrix(2, RNG)
        with pytest.raises(ValueError, match="at least two"):
            StateEnsemble((a,), np.array([1.0]))
        with pytest.raises(ValueError, match="sum to 1"):
            StateEnsemble((a, b), np.array([0.7, 0.2]))
        with pytest.raises(ValueError, match="nonnegative"):
            StateEnsemble((a, b), np.array([1.5, -0.5]))
        c = random_density_matrix(3, RNG)
        with pytest.raises(ValueError, match="dimensions"):
            StateEnsemble((a, c), np.array([0.5, 0.5]))
