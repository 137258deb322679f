import numpy as np
import pytest

from mdiw import linalg
from mdiw.states import pauli, werner_state, singlet_ket, projector

I2 = np.eye(2)


def random_hermitian(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (m + m.conj().T) / 2


def kron_oracle(a, b):
    """Brute-force Kronecker product by direct index computation."""
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k, j * cb + l] = a[i, j] * b[k, l]
    return out


def partial_trace_oracle(m, dims, keep):
    """Brute-force partial trace by summing matrix entries directly."""
    n = len(dims)
    keep = sorted(keep)
    traced = [i for i in range(n) if i not in keep]
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    out = np.zeros((d_keep, d_keep), dtype=complex)

    def flat(multi):
        idx = 0
        for pos, d in enumerate(dims):
            idx = idx * d + multi[pos]
        return idx

    def flat_keep(multi):
        idx = 0
        for pos in keep:
            idx = idx * dims[pos] + multi[pos]
        return idx

    for row in np.ndindex(*dims):
        for col in np.ndindex(*dims):
            if all(row[t] == col[t] for t in traced):
                out[flat_keep(row), flat_keep(col)] += m[flat(row), flat(col)]
    return out


class TestKron:
    def test_identity_case(self):
        assert np.array_equal(linalg.kron(I2, I2), np.eye(4))

    def test_diagonal_product(self):
        assert np.allclose(linalg.kron(pauli(3), pauli(3)), np.diag([1, -1, -1, 1]))

    def test_flips_basis_state(self):
        # kron(X, X) |00> -> |11>, checked by direct index computation
        ket00 = np.zeros(4)
        ket00[0] = 1.0
        result = linalg.kron(pauli(1), pauli(1)) @ ket00
        expected = np.zeros(4)
        expected[3] = 1.0
        assert np.allclose(result, expected)

    def test_matches_index_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            a = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
            b = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
            assert np.allclose(linalg.kron(a, b), kron_oracle(a, b), atol=1e-14)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="NaN"):
            linalg.kron(np.array([[np.nan, 0], [0, 1]]), I2)


class TestPartialTrace:
    def test_product_state_factorization(self):
        rng = np.random.default_rng(5)
        rho = random_hermitian(rng, 3)
        sigma = random_hermitian(rng, 4)
        pt = linalg.partial_trace(linalg.kron(rho, sigma), (3, 4), keep={0})
        assert np.allclose(pt, np.trace(sigma) * rho, atol=1e-12)

    def test_singlet_marginal_is_maximally_mixed(self):
        proj = projector(singlet_ket())
        # frozen from the brute-force index sum below
        expected = partial_trace_oracle(proj, (2, 2), [0])
        assert np.allclose(expected, I2 / 2, atol=1e-15)
        assert np.allclose(linalg.partial_trace(proj, (2, 2), {0}), I2 / 2, atol=1e-14)

    def test_identity_case(self):
        assert np.allclose(linalg.partial_trace(np.eye(4), (2, 2), {1}), 2 * I2)

    def test_matches_index_oracle(self):
        rng = np.random.default_rng(6)
        for dims in [(2, 2), (2, 3), (2, 2, 2), (3, 2, 2)]:
            m = rng.normal(size=(int(np.prod(dims)),) * 2) + 1j * rng.normal(
                size=(int(np.prod(dims)),) * 2
            )
            for keep in [{0}, {len(dims) - 1}, set(range(len(dims)))]:
                got = linalg.partial_trace(m, dims, keep)
                want = partial_trace_oracle(m, dims, keep)
                assert np.allclose(got, want, atol=1e-13)

    def test_preserves_trace(self):
        rng = np.random.default_rng(7)
        m = random_hermitian(rng, 8)
        pt = linalg.partial_trace(m, (2, 2, 2), {1})
        assert np.isclose(np.trace(pt), np.trace(m), atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            linalg.partial_trace(np.eye(4), (2, 3), {0})


class TestTranspose:
    def test_pauli_y_flips_sign(self):
        assert np.array_equal(linalg.transpose(pauli(2)), -pauli(2))

    def test_symmetric_matrix_fixed(self):
        assert np.array_equal(linalg.transpose(pauli(1)), pauli(1))

    def test_involution(self):
        rng = np.random.default_rng(8)
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        assert np.array_equal(linalg.transpose(linalg.transpose(m)), m)

    def test_no_conjugation(self):
        m = np.array([[0, 1j], [0, 0]])
        assert np.array_equal(linalg.transpose(m), np.array([[0, 0], [1j, 0]]))


class TestHermitianEigenvalues:
    def test_identity(self):
        assert np.allclose(linalg.hermitian_eigenvalues(I2), [1, 1])

    def test_sigma_z(self):
        assert np.allclose(linalg.hermitian_eigenvalues(pauli(3)), [-1, 1])

    def test_rank_one_projector(self):
        eigs = linalg.hermitian_eigenvalues(projector(singlet_ket()))
        assert np.allclose(eigs, [0, 0, 0, 1], atol=1e-14)

    def test_ascending_and_sum_equals_trace(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            d = int(rng.integers(2, 17))
            m = random_hermitian(rng, d)
            eigs = linalg.hermitian_eigenvalues(m)
            assert np.all(np.diff(eigs) >= 0)
            assert abs(eigs.sum() - np.trace(m).real) < 1e-10

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            linalg.hermitian_eigenvalues(np.array([[0, 1], [0, 0]], dtype=complex))


class TestFrobeniusDistance:
    def test_zero_on_equal(self):
        m = pauli(1)
        assert linalg.frobenius_distance(m, m) == 0.0

    def test_identity_to_zero(self):
        assert np.isclose(linalg.frobenius_distance(I2, np.zeros((2, 2))), np.sqrt(2))

    def test_x_to_z(self):
        # entrywise: sqrt(1 + 1 + 1 + 1) = 2
        assert np.isclose(linalg.frobenius_distance(pauli(1), pauli(3)), 2.0)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            linalg.frobenius_distance(I2, np.eye(3))


class TestValidate:
    def test_maximally_mixed_is_density(self):
        assert linalg.validate(I2 / 2, "density").ok

    def test_sigma_z_not_psd(self):
        report = linalg.validate(pauli(3), "psd")
        assert not report.ok
        names = dict(report.violations)
        assert np.isclose(names["min_eigenvalue"], -1.0)

    def test_werner_half_is_density(self):
        rho = werner_state(0.5)
        assert linalg.validate(rho.matrix, "density").ok
        # spectrum (1+3v)/4, (1-v)/4 x3 at v = 0.5
        eigs = linalg.hermitian_eigenvalues(rho.matrix)
        assert np.allclose(eigs, [0.125, 0.125, 0.125, 0.625], atol=1e-12)

    def test_povm_element_above_identity_fails(self):
        assert not linalg.validate(2 * I2, "povm_element").ok

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            linalg.validate(I2, "unitary")


class TestPermuteSubsystems:
    def test_swap_two_factors(self):
        rng = np.random.default_rng(10)
        a = random_hermitian(rng, 2)
        b = random_hermitian(rng, 3)
        swapped = linalg.permute_subsystems(linalg.kron(a, b), (2, 3), (1, 0))
        assert np.allclose(swapped, linalg.kron(b, a), atol=1e-14)

    def test_three_factor_cycle(self):
        rng = np.random.default_rng(12)
        mats = [random_hermitian(rng, d) for d in (2, 3, 2)]
        full = linalg.kron_all(mats)
        cycled = linalg.permute_subsystems(full, (2, 3, 2), (2, 0, 1))
        assert np.allclose(cycled, linalg.kron_all([mats[2], mats[0], mats[1]]), atol=1e-13)

    def test_identity_permutation(self):
        rng = np.random.default_rng(13)
        m = rng.normal(size=(6, 6))
        assert np.allclose(linalg.permute_subsystems(m, (2, 3), (0, 1)), m)

    def test_invalid_permutation(self):
        with pytest.raises(ValueError):
            linalg.permute_subsystems(np.eye(4), (2, 2), (0, 0))


class TestInvariantSuite:
    """The randomized identities the package relies on everywhere."""

    def test_kron_associativity(self):
        rng = np.random.default_rng(20)
        for _ in range(200):
            a, b, c = (random_hermitian(rng, int(rng.integers(2, 4))) for _ in range(3))
            left = linalg.kron(linalg.kron(a, b), c)
            right = linalg.kron(a, linalg.kron(b, c))
            assert np.abs(left - right).max() < 1e-12

    def test_trace_multiplicative(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            a = random_hermitian(rng, int(rng.integers(2, 5)))
            b = random_hermitian(rng, int(rng.integers(2, 5)))
            assert abs(np.trace(linalg.kron(a, b)) - np.trace(a) * np.trace(b)) < 1e-12

    def test_partial_trace_of_product(self):
        rng = np.random.default_rng(22)
        for _ in range(200):
            da, db = rng.integers(2, 5, size=2)
            a, b = random_hermitian(rng, da), random_hermitian(rng, db)
            pt = linalg.partial_trace(linalg.kron(a, b), (da, db), {0})
            assert np.abs(pt - np.trace(b) * a).max() < 1e-12

    def test_transpose_preserves_hermitian_spectrum(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            m = random_hermitian(rng, int(rng.integers(2, 9)))
            ev = linalg.hermitian_eigenvalues(m)
            ev_t = linalg.hermitian_eigenvalues(linalg.transpose(m))
            assert np.abs(ev - ev_t).max() < 1e-10
