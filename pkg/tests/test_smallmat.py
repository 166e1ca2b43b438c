import numpy as np
import pytest

from structs.exceptions import MatrixFormatError, NotHermitian
from util.smallmat import (
    SIGMA_IN,
    as_cmat,
    det2,
    haar_unitary,
    herm_eigen,
    inner,
    is_unitary,
    matrix_from_dict,
    matrix_to_dict,
    pauli,
    per2,
    psd_sqrt,
    random_rank_one,
    svd2,
    tilde,
    unitarity_defect,
)

# ======================================
# 🔧 Helpers
# ======================================


def _random_hermitian(seed, n=4):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a + a.conj().T


# ======================================
# ✅ Construction
# ======================================


def test_as_cmat_rejects_wrong_shape():
    with pytest.raises(MatrixFormatError):
        as_cmat(np.zeros((2, 3)))

    with pytest.raises(MatrixFormatError):
        as_cmat(np.zeros((5, 5)))


def test_as_cmat_rejects_non_finite():
    with pytest.raises(MatrixFormatError):
        as_cmat([[1, np.nan], [0, 1]])


def test_as_cmat_checks_requested_size():
    with pytest.raises(MatrixFormatError):
        as_cmat(np.eye(4), 2)


def test_matrix_dict_keeps_row_major_order():
    m = np.array([[1 + 2j, 3], [4j, 5]])
    data = matrix_to_dict(m)

    assert data["re"] == [1.0, 3.0, 0.0, 5.0]
    assert data["im"] == [2.0, 0.0, 4.0, 0.0]
    assert np.array_equal(matrix_from_dict(data), m)


def test_matrix_from_dict_rejects_short_payload():
    with pytest.raises(MatrixFormatError):
        matrix_from_dict({"rows": 2, "cols": 2, "re": [1, 0, 0], "im": [0, 0, 0, 0]})


def test_matrix_from_dict_rejects_missing_keys():
    with pytest.raises(MatrixFormatError):
        matrix_from_dict({"rows": 2, "re": [1, 0, 0, 1]})


# ======================================
# 🎲 Haar sampling
# ======================================


@pytest.mark.parametrize("n", [2, 3, 4])
def test_haar_unitary_is_unitary(n):
    assert unitarity_defect(haar_unitary(n, 3)) < 1e-13


def test_haar_unitary_is_reproducible():
    assert np.array_equal(haar_unitary(4, 11), haar_unitary(4, 11))
    assert not np.array_equal(haar_unitary(4, 11), haar_unitary(4, 12))


def test_haar_unitary_rejects_size():
    with pytest.raises(ValueError):
        haar_unitary(5, 0)


def test_haar_phases_are_uniform():
    # |U_11|^2 of a Haar 2x2 unitary is uniform on [0, 1]: mean 1/2
    samples = [abs(haar_unitary(2, seed)[0, 0]) ** 2 for seed in range(2000)]
    assert abs(np.mean(samples) - 0.5) < 0.03


def test_random_rank_one_is_rank_one():
    sigma = random_rank_one(5)
    assert abs(det2(sigma)) < 1e-12 * np.linalg.norm(sigma) ** 2


# ======================================
# 🧮 Small-matrix algebra
# ======================================


def test_det_and_per():
    m = np.array([[1, 2], [3, 4]], dtype=complex)
    assert det2(m) == -2
    assert per2(m) == 10


def test_tilde_is_an_involution():
    g = random_rank_one(8) + random_rank_one(9)
    assert np.allclose(tilde(tilde(g)), g, atol=1e-14)


def test_input_amplitude_is_a_product():
    assert inner(SIGMA_IN, tilde(SIGMA_IN)) == 0


def test_herm_eigen_reconstructs():
    a = _random_hermitian(1)
    eig = herm_eigen(a)

    assert np.all(np.diff(eig.eigenvalues) <= 0)
    assert np.allclose(eig.reconstruct(), a, atol=1e-12)


def test_herm_eigen_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        herm_eigen(np.array([[1, 1], [0, 1]], dtype=complex))


def test_svd2_descends():
    u, s, v = svd2(random_rank_one(2) + 0.1 * np.eye(2))
    assert s[0] >= s[1]
    assert np.allclose(u @ np.diag(s) @ v, random_rank_one(2) + 0.1 * np.eye(2), atol=1e-13)


def test_psd_sqrt_squares_back():
    a = _random_hermitian(4)
    a = a @ a
    root = psd_sqrt(a)

    assert np.allclose(root @ root, a, atol=1e-9)


def test_is_unitary_needs_positive_tolerance():
    with pytest.raises(ValueError):
        is_unitary(np.eye(2), 0.0)


def test_pauli_algebra():
    x, y, z = pauli("x"), pauli("Y"), pauli("z")

    assert np.allclose(x @ y, 1j * z)
    assert np.allclose(z @ z, np.eye(2))

    with pytest.raises(ValueError):
        pauli("w")


@pytest.mark.parametrize("seed", range(8))
def test_unitary_congruence_of_sigma_y(seed):
    u = haar_unitary(2, seed)
    sigma_y = pauli("y")

    assert np.allclose(u @ sigma_y @ u.T, det2(u) * sigma_y, atol=1e-12)
