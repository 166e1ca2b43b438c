"""
Exact-size complex linear algebra for the 2x2, 3x3 and 4x4 matrices that
appear in the beam-splitter model.

Matrices are plain complex numpy arrays; `as_cmat` is the single entry point
that validates shape and finiteness.
"""

from typing import Union

import numpy as np

from structs.exceptions import MatrixFormatError, NotHermitian
from structs.herm_eigen import HermEigen
from util.logger import CLogger

log = CLogger().get_logger()

SIZES = (2, 3, 4)

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# (sigma_x + i sigma_y) / 2: H on the left input, V on the right input
SIGMA_IN = (SIGMA_X + 1j * SIGMA_Y) / 2

PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

# sigma_1, sigma_2, sigma_3 in correlation-matrix order
PAULI_TRIPLE = (SIGMA_X, SIGMA_Y, SIGMA_Z)

SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)

Seed = Union[int, np.random.Generator]


def pauli(axis: str) -> np.ndarray:
    try:
        return PAULI[axis.lower()].copy()

    except KeyError:
        raise ValueError(f"Pauli axis must be one of x, y, z; got {axis!r}")


def as_cmat(a, n: int = None) -> np.ndarray:
    """
    Converts `a` to a square complex matrix of size 2, 3 or 4 (or exactly `n`)
    with finite entries.
    """
    m = np.array(a, dtype=complex)

    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in SIZES:
        raise MatrixFormatError(details=f"Expected a 2x2, 3x3 or 4x4 matrix, got shape {m.shape}")

    if n is not None and m.shape[0] != n:
        raise MatrixFormatError(details=f"Expected a {n}x{n} matrix, got shape {m.shape}")

    if not np.all(np.isfinite(m)):
        raise MatrixFormatError(details="Matrix has non-finite entries")

    return m


def adjoint(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def det2(a: np.ndarray) -> complex:
    return a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]


def per2(a: np.ndarray) -> complex:
    return a[0, 0] * a[1, 1] + a[0, 1] * a[1, 0]


def tilde(g: np.ndarray) -> np.ndarray:
    """
    Spin flip of a 2x2 amplitude matrix: sigma_y g* sigma_y.
    """
    return SIGMA_Y @ g.conj() @ SIGMA_Y


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """
    Hilbert-Schmidt inner product Tr a^dagger b.
    """
    return complex(np.vdot(a, b))


def unitarity_defect(a: np.ndarray) -> float:
    return max_abs(adjoint(a) @ a - np.eye(a.shape[0]))


def is_unitary(a: np.ndarray, tol: float = 1e-10) -> bool:
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")

    return unitarity_defect(np.asarray(a, dtype=complex)) <= tol


def rng_from(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed

    return np.random.default_rng(seed)


def haar_unitary(n: int, seed: Seed) -> np.ndarray:
    """
    Haar-distributed n x n unitary.

    QR of an i.i.d. complex Gaussian matrix (numpy PCG64 via default_rng),
    with each column of Q multiplied by the phase of the matching diagonal
    entry of R so that the measure is exactly Haar. A fixed integer seed
    gives the same matrix on every run.
    """
    if n not in SIZES:
        raise ValueError(f"n must be one of {SIZES}, got {n}")

    rng = rng_from(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)

    return q * (d / np.abs(d))


def random_rank_one(seed: Seed) -> np.ndarray:
    """
    Random product polarization amplitude k l^T with Gaussian k, l.
    """
    rng = rng_from(seed)
    k = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    l = rng.standard_normal(2) + 1j * rng.standard_normal(2)

    return np.outer(k, l)


def hermiticity_defect(a: np.ndarray) -> float:
    return max_abs(a - adjoint(a))


def herm_eigen(a, rel_tol: float = 1e-10) -> HermEigen:
    """
    Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Raises NotHermitian when ||A - A^dagger||_max > rel_tol * ||A||_max.
    """
    m = as_cmat(a)
    defect = hermiticity_defect(m)

    if defect > rel_tol * max_abs(m):
        log.error("herm_eigen rejected input with Hermiticity defect %.3e", defect)
        raise NotHermitian(details={"defect": defect})

    values, vectors = np.linalg.eigh((m + adjoint(m)) / 2)

    return HermEigen(eigenvalues=values[::-1].copy(), eigenvectors=vectors[:, ::-1].copy())


def svd2(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    A = U diag(s) V with U, V unitary and s descending.
    """
    m = as_cmat(a, 2)
    u, s, vh = np.linalg.svd(m)

    return u, s, vh


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """
    Square root of a positive semidefinite Hermitian matrix; rounding
    negatives in the spectrum are clipped to zero.
    """
    eig = herm_eigen(a)
    roots = np.sqrt(np.clip(eig.eigenvalues, 0.0, None))
    v = eig.eigenvectors

    return (v * roots) @ adjoint(v)


def block(top_left, top_right, bottom_left, bottom_right) -> np.ndarray:
    return np.block([[top_left, top_right], [bottom_left, bottom_right]])


def matrix_to_dict(a: np.ndarray) -> dict:
    m = np.asarray(a, dtype=complex)

    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in m.real.ravel()],
        "im": [float(x) for x in m.imag.ravel()],
    }


def matrix_from_dict(data: dict) -> np.ndarray:
    """
    Reads {"rows", "cols", "re", "im"} (row-major); rejects wrong lengths.
    """
    try:
        rows = int(data["rows"])
        cols = int(data["cols"])
        re = [float(x) for x in data["re"]]
        im = [float(x) for x in data["im"]]

    except (KeyError, TypeError, ValueError) as e:
        raise MatrixFormatError(details=f"{type(e).__name__}: {e}")

    if rows != cols or rows not in SIZES:
        raise MatrixFormatError(details=f"Unsupported shape {rows}x{cols}")

    if len(re) != rows * cols or len(im) != rows * cols:
        raise MatrixFormatError(
            details=f"Expected {rows * cols} entries, got re={len(re)} im={len(im)}")

    m = (np.array(re) + 1j * np.array(im)).reshape(rows, cols)

    return as_cmat(m)
