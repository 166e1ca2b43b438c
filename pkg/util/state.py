import numpy as np

from structs.exceptions import ConfigError, InconsistentRoutes, ZeroCoincidence
from structs.polarization_state import ConcurrenceReport, MandelDip, PolarizationState
from structs.scattering_matrix import GammaPair, HybridMatrix, ScatteringMatrix
from structs.statistics import Statistics
from util.config import DEFAULT, Tolerances
from util.logger import CLogger
from util.scattering import gammas, hybrid
from util.smallmat import SIGMA_YY, herm_eigen, inner, psd_sqrt, tilde

log = CLogger().get_logger()

ZERO_TOL = 1e-14
CLAMP_TOL = 1e-10

# eigenvalues of rho below this are rounding, not weight
RANK_TOL = 1e-14


def _check_alpha_sq(alpha_sq: float):
    if not 0.0 <= alpha_sq <= 1.0:
        raise ConfigError(details=f"alpha_sq must lie in [0, 1], got {alpha_sq}")


def vec(g: np.ndarray) -> np.ndarray:
    """
    (g)_ij in basis order HH, HV, VH, VV.
    """
    return np.asarray(g).reshape(4)


def gamma_normalization(g: GammaPair, alpha_sq: float) -> float:
    return ((1 + alpha_sq) * inner(g.gamma1, g.gamma1).real
            + (1 - alpha_sq) * inner(g.gamma2, g.gamma2).real)


def build_rho(g: GammaPair, alpha_sq: float) -> PolarizationState:
    _check_alpha_sq(alpha_sq)

    n = gamma_normalization(g, alpha_sq)

    if n <= ZERO_TOL:
        log.warning("No coincidences survive post-selection, N = %.3e", n)
        raise ZeroCoincidence(details={"normalization": n, "alpha_sq": alpha_sq})

    v1, v2 = vec(g.gamma1), vec(g.gamma2)
    rho = ((1 + alpha_sq) * np.outer(v1, v1.conj()) + (1 - alpha_sq) * np.outer(v2, v2.conj())) / n

    return PolarizationState(
        rho=rho,
        alpha_sq=float(alpha_sq),
        statistics=g.statistics,
        gammas=g,
        normalization=float(n),
    )


def state_from(s: ScatteringMatrix, alpha_sq: float, statistics=Statistics.BOSONIC) -> PolarizationState:
    return build_rho(gammas(s, statistics), alpha_sq)


def _clamp(c: float) -> float:
    if c < -CLAMP_TOL or c > 1 + CLAMP_TOL:
        log.error("Concurrence %.6e outside [0, 1]", c)
        raise InconsistentRoutes(details={"concurrence": c})

    return min(max(c, 0.0), 1.0)


def coincidence_denominator(X: HybridMatrix, alpha_sq: float, statistics=Statistics.BOSONIC) -> float:
    """
    Tr X^dag X - (1+|a|^2) Per X^dag X - (1-|a|^2) Det X^dag X, with Det and
    Per trading places for fermions. Equals N / 2.
    """
    return X.invariants.normalization(alpha_sq, statistics) / 2


def concurrence_closed(X: HybridMatrix, alpha_sq: float, statistics=Statistics.BOSONIC) -> float:
    """
    C = 2 |a|^2 sqrt(Det X^dag X Det(1 - X^dag X)) / denominator.
    """
    _check_alpha_sq(alpha_sq)
    denominator = coincidence_denominator(X, alpha_sq, statistics)

    if denominator <= ZERO_TOL:
        raise ZeroCoincidence(details={"denominator": denominator, "alpha_sq": alpha_sq})

    return _clamp(alpha_sq * X.invariants.abs_tr_tilde / denominator)


def concurrence_gamma(g: GammaPair, alpha_sq: float) -> float:
    _check_alpha_sq(alpha_sq)
    n = gamma_normalization(g, alpha_sq)

    if n <= ZERO_TOL:
        raise ZeroCoincidence(details={"normalization": n, "alpha_sq": alpha_sq})

    return _clamp(2 * alpha_sq * abs(inner(g.gamma1, tilde(g.gamma1))) / n)


def spin_flip(rho: np.ndarray) -> np.ndarray:
    return SIGMA_YY @ rho.conj() @ SIGMA_YY


def wootters_roots(rho: np.ndarray) -> np.ndarray:
    """
    Square roots of the eigenvalues of rho rho~, descending.

    With rho = W W^dag (W the eigenvectors scaled by sqrt(p)), these are the
    singular values of the symmetric W^T (sigma_y x sigma_y) W, whose Gram
    matrix shares the nonzero spectrum of rho rho~. Working with singular
    values avoids square roots of eigenvalues at rounding level.
    """
    eig = herm_eigen(rho)
    keep = eig.eigenvalues > RANK_TOL
    w = eig.eigenvectors[:, keep] * np.sqrt(eig.eigenvalues[keep])

    roots = np.zeros(4)
    if w.shape[1]:
        flipped = w.T @ SIGMA_YY @ w
        singular = np.linalg.svd(flipped, compute_uv=False)
        roots[:singular.size] = singular

    return roots


def wootters_spectrum(rho: np.ndarray) -> np.ndarray:
    """
    Hermitian route to the eigenvalues of rho rho~: sqrt(rho) rho~ sqrt(rho).
    """
    root = psd_sqrt(rho)
    m = root @ spin_flip(rho) @ root

    return np.clip(herm_eigen((m + m.conj().T) / 2).eigenvalues, 0.0, None)


def concurrence_wootters(state: PolarizationState) -> float:
    roots = wootters_roots(state.rho)
    c = roots[0] - roots[1] - roots[2] - roots[3]

    return min(max(float(c), 0.0), 1.0)


def mandel_dip(X: HybridMatrix, alpha_sq: float, statistics=Statistics.BOSONIC) -> MandelDip:
    """
    Coincidence probability with and without two-photon interference. Bosons
    lose 2|a|^2 |(X^dag X)_HV|^2 to bunching; fermions gain it.
    """
    inv = X.invariants
    classical = inv.hh + inv.vv - 2 * inv.hh * inv.vv
    shift = 2 * alpha_sq * inv.hv_sq

    if Statistics.parse(statistics) is Statistics.BOSONIC:
        shift = -shift

    return MandelDip(dip=shift, classical_prob=classical, coincidence_prob=classical + shift)


def concurrence_report(
    s: ScatteringMatrix,
    alpha_sq: float,
    statistics=Statistics.BOSONIC,
    tolerances: Tolerances = DEFAULT,
) -> ConcurrenceReport:
    """
    All three concurrence routes for one splitter. Raises InconsistentRoutes
    when they disagree by more than the oracle tolerance.
    """
    X = hybrid(s)
    state = state_from(s, alpha_sq, statistics)
    dip = mandel_dip(X, alpha_sq, statistics)

    report = ConcurrenceReport(
        c_closed=concurrence_closed(X, alpha_sq, statistics),
        c_gamma=concurrence_gamma(state.gammas, alpha_sq),
        c_wootters=concurrence_wootters(state),
        mandel_dip=dip.dip,
        coincidence_prob=dip.coincidence_prob,
    )

    if report.disagreement() > tolerances.oracle:
        log.error("Concurrence routes disagree by %.3e", report.disagreement())
        raise InconsistentRoutes(details=report.to_dict())

    return report
