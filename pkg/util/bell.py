from typing import Optional

import numpy as np
from scipy.optimize import minimize

from structs.analyzer import AnalyzerSetting, BellReport, CorrelationMatrix
from structs.exceptions import InconsistentRoutes, ZeroCoincidence
from structs.polarization_state import PolarizationState
from structs.scattering_matrix import HybridMatrix
from structs.statistics import Statistics
from util.config import DEFAULT, Tolerances
from util.logger import CLogger
from util.scattering import realize_gram
from util.smallmat import PAULI_TRIPLE
from util.state import ZERO_TOL, state_from

log = CLogger().get_logger()

# Nelder-Mead iterations per refined candidate
MIN_BUDGET = 200
DEFAULT_BUDGET = 2000

AZIMUTHS = 24
POLAR_STEPS = 12
REFINED_CANDIDATES = 4

# |u2 - u3| below this counts as the crossing surface
BRANCH_TOL = 1e-12

U3_ACTIVE = "u3_active"
U2_ACTIVE = "u2_active"


def _local(rl: AnalyzerSetting, rr: AnalyzerSetting) -> np.ndarray:
    return np.kron(rl.rotation, rr.rotation)


def coincidence_probs(state: PolarizationState, rl: AnalyzerSetting, rr: AnalyzerSetting) -> np.ndarray:
    """
    p_HH, p_HV, p_VH, p_VV after the local rotations.
    """
    m = _local(rl, rr)
    rotated = m @ state.rho @ m.conj().T

    return np.real(np.diagonal(rotated)).copy()


def correlator_e(state: PolarizationState, rl: AnalyzerSetting, rr: AnalyzerSetting) -> float:
    """
    E as a ratio of coincidence counts: (p_HH + p_VV - p_HV - p_VH) / sum.
    """
    p = coincidence_probs(state, rl, rr)
    return float((p[0] + p[3] - p[1] - p[2]) / np.sum(p))


def correlator_trace(state: PolarizationState, rl: AnalyzerSetting, rr: AnalyzerSetting) -> float:
    """
    E = Tr rho (R_L^dag sigma_z R_L) x (R_R^dag sigma_z R_R).
    """
    return float(np.trace(state.rho @ np.kron(rl.observable(), rr.observable())).real)


def _direct_r(rho: np.ndarray) -> np.ndarray:
    return np.array([[np.trace(rho @ np.kron(a, b)).real for b in PAULI_TRIPLE] for a in PAULI_TRIPLE])


def _gamma_r(state: PolarizationState) -> np.ndarray:
    """
    R_kl = sum_k w_k Tr(gamma_k^dag sigma_k gamma_k sigma_l^T) / N with
    weights 1 + |a|^2 and 1 - |a|^2.
    """
    g = state.gammas
    weights = ((1 + state.alpha_sq, g.gamma1), (1 - state.alpha_sq, g.gamma2))

    R = np.zeros((3, 3))
    for k, a in enumerate(PAULI_TRIPLE):
        for l, b in enumerate(PAULI_TRIPLE):
            R[k, l] = sum(w * np.trace(gm.conj().T @ a @ gm @ b.T).real for w, gm in weights)

    return R / state.normalization


def gamma_route_deviation(state: PolarizationState) -> float:
    """
    Largest entry of |R_direct - R_gamma|, or 0 for a state without amplitudes.
    """
    if state.gammas is None:
        return 0.0

    return float(np.max(np.abs(_direct_r(state.rho) - _gamma_r(state))))


def correlation_matrix(state: PolarizationState, tol: float = DEFAULT.identity, strict: bool = True) -> CorrelationMatrix:
    """
    Direct trace evaluation of R. With `strict`, it is checked against the
    gamma form when the state carries its amplitudes.
    """
    R = _direct_r(state.rho)

    if not strict:
        return CorrelationMatrix(R=R)

    if np.max(np.abs(R)) > 1 + tol:
        raise InconsistentRoutes(details={"max_abs_R": float(np.max(np.abs(R)))})

    if state.gammas is not None:
        deviation = gamma_route_deviation(state)

        if deviation > tol:
            log.error("Correlation matrix routes disagree by %.3e", deviation)
            raise InconsistentRoutes(details={"deviation": deviation, "tol": tol})

    return CorrelationMatrix(R=R)


def u_eigen_closed(X: HybridMatrix, alpha_sq: float, statistics=Statistics.BOSONIC) -> tuple[float, float, float]:
    """
    Eigenvalues of R^T R from X^dag X and |alpha|^2 alone.

    u1, u2 = (T +- sqrt(T^2 - 4D)) / (2 N^2) and u3 = 4 |a|^4 |Tr g1^dag g1~|^2 / N^2, with

        T = N^2 + 4 |Tr g1^dag g1~|^2 - 4 (1 - |a|^4) (Tr g1^dag g1 Tr g2^dag g2 - (Tr g1^dag g2)^2)
        D = 4 |Tr g1^dag g1~|^2 (N^2 - 4 (1 - |a|^4) Tr g1^dag g1 Tr g2^dag g2)
    """
    inv = X.invariants
    n = inv.normalization(alpha_sq, statistics)

    if n <= ZERO_TOL:
        raise ZeroCoincidence(details={"normalization": n, "alpha_sq": alpha_sq})

    tilde_sq = inv.abs_tr_tilde ** 2
    t1, t2, t12 = inv.gamma_traces(statistics)
    mixing = 1 - alpha_sq ** 2

    trace = n ** 2 + 4 * tilde_sq - 4 * mixing * (t1 * t2 - t12 ** 2)
    det = 4 * tilde_sq * (n ** 2 - 4 * mixing * t1 * t2)
    root = np.sqrt(max(trace ** 2 - 4 * det, 0.0))

    u1 = (trace + root) / (2 * n ** 2)
    u2 = (trace - root) / (2 * n ** 2)
    u3 = 4 * alpha_sq ** 2 * tilde_sq / n ** 2

    return float(u1), float(max(u2, 0.0)), float(u3)


def active_branch(u2: float, u3: float) -> str:
    return U3_ACTIVE if u3 >= u2 - BRANCH_TOL else U2_ACTIVE


def emax_closed(X: HybridMatrix, alpha_sq: float, statistics=Statistics.BOSONIC) -> tuple[float, str, tuple]:
    u = u_eigen_closed(X, alpha_sq, statistics)
    value = float(2 * np.sqrt(u[0] + max(u[1], u[2])))

    return value, active_branch(u[1], u[2]), u


def emax(
    X: HybridMatrix,
    alpha_sq: float,
    statistics=Statistics.BOSONIC,
    state: Optional[PolarizationState] = None,
    tolerances: Tolerances = DEFAULT,
    horodecki: bool = True,
) -> BellReport:
    """
    E_max = 2 sqrt(u1 + max(u2, u3)) from the closed-form u's, checked against
    2 sqrt of the two largest eigenvalues of R^T R computed from rho.

    Without a state, rho is built on a splitter realizing X^dag X, which the
    closed forms claim is all that matters.
    """
    value, branch, u = emax_closed(X, alpha_sq, statistics)
    numerical = None

    if horodecki:
        if state is None:
            state = state_from(realize_gram(X.gram), alpha_sq, statistics)

        numerical = correlation_matrix(state, tol=tolerances.identity).horodecki()

        if abs(numerical - value) > tolerances.oracle:
            log.error("E_max routes disagree: closed %.12f, Horodecki %.12f", value, numerical)
            raise InconsistentRoutes(details={"closed": value, "horodecki": numerical})

    return BellReport(
        u1=u[0],
        u2=u[1],
        u3=u[2],
        emax_closed=value,
        emax_horodecki=numerical,
        emax_bruteforce=None,
        violating=value > 2 + tolerances.construction,
        branch=branch,
    )


# ======================================
# Brute-force CHSH
# ======================================


def chsh_value(
    state: PolarizationState,
    rl: AnalyzerSetting,
    rl_prime: AnalyzerSetting,
    rr: AnalyzerSetting,
    rr_prime: AnalyzerSetting,
) -> float:
    """
    |E(R_L, R_R) + E(R'_L, R_R) + E(R_L, R'_R) - E(R'_L, R'_R)| from coincidence ratios.
    """
    return abs(correlator_e(state, rl, rr) + correlator_e(state, rl_prime, rr)
               + correlator_e(state, rl, rr_prime) - correlator_e(state, rl_prime, rr_prime))


def _direction(theta, phi):
    return np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)


def _direction_grid() -> np.ndarray:
    polar = np.pi * (np.arange(POLAR_STEPS) + 0.5) / POLAR_STEPS
    azimuth = 2 * np.pi * np.arange(AZIMUTHS) / AZIMUTHS
    theta, phi = np.meshgrid(polar, azimuth, indexing="ij")

    return np.column_stack([theta.ravel(), phi.ravel()])


def _best_left(R: np.ndarray, b: np.ndarray, b_prime: np.ndarray) -> float:
    # max over unit a, a' of a.R(b + b') + a'.R(b - b')
    return np.linalg.norm(R @ (b + b_prime), axis=-1) + np.linalg.norm(R @ (b - b_prime), axis=-1)


def chsh_bruteforce(state: PolarizationState, budget: int = DEFAULT_BUDGET) -> float:
    """
    Searches analyzer settings for the largest CHSH value.

    For fixed right-hand axes b, b' the best left-hand axes are R(b + b') and
    R(b - b') normalized, so the search runs over (b, b'): every pair from a
    24 x 12 grid of directions, then Nelder-Mead from the best candidates with
    `budget` iterations each. The returned value is recomputed from
    coincidence ratios at the final settings.
    """
    if budget < MIN_BUDGET:
        raise ValueError(f"budget must be at least {MIN_BUDGET}, got {budget}")

    R = _direct_r(state.rho)
    grid = _direction_grid()
    dirs = _direction(grid[:, 0], grid[:, 1])

    plus = np.linalg.norm((dirs[:, None, :] + dirs[None, :, :]) @ R.T, axis=-1)
    minus = np.linalg.norm((dirs[:, None, :] - dirs[None, :, :]) @ R.T, axis=-1)
    scores = (plus + minus).ravel()

    # stable order keeps ties deterministic
    ranked = np.argsort(-scores, kind="stable")[:REFINED_CANDIDATES]

    def objective(x):
        return -_best_left(R, _direction(x[0], x[1]), _direction(x[2], x[3]))

    best_x, best_f = None, np.inf
    for flat in ranked:
        i, j = divmod(int(flat), len(grid))
        start = np.array([grid[i, 0], grid[i, 1], grid[j, 0], grid[j, 1]])
        result = minimize(objective, start, method="Nelder-Mead",
                          options={"maxiter": budget, "xatol": 1e-10, "fatol": 1e-14})

        if result.fun < best_f:
            best_x, best_f = result.x, result.fun

    b = _direction(best_x[0], best_x[1])
    b_prime = _direction(best_x[2], best_x[3])

    def left(v):
        return AnalyzerSetting.along(v) if np.linalg.norm(v) > 0 else AnalyzerSetting.identity()

    value = chsh_value(
        state,
        left(R @ (b + b_prime)),
        left(R @ (b - b_prime)),
        AnalyzerSetting.along(b),
        AnalyzerSetting.along(b_prime),
    )

    log.debug("Brute-force CHSH %.10f after refining %d candidates", value, len(ranked))

    return value