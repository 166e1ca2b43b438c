"""
Joint semi-polar decomposition of (gamma_1, gamma_2) and the correlation
matrix R' it produces.
"""

import numpy as np
from scipy.linalg import expm

from structs.exceptions import DegenerateXi, InconsistentRoutes
from structs.scattering_matrix import GammaPair, HybridMatrix, ScatteringMatrix
from structs.semi_polar import ConsistencyReport, RPrime, SemiPolar
from structs.statistics import Statistics
from util.config import DEFAULT
from util.logger import CLogger
from util.scattering import gammas, make_scattering
from util.smallmat import adjoint, herm_eigen, inner, is_unitary, svd2, tilde

log = CLogger().get_logger()

# below this xi_2 leaves c2 undetermined by A'12
XI_FLOOR = 1e-14

# step used to leave the degenerate-xi surface
NUDGE = 1e-9
NUDGE_GENERATOR = np.array([
    [0.0, 1.0, 0.3, 0.0],
    [1.0, 0.0, 0.0, 0.7],
    [0.3, 0.0, 0.0, 0.5],
    [0.0, 0.7, 0.5, 0.0],
])


def xi_from_traces(g: GammaPair) -> np.ndarray:
    """
    xi_1 + xi_2 = Tr g2^dag g2 and 2 sqrt(xi_1 xi_2) = |Tr g2^dag g2~|.
    """
    total = inner(g.gamma2, g.gamma2).real
    product = (abs(inner(g.gamma2, tilde(g.gamma2))) / 2) ** 2
    spread = np.sqrt(max(total ** 2 - 4 * product, 0.0))

    return np.array([(total + spread) / 2, (total - spread) / 2])


def semi_polar(g: GammaPair, tol: float = DEFAULT.identity) -> SemiPolar:
    """
    Factors gamma_2 = U sqrt(xi) V by SVD, reads A = U^dag gamma_1 V^dag, and
    moves the phase of A's off-diagonal into U and V so that A = Q sqrt(xi)
    with Q real.
    """
    u0, s, v0 = svd2(g.gamma2)
    xi = s ** 2

    if xi[0] - xi[1] <= tol:
        log.warning("Semi-polar decomposition refused, xi = %s", xi)
        raise DegenerateXi(details={"xi": xi.tolist()})

    a = adjoint(u0) @ g.gamma1 @ adjoint(v0)

    if abs(a[0, 1]) >= abs(a[1, 0]):
        phase = float(np.angle(a[0, 1]))
    else:
        phase = -float(np.angle(a[1, 0]))

    a12 = (a[0, 1] * np.exp(-1j * phase)).real
    a21 = (a[1, 0] * np.exp(1j * phase)).real

    if a12 < 0 or (a12 == 0 and a21 < 0):
        a12, a21 = -a12, -a21
        phase += np.pi

    half = np.exp(0.5j * phase)
    U = u0 @ np.diag([half, np.conj(half)])
    V = np.diag([np.conj(half), half]) @ v0

    if not (is_unitary(U, tol) and is_unitary(V, tol)):
        raise InconsistentRoutes(details="Phase absorption broke unitarity")

    root = np.sqrt(xi)
    c1 = float(a[0, 0].real / root[0])
    c3 = float(a21 / root[0])

    if xi[1] > XI_FLOOR:
        c2 = float(a12 / root[1])
    elif c3 != 0:
        c2 = (1 - c1 ** 2) / c3
    else:
        c2 = 0.0

    c1_trace = float(inner(g.gamma1, g.gamma2).real / (xi[0] - xi[1]))

    return SemiPolar(
        U=U,
        V=V,
        xi=xi,
        Q=np.array([[c1, c2], [c3, -c1]]),
        phase=phase,
        c1_trace=c1_trace,
        xi_from_traces=xi_from_traces(g),
    )


def consistency_check(X: HybridMatrix) -> ConsistencyReport:
    """
    Rebuilds xi and c1 from the spectrum of X^dag X = W^dag Lambda W and
    solves A'12 A'21 = P, A'12^2 + A'21^2 = S with

        P = sin^2(2 eta) sqrt(L1 L2 (1 - L1) (1 - L2))
        S = sin^2(2 eta) (L1 (1 - L1) + L2 (1 - L2))

    where |W11| = cos(eta).
    """
    eig = herm_eigen(X.gram)
    lambdas = np.clip(eig.eigenvalues, 0.0, 1.0)
    W = adjoint(eig.eigenvectors)
    l1, l2 = lambdas

    xi = np.array([l1 * (1 - l2), l2 * (1 - l1)])

    inv = X.invariants
    xi_deviation = max(
        abs(xi[0] + xi[1] - (inv.trace - 2 * inv.det)),
        abs(2 * np.sqrt(xi[0] * xi[1]) - inv.abs_tr_tilde),
    )

    c1 = float(abs(W[0, 0]) ** 2 - abs(W[0, 1]) ** 2)
    c1_deviation = None
    if xi[0] - xi[1] > DEFAULT.identity:
        c1_deviation = abs(c1 - inv.trace_sigma_z / (xi[0] - xi[1]))

    sin_sq = 1 - c1 ** 2
    product = sin_sq * np.sqrt(l1 * l2 * (1 - l1) * (1 - l2))
    square_sum = sin_sq * (l1 * (1 - l1) + l2 * (1 - l2))

    if 2 * product > square_sum + 1e-12:
        log.error("No real (A'12, A'21): 2P = %.6e > S = %.6e", 2 * product, square_sum)

    upper = np.sqrt(max(square_sum + 2 * product, 0.0))
    lower = np.sqrt(max(square_sum - 2 * product, 0.0))

    return ConsistencyReport(
        lambdas=lambdas,
        W=W,
        xi=xi,
        xi_deviation=float(xi_deviation),
        c1=c1,
        c1_deviation=c1_deviation,
        sin_sq_2eta=float(sin_sq),
        product=float(product),
        square_sum=float(square_sum),
        a12=float((upper + lower) / 2),
        a21=float((upper - lower) / 2),
    )


def r_prime(sp: SemiPolar, alpha_sq: float, n: float) -> RPrime:
    """
    R' from (c1, c2, c3), xi and |alpha|^2, normalized by N.
    """
    c1, c2, c3 = sp.c1, sp.c2, sp.c3
    x1, x2 = sp.xi
    root = np.sqrt(x1 * x2)
    plus, minus = 1 + alpha_sq, 1 - alpha_sq

    return RPrime(
        r11=2 / n * (minus - plus * (c1 ** 2 - c2 * c3)) * root,
        r13=2 / n * plus * c1 * (c2 * x2 + c3 * x1),
        r22=2 / n * (-minus + plus * (c1 ** 2 + c2 * c3)) * root,
        r31=2 / n * plus * c1 * (c2 + c3) * root,
        r33=(minus + plus * c1 ** 2) * (x1 + x2) / n - plus * (c2 ** 2 * x2 + c3 ** 2 * x1) / n,
        normalization=n,
    )


def semi_polar_nudged(s: ScatteringMatrix, statistics=Statistics.BOSONIC, tol: float = DEFAULT.identity) -> tuple[SemiPolar, bool]:
    """
    semi_polar on the gammas of S, retried once on S exp(i NUDGE G) when xi
    is degenerate. The flag tells whether the nudge was applied.
    """
    try:
        return semi_polar(gammas(s, statistics), tol), False

    except DegenerateXi as e:
        nudged = make_scattering(s.S @ expm(1j * NUDGE * NUDGE_GENERATOR))
        log.warning("Degenerate xi %s, retrying on S perturbed by %.0e", e.details, NUDGE)

    return semi_polar(gammas(nudged, statistics), tol), True
