from dataclasses import dataclass

import numpy as np

from structs.exceptions import NotUnitary
from structs.statistics import Statistics
from util.logger import CLogger
from util.smallmat import adjoint, as_cmat, herm_eigen, max_abs, unitarity_defect

log = CLogger().get_logger()


class ScatteringMatrix:
    """
    Unitary 4x4 beam-splitter matrix with 2x2 blocks

        ( r   t' )
        ( t   r' )

    acting on (a_H, a_V, b_H, b_V): a is the left input, b the right input;
    the top rows are the left output c, the bottom rows the right output d.
    """

    def __init__(self, S: np.ndarray):
        self.S = S
        self.r = S[:2, :2]
        self.t_prime = S[:2, 2:]
        self.t = S[2:, :2]
        self.r_prime = S[2:, 2:]

    @classmethod
    def create(cls, S, tol: float = 1e-10) -> "ScatteringMatrix":
        m = as_cmat(S, 4)
        defect = unitarity_defect(m)

        if defect > tol:
            log.error("Rejected scattering matrix, unitarity defect %.3e", defect)
            raise NotUnitary(details={"defect": defect, "tol": tol})

        m.setflags(write=False)
        return cls(m)

    def block_defects(self) -> tuple[float, float]:
        """
        ||r^dag r + t^dag t - 1|| and ||r'^dag r' + t'^dag t' - 1||.
        """
        one = np.eye(2)
        left = adjoint(self.r) @ self.r + adjoint(self.t) @ self.t - one
        right = adjoint(self.r_prime) @ self.r_prime + adjoint(self.t_prime) @ self.t_prime - one

        return max_abs(left), max_abs(right)


@dataclass(frozen=True)
class GramInvariants:
    """
    Scalars of G = X^dag X that every closed form is written in.
    """
    trace: float
    det: float
    per: float
    det_complement: float
    trace_sigma_z: float
    hh: float
    vv: float
    hv_sq: float

    @classmethod
    def of(cls, gram: np.ndarray) -> "GramInvariants":
        hh = float(gram[0, 0].real)
        vv = float(gram[1, 1].real)
        hv_sq = float(abs(gram[0, 1]) ** 2)

        return cls(
            trace=hh + vv,
            det=hh * vv - hv_sq,
            per=hh * vv + hv_sq,
            det_complement=(1 - hh) * (1 - vv) - hv_sq,
            trace_sigma_z=hh - vv,
            hh=hh,
            vv=vv,
            hv_sq=hv_sq,
        )

    @property
    def abs_tr_tilde(self) -> float:
        """
        |Tr gamma_1^dag tilde(gamma_1)| = 2 sqrt(Det G Det(1 - G)).
        """
        return 2.0 * float(np.sqrt(max(self.det * self.det_complement, 0.0)))

    def gamma_traces(self, statistics: Statistics = Statistics.BOSONIC) -> tuple[float, float, float]:
        """
        (Tr g1^dag g1, Tr g2^dag g2, Tr g1^dag g2) for the given statistics.
        """
        tr_g1g1 = self.trace - 2 * self.per
        tr_g2g2 = self.trace - 2 * self.det

        if Statistics.parse(statistics) is Statistics.FERMIONIC:
            tr_g1g1, tr_g2g2 = tr_g2g2, tr_g1g1

        return tr_g1g1, tr_g2g2, self.trace_sigma_z

    def normalization(self, alpha_sq: float, statistics: Statistics = Statistics.BOSONIC) -> float:
        """
        N = (1 + |a|^2) Tr g1^dag g1 + (1 - |a|^2) Tr g2^dag g2.
        """
        tr_g1g1, tr_g2g2, _ = self.gamma_traces(statistics)

        return (1 + alpha_sq) * tr_g1g1 + (1 - alpha_sq) * tr_g2g2


class HybridMatrix:
    """
    X = ((r_HH, t'_HV), (r_VH, t'_VV)) and its Gram matrix X^dag X.
    """

    def __init__(self, X: np.ndarray, gram: np.ndarray):
        self.X = X
        self.gram = gram
        self.invariants = GramInvariants.of(gram)

    @classmethod
    def create(cls, X) -> "HybridMatrix":
        m = as_cmat(X, 2)
        gram = adjoint(m) @ m
        gram = (gram + adjoint(gram)) / 2

        return cls(m, gram)

    @classmethod
    def from_gram(cls, gram) -> "HybridMatrix":
        """
        Builds X = sqrt(Lambda) V^dag from G = V Lambda V^dag, so X^dag X = G.
        """
        eig = herm_eigen(gram)
        roots = np.sqrt(np.clip(eig.eigenvalues, 0.0, None))

        return cls.create(roots[:, None] * adjoint(eig.eigenvectors))

    def spectrum(self) -> np.ndarray:
        return herm_eigen(self.gram).eigenvalues


@dataclass(frozen=True)
class GammaPair:
    """
    Scattered two-photon amplitudes: gamma_1 carries the exchange-symmetric
    part, gamma_2 the antisymmetric part (swapped for fermions).
    """
    gamma1: np.ndarray
    gamma2: np.ndarray
    statistics: Statistics = Statistics.BOSONIC


@dataclass(frozen=True)
class IdentityPair:
    closed: float
    direct: float

    @property
    def deviation(self) -> float:
        return abs(self.closed - self.direct)


@dataclass(frozen=True)
class TraceIdentities:
    """
    Each trace of the gamma matrices evaluated from X^dag X (closed) and from
    the gammas themselves (direct), plus the tilde inner products that must
    vanish or cancel.
    """
    abs_tr_g1tg1: IdentityPair
    tr_g1g1: IdentityPair
    tr_g2g2: IdentityPair
    tr_g1g2: IdentityPair
    tr_g1tg2: complex
    tr_g2tg1: complex
    tilde_sum: complex

    def max_deviation(self) -> float:
        pairs = (self.abs_tr_g1tg1, self.tr_g1g1, self.tr_g2g2, self.tr_g1g2)
        orthogonality = (abs(self.tr_g1tg2), abs(self.tr_g2tg1), abs(self.tilde_sum))

        return max(max(p.deviation for p in pairs), max(orthogonality))


@dataclass(frozen=True)
class PolarDecomposition:
    """
    S = diag(K', L') ((sqrt(1-T), i sqrt(T)), (i sqrt(T), sqrt(1-T))) diag(K, L).
    """
    k_prime: np.ndarray
    l_prime: np.ndarray
    k: np.ndarray
    l: np.ndarray
    transmission: np.ndarray

    def reassemble(self) -> np.ndarray:
        zero = np.zeros((2, 2))
        outer = np.block([[self.k_prime, zero], [zero, self.l_prime]])
        inner = np.block([[self.k, zero], [zero, self.l]])
        reflect = np.diag(np.sqrt(1 - self.transmission))
        transmit = 1j * np.diag(np.sqrt(self.transmission))
        middle = np.block([[reflect, transmit], [transmit, reflect]])

        return outer @ middle @ inner
