import re
from dataclasses import dataclass

import numpy as np

from structs.exceptions import DegenerateTransmission, NotRankOne
from structs.scattering_matrix import (
    GammaPair,
    HybridMatrix,
    IdentityPair,
    PolarDecomposition,
    ScatteringMatrix,
    TraceIdentities,
)
from structs.statistics import Statistics
from util.config import DEFAULT
from util.logger import CLogger
from util.smallmat import (
    SIGMA_IN,
    adjoint,
    as_cmat,
    block,
    det2,
    haar_unitary,
    herm_eigen,
    inner,
    tilde,
)

log = CLogger().get_logger()

SQRT_HALF = 1 / np.sqrt(2)


def make_scattering(S, tol: float = DEFAULT.identity) -> ScatteringMatrix:
    return ScatteringMatrix.create(S, tol=tol)


def hybrid(s: ScatteringMatrix) -> HybridMatrix:
    X = np.array([
        [s.r[0, 0], s.t_prime[0, 1]],
        [s.r[1, 0], s.t_prime[1, 1]],
    ])

    return HybridMatrix.create(X)


def gammas(s: ScatteringMatrix, statistics=Statistics.BOSONIC) -> GammaPair:
    statistics = Statistics.parse(statistics)

    direct = s.r @ SIGMA_IN @ s.r_prime.T
    exchanged = s.t_prime @ SIGMA_IN.T @ s.t.T
    gamma1 = direct + exchanged
    gamma2 = direct - exchanged

    if statistics is Statistics.FERMIONIC:
        gamma1, gamma2 = gamma2, gamma1

    return GammaPair(gamma1=gamma1, gamma2=gamma2, statistics=statistics)


def trace_identities(s: ScatteringMatrix) -> TraceIdentities:
    """
    Evaluates each gamma trace both from X^dag X and from the bosonic gammas.
    The caller decides what deviation is acceptable.
    """
    g = gammas(s, Statistics.BOSONIC)
    inv = hybrid(s).invariants
    g1, g2 = g.gamma1, g.gamma2

    tr_g1tg1 = inner(g1, tilde(g1))
    tr_g2tg2 = inner(g2, tilde(g2))

    return TraceIdentities(
        abs_tr_g1tg1=IdentityPair(closed=inv.abs_tr_tilde, direct=abs(tr_g1tg1)),
        tr_g1g1=IdentityPair(closed=inv.trace - 2 * inv.per, direct=inner(g1, g1).real),
        tr_g2g2=IdentityPair(closed=inv.trace - 2 * inv.det, direct=inner(g2, g2).real),
        tr_g1g2=IdentityPair(closed=inv.trace_sigma_z, direct=inner(g1, g2)),
        tr_g1tg2=inner(g1, tilde(g2)),
        tr_g2tg1=inner(g2, tilde(g1)),
        tilde_sum=tr_g1tg1 + tr_g2tg2,
    )


@dataclass(frozen=True)
class SpanDeterminants:
    det_gram: float
    det_gram_span: float
    det_complement: float
    det_complement_span: float


def _span(a: np.ndarray, b: np.ndarray) -> float:
    # |a|^2 |b|^2 (1 - |a.b|^2 / (|a|^2 |b|^2)) without the division
    return float(np.vdot(a, a).real * np.vdot(b, b).real - abs(np.vdot(a, b)) ** 2)


def span_determinants(s: ScatteringMatrix) -> SpanDeterminants:
    """
    Det X^dag X and Det(1 - X^dag X) from the Gram matrix and from the spans of
    (r_H, t'_V) on the left and (t_H, r'_V) on the right.
    """
    inv = hybrid(s).invariants

    return SpanDeterminants(
        det_gram=inv.det,
        det_gram_span=_span(s.r[:, 0], s.t_prime[:, 1]),
        det_complement=inv.det_complement,
        det_complement_span=_span(s.t[:, 0], s.r_prime[:, 1]),
    )


def polar_decompose_s(s: ScatteringMatrix, tol: float = DEFAULT.identity) -> PolarDecomposition:
    """
    Factors S into diag(K', L'), the transmission core with T = (T_H, T_V)
    ascending, and diag(K, L).
    """
    u, singular, vh = np.linalg.svd(s.t)
    u, singular, vh = u[:, ::-1], singular[::-1], vh[::-1, :]
    transmission = singular ** 2

    if abs(transmission[1] - transmission[0]) < tol:
        log.warning("Polar decomposition refused, T = %s is degenerate", transmission)
        raise DegenerateTransmission(details={"transmission": transmission.tolist()})

    if transmission[0] < tol or transmission[1] > 1 - tol:
        log.warning("Polar decomposition refused, T = %s touches 0 or 1", transmission)
        raise DegenerateTransmission(details={"transmission": transmission.tolist()})

    # t = i L' sqrt(T) K
    k = vh
    l_prime = -1j * u

    k_prime = s.r @ adjoint(k) @ np.diag(1 / np.sqrt(1 - transmission))
    l = -1j * np.diag(1 / np.sqrt(transmission)) @ adjoint(k_prime) @ s.t_prime

    return PolarDecomposition(
        k_prime=k_prime,
        l_prime=l_prime,
        k=k,
        l=l,
        transmission=transmission,
    )


def outgoing_matrix(s: ScatteringMatrix, sigma) -> np.ndarray:
    """
    Two-photon amplitude matrix over (c_H, c_V, d_H, d_V) x (c_H, c_V, d_H, d_V)
    for an input polarization matrix sigma.
    """
    sigma = as_cmat(sigma, 2)

    return block(
        s.r @ sigma @ s.t_prime.T,
        s.r @ sigma @ s.r_prime.T,
        s.t @ sigma @ s.t_prime.T,
        s.t @ sigma @ s.r_prime.T,
    )


def _unit_completion(k: np.ndarray) -> np.ndarray:
    # unitary with first column k
    return np.array([[k[0], -np.conj(k[1])], [k[1], np.conj(k[0])]])


def canonicalize_input(s: ScatteringMatrix, sigma_general, tol: float = DEFAULT.identity) -> ScatteringMatrix:
    """
    Returns S' = S diag(K2, L2) where sigma_general = |sigma| K2 sigma_in L2^T,
    so that S' scattering sigma_in reproduces S scattering sigma_general up to
    normalization. Phases go on the left factor.
    """
    sigma = as_cmat(sigma_general, 2)
    norm = float(np.linalg.norm(sigma))

    if norm <= tol:
        raise NotRankOne(details={"norm": norm})

    if abs(det2(sigma)) > tol * norm ** 2:
        raise NotRankOne(details={"det": complex(det2(sigma)), "norm": norm})

    u, _, vh = np.linalg.svd(sigma)
    k = u[:, 0]
    l = vh[0, :]

    pivot = int(np.argmax(np.abs(l)))
    phase = l[pivot] / abs(l[pivot])
    l = l / phase
    k = k * phase

    k2 = _unit_completion(k)
    # second column of L2 is l
    l2 = np.array([[np.conj(l[1]), l[0]], [-np.conj(l[0]), l[1]]])

    zero = np.zeros((2, 2))
    local = np.block([[k2, zero], [zero, l2]])

    return ScatteringMatrix.create(s.S @ local)


# ======================================
# Presets and constructed splitters
# ======================================


def rotation(theta: float) -> np.ndarray:
    c, sn = np.cos(theta), np.sin(theta)
    return np.array([[c, -sn], [sn, c]], dtype=complex)


def balanced_pc() -> ScatteringMatrix:
    """
    50/50 polarization-conserving splitter: r = r' = 1/sqrt2, t = t' = i/sqrt2.
    """
    one = np.eye(2)
    return ScatteringMatrix.create(block(SQRT_HALF * one, 1j * SQRT_HALF * one,
                                         1j * SQRT_HALF * one, SQRT_HALF * one))


def balanced_mixing(theta: float) -> ScatteringMatrix:
    """
    Balanced splitter with a polarization rotation by theta on the right
    input port, giving |(X^dag X)_HV|^2 = sin^2(theta) / 4.
    """
    zero = np.zeros((2, 2))
    turn = np.block([[np.eye(2), zero], [zero, rotation(theta)]])

    return ScatteringMatrix.create(balanced_pc().S @ turn)


PRESET_PATTERN = re.compile(r"^balanced_mixing\(\s*([-+0-9.eE]+)\s*\)$")


def preset(name: str) -> ScatteringMatrix:
    key = name.strip()

    if key == "identity":
        return ScatteringMatrix.create(np.eye(4))

    if key == "balanced_pc":
        return balanced_pc()

    match = PRESET_PATTERN.match(key)
    if match:
        return balanced_mixing(float(match.group(1)))

    raise KeyError(f"Unknown scattering preset {name!r}")


def haar_scattering(seed) -> ScatteringMatrix:
    return ScatteringMatrix.create(haar_unitary(4, seed))


def realize_gram(gram, seed=None) -> ScatteringMatrix:
    """
    Unitary S whose hybrid matrix has X^dag X = gram.

    With G = V Lambda V^dag, X = sqrt(Lambda) V^dag fills (r_H, t'_V) and
    Y = sqrt(1 - Lambda) V^dag fills (t_H, r'_V), so columns 0 and 3 of S are
    orthonormal; columns 1 and 2 come from Gram-Schmidt over the standard
    basis, or over a Haar basis when a seed is given.
    """
    eig = herm_eigen(gram)
    values = np.clip(eig.eigenvalues, 0.0, 1.0)
    v_dag = adjoint(eig.eigenvectors)

    X = np.sqrt(values)[:, None] * v_dag
    Y = np.sqrt(1 - values)[:, None] * v_dag

    first = np.concatenate([X[:, 0], Y[:, 0]])
    last = np.concatenate([X[:, 1], Y[:, 1]])
    basis = [first, last]

    candidates = np.eye(4, dtype=complex) if seed is None else haar_unitary(4, seed)
    pool = [candidates[:, j] for j in range(4)]

    while len(basis) < 4:
        residuals = []
        for v in pool:
            w = v - sum(b * np.vdot(b, v) for b in basis)
            residuals.append(w)

        best = int(np.argmax([np.linalg.norm(w) for w in residuals]))
        w = residuals[best]
        basis.append(w / np.linalg.norm(w))
        pool.pop(best)

    S = np.column_stack([basis[0], basis[2], basis[3], basis[1]])

    return ScatteringMatrix.create(S)


def balanced_gram(hv_sq: float, phase: float = 0.0) -> np.ndarray:
    h = np.sqrt(max(hv_sq, 0.0)) * np.exp(1j * phase)
    return np.array([[0.5, h], [np.conj(h), 0.5]])


def balanced_scattering(hv_sq: float, phase: float = 0.0, seed=None) -> ScatteringMatrix:
    return realize_gram(balanced_gram(hv_sq, phase), seed=seed)
