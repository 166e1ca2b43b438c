import csv

import numpy as np

from structs.exceptions import ConfigError, InconsistentRoutes, ZeroCoincidence
from structs.region import (
    BOUNDARY,
    EMPTY,
    ENTANGLED_NONVIOLATING,
    UNENTANGLED,
    VIOLATING,
    BalancedPoint,
    NoMixingReport,
    RegionReport,
    ScanResult,
    ScanRow,
)
from structs.scattering_matrix import HybridMatrix
from structs.statistics import Statistics
from util.bell import U2_ACTIVE, U3_ACTIVE, emax, emax_closed
from util.config import DEFAULT
from util.logger import CLogger
from util.scattering import balanced_gram, balanced_scattering, hybrid
from util.state import ZERO_TOL, concurrence_closed

log = CLogger().get_logger()

BOUNDARY_BAND = 1e-6
HV_ZERO_TOL = 1e-12

CSV_HEADER = ["alpha_sq", "hv_sq", "concurrence", "emax", "branch", "region"]


def f_boundary(alpha_sq: float) -> float:
    """
    |(X^dag X)_HV|^2 below f(|a|^2) puts u3 among the two largest eigenvalues.
    """
    return alpha_sq / (2 * (1 + alpha_sq))


def g_boundary(alpha_sq: float) -> float:
    """
    The curve E_max = 2 on the balanced slice.
    """
    a = alpha_sq
    return 0.25 * (1 - a + a ** 2 - (1 - a) * np.sqrt(1 + a ** 2))


def classify(concurrence: float, emax_value: float, tol: float = DEFAULT.construction) -> str:
    if concurrence <= tol:
        return UNENTANGLED

    if emax_value > 2 + tol:
        return VIOLATING

    return ENTANGLED_NONVIOLATING


def balanced_concurrence(p: BalancedPoint) -> float:
    """
    C = |a|^2 (1 - 4 h) / (1 - 4 |a|^2 h) with h = |(X^dag X)_HV|^2.
    """
    denominator = 1 - 4 * p.alpha_sq * p.hv_sq

    if denominator <= ZERO_TOL:
        raise ZeroCoincidence(details={"alpha_sq": p.alpha_sq, "hv_sq": p.hv_sq})

    c = p.alpha_sq * (1 - 4 * p.hv_sq) / denominator

    return min(max(c, 0.0), 1.0)


def balanced_hybrid(p: BalancedPoint) -> HybridMatrix:
    return HybridMatrix.from_gram(balanced_gram(p.hv_sq))


def balanced_emax(p: BalancedPoint) -> RegionReport:
    """
    In the u3-active region (h <= f) E_max = 2 C sqrt(1 + |a|^4) / |a|^2;
    elsewhere 2 sqrt(u1 + u2) from the closed-form eigenvalues.
    """
    c = balanced_concurrence(p)

    if p.hv_sq <= f_boundary(p.alpha_sq) and p.alpha_sq > 0:
        value = 2 * c * np.sqrt(1 + p.alpha_sq ** 2) / p.alpha_sq
        branch = U3_ACTIVE
    else:
        u1, u2, _ = _balanced_u(p)
        value = 2 * np.sqrt(u1 + u2)
        branch = U2_ACTIVE

    value = float(value)

    return RegionReport(concurrence=c, emax=value, branch=branch, region=classify(c, value))


def _balanced_u(p: BalancedPoint) -> tuple[float, float, float]:
    """
    With q = 4h and N = 1 - |a|^2 q the eigenvalues of R^T R are
    (1 - q)^2 / N^2, 1 - (1 - |a|^4)(1 - q^2) / N^2 and C^2, the first two
    ordered by size.
    """
    q = 4 * p.hv_sq
    n = 1 - p.alpha_sq * q

    first = (1 - q) ** 2 / n ** 2
    second = 1 - (1 - p.alpha_sq ** 2) * (1 - q ** 2) / n ** 2
    c = balanced_concurrence(p)

    return max(first, second), min(first, second), c ** 2


def no_mixing_case(X: HybridMatrix, alpha_sq: float) -> NoMixingReport:
    """
    (X^dag X)_HV = 0: C = 2|a|^2 sqrt(h v (1-h)(1-v)) / (h + v - 2hv) with
    h, v the diagonal of X^dag X, and E_max = 2 sqrt(1 + C^2).
    """
    inv = X.invariants

    if np.sqrt(inv.hv_sq) > HV_ZERO_TOL:
        raise ConfigError(details=f"No-mixing case needs (X^dag X)_HV = 0, got |HV|^2 = {inv.hv_sq}")

    h, v = inv.hh, inv.vv
    denominator = h + v - 2 * h * v

    if denominator <= ZERO_TOL:
        raise ZeroCoincidence(details={"hh": h, "vv": v})

    c = 2 * alpha_sq * np.sqrt(max(h * v * (1 - h) * (1 - v), 0.0)) / denominator
    c = float(min(max(c, 0.0), 1.0))

    return NoMixingReport(c=c, emax=float(2 * np.sqrt(1 + c ** 2)))


# ======================================
# Scan
# ======================================


def grid_axes(alpha_steps: int, hv_steps: int) -> tuple[np.ndarray, np.ndarray]:
    if alpha_steps < 1 or hv_steps < 1:
        raise ConfigError(details=f"Grid needs at least one step per axis, got {alpha_steps}x{hv_steps}")

    alphas = np.linspace(0.0, 1.0, alpha_steps) if alpha_steps > 1 else np.array([0.0])
    hvs = np.linspace(0.0, 0.25, hv_steps) if hv_steps > 1 else np.array([0.0])

    return alphas, hvs


def _near_boundary(p: BalancedPoint) -> bool:
    return (abs(p.hv_sq - f_boundary(p.alpha_sq)) <= BOUNDARY_BAND
            or abs(p.hv_sq - g_boundary(p.alpha_sq)) <= BOUNDARY_BAND)


def scan_cell(p: BalancedPoint, statistics=Statistics.BOSONIC, cross_check: bool = False) -> ScanRow:
    statistics = Statistics.parse(statistics)

    try:
        if statistics is Statistics.BOSONIC:
            report = balanced_emax(p)
            c, value, branch = report.concurrence, report.emax, report.branch
        else:
            X = balanced_hybrid(p)
            c = concurrence_closed(X, p.alpha_sq, statistics)
            value, branch, _ = emax_closed(X, p.alpha_sq, statistics)

        if cross_check:
            _cross_check(p, statistics, c, value)

    except ZeroCoincidence:
        return ScanRow(p.alpha_sq, p.hv_sq, None, None, "none", EMPTY)

    region = classify(c, value)
    if statistics is Statistics.BOSONIC and _near_boundary(p):
        region = BOUNDARY

    return ScanRow(p.alpha_sq, p.hv_sq, float(c), float(value), branch, region)


def _cross_check(p: BalancedPoint, statistics, c: float, value: float):
    """
    Re-derives C and E_max on an explicit splitter realizing the point.
    """
    s = balanced_scattering(p.hv_sq)
    X = hybrid(s)
    general_c = concurrence_closed(X, p.alpha_sq, statistics)
    report = emax(X, p.alpha_sq, statistics)

    if abs(general_c - c) > DEFAULT.identity or abs(report.emax_closed - value) > DEFAULT.oracle:
        log.error("Scan cell (%s, %s) disagrees with the general pipeline", p.alpha_sq, p.hv_sq)
        raise InconsistentRoutes(details={"alpha_sq": p.alpha_sq, "hv_sq": p.hv_sq})


def _crossings_above_f(rows: list, hv_steps: int) -> list:
    """
    (alpha_sq, hv_lo, hv_hi) wherever E_max - 2 changes sign between
    neighbouring cells with hv_sq > f.
    """
    found = []

    for start in range(0, len(rows), hv_steps):
        line = rows[start:start + hv_steps]
        for left, right in zip(line, line[1:]):
            if left.emax is None or right.emax is None:
                continue
            if left.hv_sq <= f_boundary(left.alpha_sq):
                continue
            if (left.emax - 2) * (right.emax - 2) < 0:
                found.append((left.alpha_sq, left.hv_sq, right.hv_sq))

    return found


def scan(alpha_steps: int, hv_steps: int, statistics=Statistics.BOSONIC, cross_check: bool = False) -> ScanResult:
    """
    Every cell of the inclusive alpha_steps x hv_steps grid over [0, 1] x [0, 1/4],
    rows ordered by alpha_sq then hv_sq.
    """
    alphas, hvs = grid_axes(alpha_steps, hv_steps)
    rows = []

    for a in alphas:
        for h in hvs:
            rows.append(scan_cell(BalancedPoint.create(a, h), statistics, cross_check))

    crossings = _crossings_above_f(rows, len(hvs))

    if crossings:
        log.warning("E_max = 2 crossings found above f: %s", crossings)

    log.info("Scanned %d cells: %s", len(rows), ScanResult(rows).region_counts())

    return ScanResult(rows=rows, crossings_above_f=crossings)


def write_scan_csv(result: ScanResult, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)

    for row in result.rows:
        writer.writerow(row.cells())
