from dataclasses import dataclass, field

import numpy as np

from structs.exceptions import DegenerateTransmission, DegenerateXi, ZeroCoincidence
from structs.result import Result
from structs.statistics import Statistics
from util.bell import chsh_bruteforce, correlation_matrix, emax, gamma_route_deviation, u_eigen_closed
from util.config import DEFAULT, VERSION, Tolerances
from util.decomp import r_prime, semi_polar
from util.logger import CLogger
from util.scattering import (
    canonicalize_input,
    gammas,
    haar_scattering,
    hybrid,
    outgoing_matrix,
    polar_decompose_s,
    trace_identities,
)
from util.smallmat import SIGMA_IN, max_abs, random_rank_one
from util.state import build_rho, concurrence_closed, concurrence_gamma, concurrence_wootters

log = CLogger().get_logger()

SUCCESS = Result.SUCCESS

ALPHA_LADDER = (0.0, 0.25, 0.5, 0.75, 1.0)
BRUTEFORCE_LIMIT = 100
BRUTEFORCE_GAP = 1e-4
BRUTEFORCE_SLACK = 1e-6

# instances with a singular-value gap or floor below this are skipped by
# suites that divide by it
CONDITION_FLOOR = 1e-4


@dataclass
class SuiteResult:
    tolerance: float
    max_deviation: float = 0.0
    checked: int = 0
    skipped: int = 0

    def record(self, deviation: float):
        self.max_deviation = max(self.max_deviation, float(deviation))
        self.checked += 1

    @property
    def result(self) -> Result:
        return Result.of(self.max_deviation <= self.tolerance)


@dataclass
class VerifyReport:
    count: int
    seed: int
    tolerances: Tolerances
    suites: dict = field(default_factory=dict)

    @property
    def result(self) -> Result:
        return Result.of(all(s.result == SUCCESS for s in self.suites.values()))

    def to_dict(self) -> dict:
        return {
            "version": VERSION,
            "tolerances": self.tolerances.as_dict(),
            "count": self.count,
            "seed": self.seed,
            "passed": self.result.value,
            "suites": {
                name: {
                    "max_deviation": suite.max_deviation,
                    "tolerance": suite.tolerance,
                    "checked": suite.checked,
                    "skipped": suite.skipped,
                    "passed": suite.result.value,
                }
                for name, suite in self.suites.items()
            },
        }


def _spectrum_gap(a, b) -> float:
    return float(np.max(np.abs(np.sort(np.asarray(a))[::-1] - np.sort(np.asarray(b))[::-1])))


def _relative_defect(a: np.ndarray, b: np.ndarray) -> float:
    """
    || a / |a| - b / |b| || after matching the global phase.
    """
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return float(abs(na - nb))

    a, b = a / na, b / nb
    overlap = np.vdot(b, a)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0

    return max_abs(a - phase * b)


class Verifier:
    """
    Runs the campaign on `count` Haar splitters drawn from one seeded
    generator, so the same (count, seed) always gives the same report.
    """

    def __init__(self, count: int, seed: int = 0, tolerances: Tolerances = DEFAULT):
        if count < 1:
            raise ValueError(f"count must be at least 1, got {count}")

        self.count = count
        self.seed = seed
        self.tolerances = tolerances

        t = tolerances
        self.suites = {
            "trace_identities": SuiteResult(t.identity),
            "state_invariants": SuiteResult(t.identity),
            "concurrence_gamma": SuiteResult(t.identity),
            "concurrence_wootters": SuiteResult(t.oracle),
            "fermionic_concurrence": SuiteResult(t.oracle),
            "bell_spectrum": SuiteResult(t.oracle),
            "emax_horodecki": SuiteResult(t.oracle),
            "r_prime_spectrum": SuiteResult(t.oracle),
            "gisin": SuiteResult(t.oracle),
            "polar_decomposition": SuiteResult(t.identity),
            "semi_polar": SuiteResult(t.identity),
            "canonicalize_input": SuiteResult(t.identity),
            "bruteforce_gap": SuiteResult(BRUTEFORCE_GAP),
            "bruteforce_excess": SuiteResult(BRUTEFORCE_SLACK),
        }

    def run(self) -> VerifyReport:
        rng = np.random.default_rng(self.seed)

        for index in range(self.count):
            s = haar_scattering(rng)
            sigma = random_rank_one(rng)
            self.check_instance(s, sigma, brute=index < BRUTEFORCE_LIMIT)

            if (index + 1) % 100 == 0:
                log.info("Verified %d of %d instances", index + 1, self.count)

        report = VerifyReport(count=self.count, seed=self.seed, tolerances=self.tolerances, suites=self.suites)

        for name, suite in self.suites.items():
            log.info("%s: max deviation %.3e (tolerance %.1e)", name, suite.max_deviation, suite.tolerance)

        return report

    def check_instance(self, s, sigma, brute: bool = False):
        self.suites["trace_identities"].record(trace_identities(s).max_deviation())

        X = hybrid(s)
        pair = gammas(s, Statistics.BOSONIC)

        for alpha_sq in ALPHA_LADDER:
            try:
                self.__check_state(X, pair, alpha_sq)

            except ZeroCoincidence:
                for name in ("state_invariants", "concurrence_gamma", "concurrence_wootters",
                             "bell_spectrum", "emax_horodecki"):
                    self.suites[name].skipped += 1

        self.__check_fermionic(s, X)
        self.__check_decompositions(s, X, pair, sigma)

        if brute:
            self.__check_bruteforce(X, pair)

    def __check_state(self, X, pair, alpha_sq: float):
        state = build_rho(pair, alpha_sq)
        closed = concurrence_closed(X, alpha_sq)
        defects = state.defects()
        self.suites["state_invariants"].record(max(
            defects["hermiticity"], defects["trace"],
            max(-defects["min_eigenvalue"], 0.0), abs(defects["third_eigenvalue"])))

        self.suites["concurrence_gamma"].record(abs(closed - concurrence_gamma(pair, alpha_sq)))
        self.suites["concurrence_wootters"].record(abs(closed - concurrence_wootters(state)))

        # non-strict: route disagreements are recorded here, not raised
        cm = correlation_matrix(state, strict=False)
        spectrum = cm.spectrum()
        closed_u = u_eigen_closed(X, alpha_sq)
        self.suites["bell_spectrum"].record(max(_spectrum_gap(spectrum, closed_u), gamma_route_deviation(state)))

        report = emax(X, alpha_sq, state=state, tolerances=self.tolerances, horodecki=False)
        self.suites["emax_horodecki"].record(abs(report.emax_closed - cm.horodecki()))

        if alpha_sq == 1.0:
            self.suites["gisin"].record(abs(report.emax_closed - 2 * np.sqrt(1 + closed ** 2)))

        try:
            sp = semi_polar(pair, self.tolerances.identity)

        except DegenerateXi:
            self.suites["r_prime_spectrum"].skipped += 1
            return

        if min(sp.xi[1], sp.xi[0] - sp.xi[1]) < CONDITION_FLOOR:
            self.suites["r_prime_spectrum"].skipped += 1
            return

        rp = r_prime(sp, alpha_sq, state.normalization)
        self.suites["r_prime_spectrum"].record(_spectrum_gap(rp.spectrum(), spectrum))

    def __check_fermionic(self, s, X):
        alpha_sq = 0.5
        state = build_rho(gammas(s, Statistics.FERMIONIC), alpha_sq)
        closed = concurrence_closed(X, alpha_sq, Statistics.FERMIONIC)

        self.suites["fermionic_concurrence"].record(abs(closed - concurrence_wootters(state)))

    def __check_decompositions(self, s, X, pair, sigma):
        try:
            polar = polar_decompose_s(s, self.tolerances.identity)
            t = polar.transmission
            if min(t[0], 1 - t[1], t[1] - t[0]) < CONDITION_FLOOR:
                self.suites["polar_decomposition"].skipped += 1
            else:
                self.suites["polar_decomposition"].record(max_abs(polar.reassemble() - s.S))

        except DegenerateTransmission:
            self.suites["polar_decomposition"].skipped += 1

        try:
            sp = semi_polar(pair, self.tolerances.identity)

            if min(sp.xi[1], sp.xi[0] - sp.xi[1]) < CONDITION_FLOOR:
                self.suites["semi_polar"].skipped += 1
            else:
                self.suites["semi_polar"].record(self.__semi_polar_defect(sp, pair))

        except DegenerateXi:
            self.suites["semi_polar"].skipped += 1

        canonical = canonicalize_input(s, sigma, self.tolerances.identity)
        self.suites["canonicalize_input"].record(
            _relative_defect(outgoing_matrix(canonical, SIGMA_IN), outgoing_matrix(s, sigma)))

    @staticmethod
    def __semi_polar_defect(sp, pair) -> float:
        norm = np.vdot(pair.gamma1, pair.gamma1).real
        c1, c2, c3 = sp.c1, sp.c2, sp.c3
        x1, x2 = sp.xi

        return max(
            max_abs(sp.gamma1() - pair.gamma1),
            max_abs(sp.gamma2() - pair.gamma2),
            abs(c1 ** 2 + c2 * c3 - 1),
            abs(c1 ** 2 * (x1 + x2) + c2 ** 2 * x2 + c3 ** 2 * x1 - norm),
            abs(sp.c1 - sp.c1_trace),
        )

    def __check_bruteforce(self, X, pair):
        alpha_sq = 0.5
        try:
            state = build_rho(pair, alpha_sq)

        except ZeroCoincidence:
            self.suites["bruteforce_gap"].skipped += 1
            self.suites["bruteforce_excess"].skipped += 1
            return

        bound = correlation_matrix(state, strict=False).horodecki()
        found = chsh_bruteforce(state)

        self.suites["bruteforce_gap"].record(max(bound - found, 0.0))
        self.suites["bruteforce_excess"].record(max(found - bound, 0.0))
