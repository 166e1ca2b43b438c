from structs.analysis_config import AnalysisConfig, Window
from structs.exceptions import DegenerateXi, InconsistentRoutes
from structs.wavepacket import OverlapAlpha
from util.bell import chsh_bruteforce, emax
from util.config import VERSION
from util.decomp import consistency_check, r_prime, semi_polar_nudged
from util.logger import CLogger
from util.regions import classify
from util.scattering import gammas, hybrid
from util.smallmat import matrix_to_dict
from util.state import build_rho, concurrence_report, mandel_dip
from util.wavepacket import alpha_finite_window, alpha_infinite_window, temporal_distinguishability

log = CLogger().get_logger()

# brute force may undershoot, never overshoot
BRUTEFORCE_SLACK = 1e-6


class Processor:
    """
    Runs one analysis end to end: alpha from the wavepackets, the
    post-selected state, all concurrence routes, the Bell report and the
    semi-polar summary.
    """

    def __init__(self, config: AnalysisConfig):
        self.config = config

    def resolve_alpha(self) -> tuple[OverlapAlpha, str]:
        config = self.config

        if config.alpha_sq is not None:
            return OverlapAlpha.direct(config.alpha_sq), "direct"

        if isinstance(config.window, Window):
            t = config.window.t
            if t is None:
                t = 0.5 * (config.psi.time_center() + config.phi.time_center())

            return alpha_finite_window(config.psi, config.phi, t, config.window.tau), "finite_window"

        return alpha_infinite_window(config.psi, config.phi), "infinite_window"

    def analyze(self) -> dict:
        config = self.config
        tolerances = config.tolerances

        alpha, alpha_source = self.resolve_alpha()
        alpha_sq = alpha.alpha_sq
        log.info("alpha_sq = %.12f from %s", alpha_sq, alpha_source)

        s = config.scattering
        X = hybrid(s)
        pair = gammas(s, config.statistics)
        state = build_rho(pair, alpha_sq)

        concurrence = concurrence_report(s, alpha_sq, config.statistics, tolerances)
        dip = mandel_dip(X, alpha_sq, config.statistics)

        bell = emax(X, alpha_sq, config.statistics, state=state, tolerances=tolerances)
        brute = chsh_bruteforce(state, config.budget)

        if brute > bell.emax_horodecki + BRUTEFORCE_SLACK:
            log.error("Brute-force CHSH %.12f exceeds the Horodecki bound %.12f", brute, bell.emax_horodecki)
            raise InconsistentRoutes(details={"bruteforce": brute, "horodecki": bell.emax_horodecki})

        bell_dict = bell.to_dict()
        bell_dict["emax_bruteforce"] = brute

        return {
            "version": VERSION,
            "tolerances": tolerances.as_dict(),
            "statistics": config.statistics.value,
            "scattering": {
                "source": config.scattering_source,
                "gram": matrix_to_dict(X.gram),
            },
            "alpha": {
                "source": alpha_source,
                "alpha_sq": alpha_sq,
                "temporal_distinguishability": temporal_distinguishability(alpha),
            },
            "concurrence": concurrence.to_dict(),
            "mandel": {
                "dip": dip.dip,
                "classical_prob": dip.classical_prob,
                "coincidence_prob": dip.coincidence_prob,
            },
            "bell": bell_dict,
            "region": classify(concurrence.c_closed, bell.emax_closed, tolerances.construction),
            "semi_polar": self.__semi_polar_summary(X, alpha_sq, state.normalization),
        }

    def __semi_polar_summary(self, X, alpha_sq: float, n: float) -> dict:
        check = consistency_check(X)
        summary = {
            "consistency": {
                "xi": [float(x) for x in check.xi],
                "c1": check.c1,
                "solvable": check.solvable,
            },
        }

        try:
            sp, nudged = semi_polar_nudged(self.config.scattering, self.config.statistics, self.config.tolerances.identity)

        except DegenerateXi as e:
            log.info("Semi-polar summary skipped: %s", e.details)
            summary["status"] = "degenerate_xi"
            return summary

        summary["status"] = "nudged" if nudged else "ok"
        summary["decomposition"] = sp.to_dict()
        summary["r_prime"] = r_prime(sp, alpha_sq, n).to_dict()

        return summary
