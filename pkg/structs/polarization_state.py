from dataclasses import dataclass
from typing import Optional

import numpy as np

from structs.scattering_matrix import GammaPair
from structs.statistics import Statistics
from util.smallmat import hermiticity_defect, herm_eigen, matrix_to_dict


@dataclass(frozen=True)
class PolarizationState:
    """
    Two-qubit polarization density matrix in the basis (HH, HV, VH, VV),
    with the amplitudes and |alpha|^2 it was built from.
    """
    rho: np.ndarray
    alpha_sq: float
    statistics: Statistics = Statistics.BOSONIC
    gammas: Optional[GammaPair] = None
    normalization: float = 1.0

    def defects(self) -> dict:
        """
        Hermiticity, trace and positivity defects plus the third-largest
        eigenvalue (zero for a two-term mixture).
        """
        spectrum = herm_eigen(self.rho).eigenvalues

        return {
            "hermiticity": hermiticity_defect(self.rho),
            "trace": abs(np.trace(self.rho) - 1.0),
            "min_eigenvalue": float(spectrum[-1]),
            "third_eigenvalue": float(spectrum[2]),
        }

    def to_dict(self) -> dict:
        return {
            "rho": matrix_to_dict(self.rho),
            "provenance": {
                "alpha_sq": self.alpha_sq,
                "statistics": self.statistics.value,
            },
        }


@dataclass(frozen=True)
class MandelDip:
    dip: float
    classical_prob: float
    coincidence_prob: float


@dataclass(frozen=True)
class ConcurrenceReport:
    c_closed: float
    c_gamma: float
    c_wootters: float
    mandel_dip: float
    coincidence_prob: float

    def disagreement(self) -> float:
        values = (self.c_closed, self.c_gamma, self.c_wootters)
        return max(values) - min(values)

    def to_dict(self) -> dict:
        return {
            "closed": self.c_closed,
            "gamma": self.c_gamma,
            "wootters": self.c_wootters,
            "mandel_dip": self.mandel_dip,
            "coincidence_prob": self.coincidence_prob,
        }
