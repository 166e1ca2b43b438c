from dataclasses import dataclass
from typing import Optional, Union

from structs.exceptions import ConfigError
from structs.scattering_matrix import ScatteringMatrix
from structs.statistics import Statistics
from util.config import DEFAULT, Tolerances

INFINITE = "infinite"


@dataclass(frozen=True)
class Window:
    """
    Coincidence window of length tau; t = None centres it between the packets.
    """
    tau: float
    t: Optional[float] = None


@dataclass(frozen=True)
class AnalysisConfig:
    """
    Everything one analysis needs, with files already read.

    Exactly one alpha source: the wavepacket pair (psi, phi) with a window,
    or alpha_sq given directly.
    """
    scattering: ScatteringMatrix
    scattering_source: str
    psi: object = None
    phi: object = None
    window: Union[Window, str] = INFINITE
    alpha_sq: Optional[float] = None
    statistics: Statistics = Statistics.BOSONIC
    tolerances: Tolerances = DEFAULT
    budget: int = 2000

    def __post_init__(self):
        has_packets = self.psi is not None and self.phi is not None
        has_direct = self.alpha_sq is not None

        if has_packets == has_direct:
            raise ConfigError(details="Give exactly one alpha source: a wavepacket pair or alpha_sq")

        if (self.psi is None) != (self.phi is None):
            raise ConfigError(details="Wavepackets come in pairs (psi and phi)")

        if has_direct and not 0.0 <= self.alpha_sq <= 1.0:
            raise ConfigError(details=f"alpha_sq must lie in [0, 1], got {self.alpha_sq}")
