from dataclasses import dataclass, field
from typing import Optional

from structs.exceptions import ConfigError

VIOLATING = "violating"
ENTANGLED_NONVIOLATING = "entangled_nonviolating"
UNENTANGLED = "unentangled"

# scan-only tags
BOUNDARY = "boundary"
EMPTY = "empty"

HV_SQ_MAX = 0.25


@dataclass(frozen=True)
class BalancedPoint:
    """
    A point of the balanced slice (X^dag X)_HH = (X^dag X)_VV = 1/2.
    """
    alpha_sq: float
    hv_sq: float

    @classmethod
    def create(cls, alpha_sq: float, hv_sq: float, tol: float = 1e-12) -> "BalancedPoint":
        if not 0.0 <= alpha_sq <= 1.0:
            raise ConfigError(details=f"alpha_sq must lie in [0, 1], got {alpha_sq}")

        if not 0.0 <= hv_sq <= HV_SQ_MAX + tol:
            raise ConfigError(details=f"hv_sq must lie in [0, 1/4], got {hv_sq}")

        return cls(alpha_sq=float(alpha_sq), hv_sq=min(float(hv_sq), HV_SQ_MAX))


@dataclass(frozen=True)
class RegionReport:
    concurrence: float
    emax: float
    branch: str
    region: str


@dataclass(frozen=True)
class NoMixingReport:
    c: float
    emax: float


@dataclass(frozen=True)
class ScanRow:
    alpha_sq: float
    hv_sq: float
    concurrence: Optional[float]
    emax: Optional[float]
    branch: str
    region: str

    def cells(self) -> list:
        def number(x):
            return "" if x is None else repr(float(x))

        return [repr(self.alpha_sq), repr(self.hv_sq), number(self.concurrence),
                number(self.emax), self.branch, self.region]


@dataclass(frozen=True)
class ScanResult:
    rows: list
    crossings_above_f: list = field(default_factory=list)

    def region_counts(self) -> dict:
        counts = {}
        for row in self.rows:
            counts[row.region] = counts.get(row.region, 0) + 1

        return dict(sorted(counts.items()))
