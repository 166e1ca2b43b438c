from dataclasses import dataclass
from typing import Optional

import numpy as np

from structs.exceptions import NotUnitary
from util.smallmat import PAULI_TRIPLE, SIGMA_Z, adjoint, as_cmat, herm_eigen, unitarity_defect


class AnalyzerSetting:
    """
    Polarization mixer in front of a polarizing beam splitter. Measuring H/V
    after the mixer R measures the observable R^dag sigma_z R = n . sigma.
    """

    def __init__(self, rotation: np.ndarray, angles: tuple[float, float, float]):
        self.rotation = rotation
        self.angles = angles

    @classmethod
    def create(cls, rotation, tol: float = 1e-12) -> "AnalyzerSetting":
        m = as_cmat(rotation, 2)
        defect = unitarity_defect(m)

        if defect > tol:
            raise NotUnitary(details={"defect": defect, "tol": tol})

        # lam is not observable, so a bare rotation records 0
        theta, phi = _axis_angles(_bloch_axis(m))
        return cls(m, (theta, phi, 0.0))

    @classmethod
    def from_angles(cls, theta: float, phi: float, lam: float = 0.0) -> "AnalyzerSetting":
        """
        R^dag = (|n+>, e^{i lam} |n->) for the Bloch axis n(theta, phi);
        lam only sets a phase that no correlator sees.
        """
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        e = np.exp(1j * phi)
        up = np.array([c, e * s])
        down = np.exp(1j * lam) * np.array([s, -e * c])

        return cls(adjoint(np.column_stack([up, down])), (float(theta), float(phi), float(lam)))

    @classmethod
    def from_axis(cls, theta: float, phi: float) -> "AnalyzerSetting":
        return cls.from_angles(theta, phi, 0.0)

    @classmethod
    def along(cls, n) -> "AnalyzerSetting":
        theta, phi = _axis_angles(np.asarray(n, dtype=float))
        return cls.from_axis(theta, phi)

    @classmethod
    def identity(cls) -> "AnalyzerSetting":
        return cls.from_axis(0.0, 0.0)

    def observable(self) -> np.ndarray:
        return adjoint(self.rotation) @ SIGMA_Z @ self.rotation

    def axis(self) -> np.ndarray:
        return _bloch_axis(self.rotation)


def _bloch_axis(rotation: np.ndarray) -> np.ndarray:
    obs = adjoint(rotation) @ SIGMA_Z @ rotation
    return np.array([0.5 * np.trace(obs @ p).real for p in PAULI_TRIPLE])


def _axis_angles(n: np.ndarray) -> tuple[float, float]:
    norm = float(np.linalg.norm(n))

    if norm == 0.0:
        return 0.0, 0.0

    x, y, z = n / norm
    return float(np.arccos(np.clip(z, -1.0, 1.0))), float(np.arctan2(y, x))


@dataclass(frozen=True)
class CorrelationMatrix:
    """
    R_kl = Tr rho sigma_k x sigma_l.
    """
    R: np.ndarray

    def gram(self) -> np.ndarray:
        return self.R.T @ self.R

    def spectrum(self) -> np.ndarray:
        """
        Eigenvalues of R^T R, descending.
        """
        g = self.gram()
        return np.clip(herm_eigen(g).eigenvalues, 0.0, None)

    def horodecki(self) -> float:
        u = self.spectrum()
        return float(2 * np.sqrt(u[0] + u[1]))


@dataclass(frozen=True)
class BellReport:
    u1: float
    u2: float
    u3: float
    emax_closed: float
    emax_horodecki: Optional[float]
    emax_bruteforce: Optional[float]
    violating: bool
    branch: str

    def to_dict(self) -> dict:
        return {
            "u1": self.u1,
            "u2": self.u2,
            "u3": self.u3,
            "emax_closed": self.emax_closed,
            "emax_horodecki": self.emax_horodecki,
            "emax_bruteforce": self.emax_bruteforce,
            "violating": self.violating,
            "branch": self.branch,
        }
