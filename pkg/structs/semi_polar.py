from dataclasses import dataclass
from typing import Optional

import numpy as np

from util.smallmat import matrix_to_dict

DEBUG_FORMAT = "debug-v1"


@dataclass(frozen=True)
class SemiPolar:
    """
    gamma_1 = U Q sqrt(xi) V and gamma_2 = U sqrt(xi) V with
    Q = ((c1, c2), (c3, -c1)) real and c2 >= 0.
    """
    U: np.ndarray
    V: np.ndarray
    xi: np.ndarray
    Q: np.ndarray
    phase: float
    c1_trace: float
    xi_from_traces: np.ndarray

    @property
    def c1(self) -> float:
        return float(self.Q[0, 0])

    @property
    def c2(self) -> float:
        return float(self.Q[0, 1])

    @property
    def c3(self) -> float:
        return float(self.Q[1, 0])

    def root_xi(self) -> np.ndarray:
        return np.diag(np.sqrt(self.xi))

    def a_matrix(self) -> np.ndarray:
        return self.Q @ self.root_xi()

    def gamma1(self) -> np.ndarray:
        return self.U @ self.a_matrix() @ self.V

    def gamma2(self) -> np.ndarray:
        return self.U @ self.root_xi() @ self.V

    def to_dict(self) -> dict:
        return {
            "format": DEBUG_FORMAT,
            "U": matrix_to_dict(self.U),
            "V": matrix_to_dict(self.V),
            "xi": [float(x) for x in self.xi],
            "c": [self.c1, self.c2, self.c3],
            "phase": self.phase,
        }


@dataclass(frozen=True)
class RPrime:
    """
    Correlation matrix in the frame of the semi-polar decomposition; only
    (1,1), (1,3), (2,2), (3,1) and (3,3) are nonzero.
    """
    r11: float
    r13: float
    r22: float
    r31: float
    r33: float
    normalization: float

    def matrix(self) -> np.ndarray:
        return np.array([
            [self.r11, 0.0, self.r13],
            [0.0, self.r22, 0.0],
            [self.r31, 0.0, self.r33],
        ])

    def interior_block(self) -> np.ndarray:
        """
        N^2 times the (1,3) block of R'^T R'.
        """
        off = self.r11 * self.r13 + self.r31 * self.r33
        block = np.array([
            [self.r11 ** 2 + self.r31 ** 2, off],
            [off, self.r13 ** 2 + self.r33 ** 2],
        ])

        return self.normalization ** 2 * block

    def trace_det(self) -> tuple[float, float]:
        block = self.interior_block()
        return float(np.trace(block)), float(np.linalg.det(block))

    def spectrum(self) -> np.ndarray:
        m = self.matrix()
        return np.sort(np.clip(np.linalg.eigvalsh(m.T @ m), 0.0, None))[::-1]

    def to_dict(self) -> dict:
        return {
            "format": DEBUG_FORMAT,
            "entries": {"11": self.r11, "13": self.r13, "22": self.r22, "31": self.r31, "33": self.r33},
            "normalization": self.normalization,
        }


@dataclass(frozen=True)
class ConsistencyReport:
    """
    Eigen-side view of the semi-polar parameters: Lambda and W from
    X^dag X = W^dag Lambda W, and one real solution (A'12, A'21).
    """
    lambdas: np.ndarray
    W: np.ndarray
    xi: np.ndarray
    xi_deviation: float
    c1: float
    c1_deviation: Optional[float]
    sin_sq_2eta: float
    product: float
    square_sum: float
    a12: float
    a21: float

    @property
    def solvable(self) -> bool:
        return 2 * self.product <= self.square_sum + 1e-12
