from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from structs.exceptions import ConfigError, QuadratureNotConverged

NORM_TOL = 1e-8

# Gaussian frequency integrals are cut at this many widths from the centre
GAUSSIAN_CUTOFF = 8.0


class GaussianPacket:
    """
    psi(w) = (2 pi s^2)^(-1/4) exp(-(w - w0)^2 / (4 s^2)) exp(-i w t0)

    |psi|^2 is a normal density of width s centred on w0; the time-domain
    envelope peaks at t0.
    """

    kind = "gaussian"

    def __init__(self, center: float, width: float, delay: float = 0.0):
        if not width > 0 or not np.isfinite(width):
            raise ConfigError(details=f"Gaussian width must be positive, got {width}")

        if not np.isfinite(center) or not np.isfinite(delay):
            raise ConfigError(details="Gaussian centre and delay must be finite")

        self.center = float(center)
        self.width = float(width)
        self.delay = float(delay)

    def amplitude(self, omega):
        omega = np.asarray(omega, dtype=float)
        norm = (2 * np.pi * self.width ** 2) ** -0.25
        envelope = np.exp(-((omega - self.center) ** 2) / (4 * self.width ** 2))

        return norm * envelope * np.exp(-1j * omega * self.delay)

    def time_amplitude(self, t):
        """
        (1 / sqrt(2 pi)) * integral dw psi(w) exp(i w t), in closed form.
        """
        s = np.asarray(t, dtype=float) - self.delay
        prefactor = self.width * np.sqrt(2.0) * (2 * np.pi * self.width ** 2) ** -0.25

        return prefactor * np.exp(1j * self.center * s) * np.exp(-(self.width * s) ** 2)

    def support(self) -> tuple[float, float]:
        reach = GAUSSIAN_CUTOFF * self.width
        return self.center - reach, self.center + reach

    def time_center(self) -> float:
        return self.delay

    def coherence_time(self) -> float:
        # standard deviation of |psi(t)|^2
        return 1.0 / (2.0 * self.width)

    def with_phase(self, phase: float) -> "PhasedPacket":
        return PhasedPacket(self, phase)

    def describe(self) -> dict:
        return {"kind": self.kind, "center": self.center, "width": self.width, "delay": self.delay}


class TabulatedPacket:
    """
    Spectral amplitude sampled on a strictly increasing frequency grid,
    normalized with composite Simpson weights on construction.
    """

    kind = "tabulated"

    def __init__(self, omega: np.ndarray, values: np.ndarray, normalization_factor: float):
        self.omega = omega
        self.values = values
        self.normalization_factor = normalization_factor
        self.weights = simpson_weights(omega)

    @classmethod
    def create(cls, omega, values) -> "TabulatedPacket":
        omega = np.asarray(omega, dtype=float)
        values = np.asarray(values, dtype=complex)

        if omega.ndim != 1 or omega.shape != values.shape or omega.size < 3:
            raise ConfigError(details="Tabulated packet needs at least 3 matching (omega, amplitude) samples")

        if not (np.all(np.isfinite(omega)) and np.all(np.isfinite(values))):
            raise ConfigError(details="Tabulated packet has non-finite samples")

        if np.any(np.diff(omega) <= 0):
            raise ConfigError(details="Tabulated frequency grid must be strictly increasing")

        norm_sq = float(simpson(np.abs(values) ** 2, x=omega))

        if not norm_sq > 0:
            raise ConfigError(details="Tabulated packet has zero norm")

        factor = 1.0 / np.sqrt(norm_sq)

        return cls(omega, values * factor, factor)

    def amplitude(self, omega):
        omega = np.asarray(omega, dtype=float)
        re = np.interp(omega, self.omega, self.values.real, left=0.0, right=0.0)
        im = np.interp(omega, self.omega, self.values.imag, left=0.0, right=0.0)

        return re + 1j * im

    def time_amplitude(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        phases = np.exp(1j * np.outer(t, self.omega))
        result = phases @ (self.weights * self.values) / np.sqrt(2 * np.pi)

        return result if result.size > 1 else result[0]

    def support(self) -> tuple[float, float]:
        return float(self.omega[0]), float(self.omega[-1])

    def time_center(self) -> float:
        # group delay at the spectral centroid
        density = np.abs(self.values) ** 2
        phase = np.unwrap(np.angle(self.values))
        slope = -np.gradient(phase, self.omega)

        return float(np.sum(self.weights * density * slope))

    def coherence_time(self) -> float:
        density = np.abs(self.values) ** 2
        mean = np.sum(self.weights * density * self.omega)
        spread = np.sum(self.weights * density * (self.omega - mean) ** 2)

        return 1.0 / (2.0 * np.sqrt(max(spread, 1e-300)))

    def with_phase(self, phase: float) -> "PhasedPacket":
        return PhasedPacket(self, phase)

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "samples": int(self.omega.size),
            "omega_range": [float(self.omega[0]), float(self.omega[-1])],
            "normalization_factor": float(self.normalization_factor),
        }


class PhasedPacket:
    """
    A packet multiplied by a global phase.
    """

    def __init__(self, base, phase: float):
        self.base = base
        self.phase = float(phase)
        self.kind = base.kind

    def amplitude(self, omega):
        return np.exp(1j * self.phase) * self.base.amplitude(omega)

    def time_amplitude(self, t):
        return np.exp(1j * self.phase) * self.base.time_amplitude(t)

    def __getattr__(self, name):
        return getattr(self.base, name)


def simpson_weights(x: np.ndarray) -> np.ndarray:
    """
    Weights w with sum(w * f(x)) equal to scipy's Simpson rule on x.
    """
    eye = np.eye(x.size)
    return np.array([simpson(eye[k], x=x) for k in range(x.size)])


@dataclass(frozen=True)
class OverlapAlpha:
    """
    Temporal indistinguishability alpha and |alpha|^2.
    """
    alpha: complex
    alpha_sq: float

    @classmethod
    def create(cls, alpha: complex, tol: float = NORM_TOL) -> "OverlapAlpha":
        alpha = complex(alpha)
        alpha_sq = abs(alpha) ** 2

        if alpha_sq > 1 + tol:
            raise QuadratureNotConverged(details={"alpha_sq": alpha_sq})

        return cls(alpha=alpha, alpha_sq=min(alpha_sq, 1.0))

    @classmethod
    def direct(cls, alpha_sq: float) -> "OverlapAlpha":
        if not 0.0 <= alpha_sq <= 1.0:
            raise ConfigError(details=f"alpha_sq must lie in [0, 1], got {alpha_sq}")

        return cls(alpha=complex(np.sqrt(alpha_sq)), alpha_sq=float(alpha_sq))
