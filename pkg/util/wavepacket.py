import numpy as np
from scipy.integrate import quad, simpson

from structs.exceptions import EmptyWindow, QuadratureNotConverged
from structs.wavepacket import GaussianPacket, OverlapAlpha, TabulatedPacket, simpson_weights
from util.logger import CLogger

log = CLogger().get_logger()

QUAD_TOL = 1e-9
QUAD_LIMIT = 500
EMPTY_TOL = 1e-14

# time-domain quadrature reaches this many coherence times past a packet centre
TIME_REACH = 12.0


def _gaussian(packet) -> bool:
    return getattr(packet, "kind", None) == "gaussian"


def _complex_quad(f, lo: float, hi: float, points=None, epsabs: float = 1e-13, epsrel: float = 1e-11):
    """
    Integrates a complex function of a real variable over [lo, hi].

    The variable is rescaled to [-1, 1] so absolute tolerances do not depend
    on whether the caller works in SI or natural units.
    """
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)

    inner = None
    if points is not None:
        inner = sorted({(p - mid) / half for p in points if lo < p < hi})

    def g_re(x):
        return (f(mid + half * x) * half).real

    def g_im(x):
        return (f(mid + half * x) * half).imag

    options = {"limit": QUAD_LIMIT, "epsabs": epsabs, "epsrel": epsrel}
    if inner:
        options["points"] = inner

    re, re_err = quad(g_re, -1.0, 1.0, **options)
    im, im_err = quad(g_im, -1.0, 1.0, **options)

    return complex(re, im), re_err + im_err


def _joint_support(psi, phi) -> tuple[float, float]:
    lo_a, hi_a = psi.support()
    lo_b, hi_b = phi.support()

    if _gaussian(psi) and _gaussian(phi):
        return min(lo_a, lo_b), max(hi_a, hi_b)

    return max(lo_a, lo_b), min(hi_a, hi_b)


def _merged_grid(psi, phi, lo: float, hi: float) -> np.ndarray:
    grids = [p.omega for p in (psi, phi) if isinstance(getattr(p, "base", p), TabulatedPacket)]
    merged = np.unique(np.concatenate(grids))

    return merged[(merged >= lo) & (merged <= hi)]


def alpha_infinite_window(psi, phi) -> OverlapAlpha:
    """
    alpha = integral dw phi(w) psi*(w).

    Two Gaussians go through adaptive quadrature over the union of their
    +-8 sigma ranges. Anything tabulated uses Simpson weights on the merged
    grid restricted to the common support, with the other packet interpolated
    onto it.
    """
    lo, hi = _joint_support(psi, phi)

    if hi <= lo:
        log.debug("Wavepacket supports are disjoint, alpha = 0")
        return OverlapAlpha.create(0.0)

    if _gaussian(psi) and _gaussian(phi):
        def integrand(w):
            return phi.amplitude(w) * np.conj(psi.amplitude(w))

        alpha, err = _complex_quad(integrand, lo, hi, points=(psi.center, phi.center))

        if err > QUAD_TOL:
            log.error("Overlap quadrature did not converge, error estimate %.3e", err)
            raise QuadratureNotConverged(details={"error": err, "tol": QUAD_TOL})

        return OverlapAlpha.create(alpha)

    grid = _merged_grid(psi, phi, lo, hi)

    if grid.size < 2:
        return OverlapAlpha.create(0.0)

    values = phi.amplitude(grid) * np.conj(psi.amplitude(grid))
    alpha = simpson(values.real, x=grid) + 1j * simpson(values.imag, x=grid)

    return OverlapAlpha.create(alpha)


def gaussian_overlap(psi: GaussianPacket, phi: GaussianPacket) -> OverlapAlpha:
    """
    Closed form of the infinite-window overlap of two Gaussian packets.

    The Gaussian product is completed around its weighted centre so no
    exponent of order (w0 / sigma)^2 is ever formed.
    """
    s1, s2 = psi.width, phi.width
    a, b = psi.center, phi.center
    delta = phi.delay - psi.delay

    precision = 1 / (4 * s1 ** 2) + 1 / (4 * s2 ** 2)
    mean = (a / (4 * s1 ** 2) + b / (4 * s2 ** 2)) / precision

    norm = (2 * np.pi * s1 ** 2) ** -0.25 * (2 * np.pi * s2 ** 2) ** -0.25
    exponent = (-(a - b) ** 2 / (4 * (s1 ** 2 + s2 ** 2))
                - delta ** 2 / (4 * precision)
                - 1j * delta * mean)

    alpha = norm * np.sqrt(np.pi / precision) * np.exp(exponent)

    return OverlapAlpha.create(alpha)


def _time_points(packets, lo: float, hi: float) -> list[float]:
    return [p.time_center() for p in packets if lo < p.time_center() < hi]


def _window_integral(f, lo: float, hi: float, points, epsabs: float, scale: float) -> complex:
    value, err = _complex_quad(f, lo, hi, points=points, epsabs=epsabs, epsrel=1e-11)

    if err > QUAD_TOL * scale:
        log.error("Window quadrature did not converge, error estimate %.3e on scale %.3e", err, scale)
        raise QuadratureNotConverged(details={"error": err, "scale": scale, "tol": QUAD_TOL})

    return value


def _clip_window(packets, lo: float, hi: float) -> tuple[float, float]:
    """
    Narrows a window to where the Gaussian packets carry amplitude. Tabulated
    packets keep the full window.
    """
    if not all(_gaussian(p) for p in packets):
        return lo, hi

    first = min(p.time_center() - TIME_REACH * p.coherence_time() for p in packets)
    last = max(p.time_center() + TIME_REACH * p.coherence_time() for p in packets)

    return max(lo, first), min(hi, last)


def alpha_finite_window(psi, phi, t: float, tau: float) -> OverlapAlpha:
    """
    alpha for a coincidence window of length tau centred on t:

        alpha = int phi~(t') psi~*(t') dt' / sqrt(int |phi~|^2 dt' int |psi~|^2 dt')

    with every integral over [t - tau/2, t + tau/2] and phi~, psi~ the
    time-domain amplitudes.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")

    window = (t - tau / 2, t + tau / 2)
    lo, hi = _clip_window((psi, phi), *window)

    if hi <= lo:
        raise EmptyWindow(details={"t": t, "tau": tau})

    points = _time_points((psi, phi), lo, hi)

    def density(packet):
        return lambda s: np.abs(packet.time_amplitude(s)) ** 2

    weight_psi = _window_integral(density(psi), lo, hi, points, epsabs=0.0, scale=1.0).real
    weight_phi = _window_integral(density(phi), lo, hi, points, epsabs=0.0, scale=1.0).real

    if weight_psi < EMPTY_TOL or weight_phi < EMPTY_TOL:
        log.warning("No amplitude in window t=%s tau=%s (%.3e, %.3e)", t, tau, weight_psi, weight_phi)
        raise EmptyWindow(details={"t": t, "tau": tau, "weights": [weight_psi, weight_phi]})

    scale = float(np.sqrt(weight_psi * weight_phi))

    def cross(s):
        return phi.time_amplitude(s) * np.conj(psi.time_amplitude(s))

    numerator = _window_integral(cross, lo, hi, points, epsabs=1e-13 * scale, scale=scale)

    return OverlapAlpha.create(numerator / scale)


def alpha_nested_window(psi, phi, t: float, tau: float, samples: int = 201) -> OverlapAlpha:
    """
    Finite-window alpha from the double frequency integral, with the window
    integral of exp(i (w - w') t') done in closed form. Coarse: meant as an
    independent check of the time-domain route.
    """
    lo = min(psi.support()[0], phi.support()[0])
    hi = max(psi.support()[1], phi.support()[1])
    w = np.linspace(lo, hi, samples)
    dw = w[:, None] - w[None, :]

    # int over the window of exp(i dw t') dt'
    kernel = tau * np.exp(1j * dw * t) * np.sinc(dw * tau / (2 * np.pi))

    weights = simpson_weights(w)

    def pair(a, b):
        fa = weights * a.amplitude(w)
        fb = weights * np.conj(b.amplitude(w))
        return fa @ kernel @ fb / (2 * np.pi)

    numerator = pair(phi, psi)
    denominator = np.sqrt(pair(phi, phi).real * pair(psi, psi).real)

    if denominator < EMPTY_TOL:
        raise EmptyWindow(details={"t": t, "tau": tau})

    return OverlapAlpha.create(numerator / denominator, tol=1e-4)


def temporal_distinguishability(a: OverlapAlpha) -> float:
    return 1.0 - a.alpha_sq


def resolve_alpha(psi, phi, window) -> OverlapAlpha:
    """
    Dispatches on the window: None or "infinite" for the overlap limit,
    otherwise a (t, tau) pair.
    """
    if window is None or window == "infinite":
        return alpha_infinite_window(psi, phi)

    t, tau = window

    return alpha_finite_window(psi, phi, t, tau)
