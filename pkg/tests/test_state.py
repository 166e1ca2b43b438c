import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from structs.exceptions import ConfigError, ZeroCoincidence
from structs.polarization_state import PolarizationState
from structs.scattering_matrix import HybridMatrix
from structs.statistics import Statistics
from util.scattering import balanced_mixing, gammas, haar_scattering, hybrid, preset, realize_gram
from util.smallmat import det2
from util.state import (
    build_rho,
    coincidence_denominator,
    concurrence_closed,
    concurrence_gamma,
    concurrence_report,
    concurrence_wootters,
    mandel_dip,
    state_from,
    wootters_roots,
    wootters_spectrum,
)

ALPHAS = [0.0, 0.25, 0.5, 0.75, 1.0]

# ======================================
# 🔧 Helpers
# ======================================


def _bell_state():
    v = np.array([1, 0, 0, 1]) / np.sqrt(2)
    return PolarizationState(rho=np.outer(v, v.conj()), alpha_sq=1.0)


def _werner(p):
    v = np.array([0, 1, -1, 0]) / np.sqrt(2)
    rho = p * np.outer(v, v) + (1 - p) * np.eye(4) / 4
    return PolarizationState(rho=rho.astype(complex), alpha_sq=1.0)


def _rotated_diag(a, b, theta):
    c, s = np.cos(theta), np.sin(theta)
    v = np.array([[c, -s], [s, c]])
    return v @ np.diag([a, b]) @ v.T


# ======================================
# ✅ State construction
# ======================================


@pytest.mark.parametrize("alpha_sq", ALPHAS)
def test_rho_is_a_rank_two_state(haar_instance, alpha_sq):
    _, _, pair = haar_instance
    defects = build_rho(pair, alpha_sq).defects()

    assert defects["hermiticity"] < 1e-14
    assert defects["trace"] < 1e-12
    assert defects["min_eigenvalue"] > -1e-12
    assert abs(defects["third_eigenvalue"]) < 1e-12


def test_alpha_sq_out_of_range(pc_splitter):
    with pytest.raises(ConfigError):
        state_from(pc_splitter, 1.2)


def test_full_bunching_leaves_no_coincidences(parallel_splitter):
    with pytest.raises(ZeroCoincidence):
        state_from(parallel_splitter, 1.0)


def test_fermions_antibunch(parallel_splitter):
    state = state_from(parallel_splitter, 1.0, Statistics.FERMIONIC)
    assert state.normalization > 0


def test_state_serializes_provenance(pc_splitter):
    data = state_from(pc_splitter, 0.5).to_dict()

    assert data["provenance"] == {"alpha_sq": 0.5, "statistics": "bosonic"}
    assert data["rho"]["rows"] == 4


# ======================================
# 🔁 Concurrence routes
# ======================================


@pytest.mark.parametrize("alpha_sq", ALPHAS)
def test_concurrence_routes_agree(haar_instance, alpha_sq):
    _, X, pair = haar_instance
    closed = concurrence_closed(X, alpha_sq)

    assert concurrence_gamma(pair, alpha_sq) == pytest.approx(closed, abs=1e-10)
    assert concurrence_wootters(build_rho(pair, alpha_sq)) == pytest.approx(closed, abs=1e-8)


def test_fermionic_concurrence_routes_agree(haar_instance):
    s, X, _ = haar_instance
    state = state_from(s, 0.6, Statistics.FERMIONIC)

    assert concurrence_wootters(state) == pytest.approx(concurrence_closed(X, 0.6, "fermionic"), abs=1e-8)


def test_distinguishable_photons_are_unentangled(haar_instance):
    _, X, _ = haar_instance
    assert concurrence_closed(X, 0.0) == 0.0


def test_balanced_pc_makes_a_bell_state(pc_splitter):
    X = hybrid(pc_splitter)

    assert concurrence_closed(X, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert concurrence_closed(X, 0.5) == pytest.approx(0.5, abs=1e-12)


def test_identity_splitter_is_unentangled():
    X = hybrid(preset("identity"))

    assert coincidence_denominator(X, 0.7) == pytest.approx(1.0)
    assert concurrence_closed(X, 0.7) == 0.0


def test_concurrence_report_checks_all_routes(haar_splitter):
    report = concurrence_report(haar_splitter, 0.8)

    assert report.disagreement() < 1e-8
    assert set(report.to_dict()) == {"closed", "gamma", "wootters", "mandel_dip", "coincidence_prob"}


@settings(max_examples=40, deadline=None)
@given(alpha_sq=st.floats(0.0, 1.0), seed=st.integers(0, 10_000))
def test_concurrence_is_bounded(alpha_sq, seed):
    X = hybrid(haar_scattering(seed))
    c = concurrence_closed(X, alpha_sq)

    assert 0.0 <= c <= 1.0
    assert c <= concurrence_closed(X, 1.0) + 1e-12


@pytest.mark.parametrize("statistics", [Statistics.BOSONIC, Statistics.FERMIONIC])
def test_concurrence_grows_with_overlap(haar_instance, statistics):
    _, X, _ = haar_instance
    values = [concurrence_closed(X, a, statistics) for a in np.linspace(0.0, 1.0, 41)]

    assert np.all(np.diff(values) >= -1e-12)


@pytest.mark.parametrize("gram", [
    # rank one: Det X^dag X = 0
    0.3 * np.ones((2, 2)),
    # unit eigenvalue: Det(1 - X^dag X) = 0
    _rotated_diag(1.0, 0.3, 0.4),
])
def test_concurrence_vanishes_on_singular_spans(gram):
    X = HybridMatrix.from_gram(gram)
    state = state_from(realize_gram(gram), 0.7)

    # rounding in the vanishing determinant surfaces under a square root
    assert concurrence_closed(X, 0.7) == pytest.approx(0.0, abs=1e-6)
    assert concurrence_wootters(state) == pytest.approx(0.0, abs=1e-6)


def test_concurrence_is_positive_off_singular_spans(haar_instance):
    _, X, _ = haar_instance
    spans = min(det2(X.gram).real, det2(np.eye(2) - X.gram).real)

    assert spans > 0.0
    assert concurrence_closed(X, 0.5) > 0.0


# ======================================
# 🧮 Wootters
# ======================================


def test_wootters_on_bell_state():
    assert concurrence_wootters(_bell_state()) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p", [0.0, 0.2, 1 / 3, 0.6, 1.0])
def test_wootters_on_werner_states(p):
    assert concurrence_wootters(_werner(p)) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-12)


def test_wootters_routes_share_a_spectrum(haar_instance):
    _, _, pair = haar_instance
    rho = build_rho(pair, 0.5).rho

    assert np.allclose(np.sort(wootters_roots(rho) ** 2), np.sort(wootters_spectrum(rho)), atol=1e-10)


# ======================================
# 📉 Mandel dip
# ======================================


def test_dip_depth(parallel_splitter):
    dip = mandel_dip(hybrid(parallel_splitter), 1.0)

    assert dip.classical_prob == pytest.approx(0.5)
    assert dip.dip == pytest.approx(-0.5)
    assert dip.coincidence_prob == pytest.approx(0.0, abs=1e-15)


def test_fermions_see_a_peak(parallel_splitter):
    dip = mandel_dip(hybrid(parallel_splitter), 1.0, Statistics.FERMIONIC)
    assert dip.coincidence_prob == pytest.approx(1.0)


def test_orthogonal_polarizations_show_no_dip(pc_splitter):
    assert mandel_dip(hybrid(pc_splitter), 1.0).dip == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("theta", [0.3, 1.1])
def test_coincidence_probability_is_the_normalization(theta):
    s = balanced_mixing(theta)
    X = hybrid(s)
    dip = mandel_dip(X, 0.4)

    # N / 2 is the coincidence probability
    assert dip.coincidence_prob == pytest.approx(state_from(s, 0.4).normalization / 2, abs=1e-12)
    assert dip.coincidence_prob == pytest.approx(coincidence_denominator(X, 0.4), abs=1e-12)


def test_gamma_pair_statistics_flag(pc_splitter):
    assert gammas(pc_splitter, "fermionic").statistics is Statistics.FERMIONIC
