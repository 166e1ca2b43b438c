import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from structs.analyzer import AnalyzerSetting
from structs.exceptions import NotUnitary
from structs.polarization_state import PolarizationState
from structs.statistics import Statistics
from util.bell import (
    MIN_BUDGET,
    U2_ACTIVE,
    U3_ACTIVE,
    active_branch,
    chsh_bruteforce,
    chsh_value,
    coincidence_probs,
    correlation_matrix,
    correlator_e,
    correlator_trace,
    emax,
    emax_closed,
    u_eigen_closed,
)
from util.scattering import haar_scattering, hybrid, preset
from util.smallmat import haar_unitary
from util.state import build_rho, concurrence_closed, state_from

SQRT2 = np.sqrt(2.0)

# ======================================
# 🔧 Helpers
# ======================================


def _random_analyzer(seed):
    return AnalyzerSetting.create(haar_unitary(2, seed))


def _spectrum_gap(a, b):
    return float(np.max(np.abs(np.sort(a) - np.sort(b))))


# ======================================
# 🔭 Analyzers
# ======================================


def test_analyzer_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        AnalyzerSetting.create(np.array([[1, 0], [0, 2]]))


@settings(max_examples=30, deadline=None)
@given(theta=st.floats(0.0, np.pi), phi=st.floats(-np.pi, np.pi), lam=st.floats(0.0, 2 * np.pi))
def test_analyzer_measures_along_its_axis(theta, phi, lam):
    setting = AnalyzerSetting.from_angles(theta, phi, lam)
    n = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])

    assert np.allclose(setting.axis(), n, atol=1e-12)


def test_along_normalizes():
    setting = AnalyzerSetting.along([0.0, 3.0, 4.0])
    assert np.allclose(setting.axis(), [0.0, 0.6, 0.8], atol=1e-12)


def test_identity_measures_h_and_v():
    assert np.allclose(AnalyzerSetting.identity().axis(), [0, 0, 1])


# ======================================
# 🔁 Correlators
# ======================================


@pytest.mark.parametrize("seed", range(5))
def test_correlator_routes_agree(seed):
    state = state_from(haar_scattering(seed), 0.7)
    rl, rr = _random_analyzer(100 + seed), _random_analyzer(200 + seed)

    assert correlator_e(state, rl, rr) == pytest.approx(correlator_trace(state, rl, rr), abs=1e-12)
    assert np.sum(coincidence_probs(state, rl, rr)) == pytest.approx(1.0, abs=1e-12)


def test_correlation_matrix_routes_agree(haar_instance):
    _, _, pair = haar_instance
    R = correlation_matrix(build_rho(pair, 0.3)).R

    assert np.max(np.abs(R)) <= 1 + 1e-12


def test_bell_state_correlations(pc_splitter):
    R = correlation_matrix(state_from(pc_splitter, 1.0)).R
    assert np.allclose(np.abs(R), np.eye(3), atol=1e-12)


# ======================================
# 🧮 Closed-form eigenvalues
# ======================================


@pytest.mark.parametrize("alpha_sq", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_closed_eigenvalues_match_spectrum(haar_instance, alpha_sq):
    _, X, pair = haar_instance
    spectrum = correlation_matrix(build_rho(pair, alpha_sq)).spectrum()

    assert _spectrum_gap(spectrum, u_eigen_closed(X, alpha_sq)) < 1e-8


def test_fermionic_eigenvalues_match_spectrum(haar_instance):
    s, X, _ = haar_instance
    spectrum = correlation_matrix(state_from(s, 0.4, Statistics.FERMIONIC)).spectrum()

    assert _spectrum_gap(spectrum, u_eigen_closed(X, 0.4, Statistics.FERMIONIC)) < 1e-8


def test_gisin_bound_for_indistinguishable_photons(haar_instance):
    _, X, _ = haar_instance
    c = concurrence_closed(X, 1.0)
    value, _, _ = emax_closed(X, 1.0)

    assert value == pytest.approx(2 * np.sqrt(1 + c ** 2), abs=1e-8)


@pytest.mark.parametrize("alpha_sq", [0.2, 0.5, 0.8])
def test_emax_lies_in_the_concurrence_band(haar_instance, alpha_sq):
    _, X, _ = haar_instance
    c = concurrence_closed(X, alpha_sq)
    value, _, _ = emax_closed(X, alpha_sq)

    assert 2 * SQRT2 * c - 1e-8 <= value <= 2 * np.sqrt(1 + c ** 2) + 1e-8


@pytest.mark.parametrize("seed", range(3))
def test_emax_ignores_local_unitaries(haar_splitter, seed):
    state = state_from(haar_splitter, 0.6)
    m = np.kron(haar_unitary(2, 10 + seed), haar_unitary(2, 20 + seed))
    rotated = PolarizationState(rho=m @ state.rho @ m.conj().T, alpha_sq=0.6)

    assert correlation_matrix(rotated).horodecki() == pytest.approx(
        correlation_matrix(state).horodecki(), abs=1e-8)


def test_separable_states_are_never_flagged(haar_instance):
    _, X, _ = haar_instance
    assert not emax(X, 0.0).violating


def test_balanced_pc_reaches_tsirelson(pc_splitter):
    report = emax(hybrid(pc_splitter), 1.0)

    assert report.emax_closed == pytest.approx(2 * SQRT2, abs=1e-12)
    assert report.emax_horodecki == pytest.approx(2 * SQRT2, abs=1e-10)
    assert report.violating


def test_distinguishable_photons_do_not_violate(pc_splitter):
    report = emax(hybrid(pc_splitter), 0.0)

    assert report.emax_closed == pytest.approx(2.0, abs=1e-12)
    assert not report.violating


def test_emax_without_state_uses_a_realized_splitter(haar_splitter):
    X = hybrid(haar_splitter)
    report = emax(X, 0.6)
    direct = emax(X, 0.6, state=state_from(haar_splitter, 0.6))

    assert report.emax_horodecki == pytest.approx(direct.emax_horodecki, abs=1e-9)


def test_emax_is_order_free_in_branches():
    assert active_branch(0.2, 0.3) == U3_ACTIVE
    assert active_branch(0.3, 0.2) == U2_ACTIVE


def test_identity_splitter_cannot_violate():
    report = emax(hybrid(preset("identity")), 1.0)
    assert report.emax_closed <= 2 + 1e-12


# ======================================
# 🎯 Brute force
# ======================================


def test_chsh_value_on_bell_state(pc_splitter):
    state = state_from(pc_splitter, 1.0)
    R = correlation_matrix(state).R

    b, b_prime = np.array([1.0, 0, 0]), np.array([0, 0, 1.0])
    value = chsh_value(
        state,
        AnalyzerSetting.along(R @ (b + b_prime)),
        AnalyzerSetting.along(R @ (b - b_prime)),
        AnalyzerSetting.along(b),
        AnalyzerSetting.along(b_prime),
    )

    assert value == pytest.approx(2 * SQRT2, abs=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_bruteforce_reaches_horodecki(seed):
    state = state_from(haar_scattering(seed), 0.5)
    bound = correlation_matrix(state).horodecki()
    found = chsh_bruteforce(state)

    assert found <= bound + 1e-6
    assert found >= bound - 1e-4


def test_bruteforce_is_deterministic(pc_splitter):
    state = state_from(pc_splitter, 0.8)
    assert chsh_bruteforce(state, MIN_BUDGET) == chsh_bruteforce(state, MIN_BUDGET)


def test_bruteforce_budget_floor(pc_splitter):
    with pytest.raises(ValueError):
        chsh_bruteforce(state_from(pc_splitter, 1.0), MIN_BUDGET - 1)
