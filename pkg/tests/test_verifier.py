import pytest

import util.bell as bell_module
import util.verifier as verifier_module
from structs.result import Result
from util.config import PROFILES
from util.verifier import Verifier

ERROR = Result.ERROR
SUCCESS = Result.SUCCESS

# ======================================
# 🔁 Fixtures
# ======================================


@pytest.fixture(scope="module")
def small_report():
    return Verifier(4, seed=7).run()


# ======================================
# ✅ Campaign
# ======================================


def test_small_campaign_passes(small_report):
    failing = {name: s.max_deviation for name, s in small_report.suites.items() if s.result == ERROR}

    assert failing == {}
    assert small_report.result == SUCCESS


def test_every_suite_ran(small_report):
    for name, suite in small_report.suites.items():
        assert suite.checked + suite.skipped > 0, name


def test_report_embeds_run_parameters(small_report):
    data = small_report.to_dict()

    assert data["count"] == 4
    assert data["seed"] == 7
    assert data["passed"] is True
    assert data["tolerances"] == PROFILES["default"].as_dict()
    assert set(data["suites"]["gisin"]) == {"max_deviation", "tolerance", "checked", "skipped", "passed"}


def test_campaign_is_reproducible():
    first = Verifier(2, seed=3).run().to_dict()
    second = Verifier(2, seed=3).run().to_dict()

    assert first == second


def test_count_must_be_positive():
    with pytest.raises(ValueError):
        Verifier(0)


# ======================================
# 🧪 Negative control
# ======================================


def test_sign_flip_is_caught(monkeypatch):
    closed = verifier_module.concurrence_closed

    def flipped(X, alpha_sq, statistics="bosonic"):
        return -closed(X, alpha_sq, statistics)

    monkeypatch.setattr(verifier_module, "concurrence_closed", flipped)
    report = Verifier(2, seed=1).run()

    assert report.result == ERROR
    assert report.suites["concurrence_wootters"].result == ERROR



def test_broken_gamma_form_of_r_is_caught(monkeypatch):
    gamma_r = bell_module._gamma_r
    monkeypatch.setattr(bell_module, "_gamma_r", lambda state: -gamma_r(state))

    report = Verifier(2, seed=0).run()

    assert report.result == ERROR
    assert report.suites["bell_spectrum"].result == ERROR


def test_broken_closed_emax_is_caught(monkeypatch):
    closed = bell_module.u_eigen_closed

    def scaled(X, alpha_sq, statistics="bosonic"):
        return tuple(1.01 * u for u in closed(X, alpha_sq, statistics))

    monkeypatch.setattr(bell_module, "u_eigen_closed", scaled)
    report = Verifier(2, seed=0).run()

    assert report.result == ERROR
    assert report.suites["emax_horodecki"].result == ERROR
    assert report.suites["bell_spectrum"].result == SUCCESS


def test_result_maps_to_passed_flag():
    assert Result.of(True) == SUCCESS
    assert Result.of(False).value is False
