import json

import numpy as np
import pytest

from structs.analysis_config import INFINITE, AnalysisConfig, Window
from structs.exceptions import ConfigError, MatrixFormatError, NotUnitary
from structs.statistics import Statistics
from structs.wavepacket import GaussianPacket, TabulatedPacket
from util.config import PROFILES, Tolerances, tolerance_profile
from util.parser import Parser
from util.scattering import balanced_pc, haar_scattering
from util.smallmat import matrix_to_dict

# ======================================
# 🔧 Helpers
# ======================================


def _write_json(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def _write_packet_csv(path, omega, values, header="omega,re,im"):
    lines = [header] + [f"{float(w)!r},{float(np.real(v))!r},{float(np.imag(v))!r}" for w, v in zip(omega, values)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# ======================================
# ✅ Grid specs
# ======================================


@pytest.mark.parametrize("text, expected", [("10x10", (10, 10)), ("200X50", (200, 50)), (" 3 x 4 ", (3, 4))])
def test_grid(text, expected):
    assert Parser.grid(text) == expected


@pytest.mark.parametrize("text", ["10by10", "10x", "x10", "0x5", "-1x3", ""])
def test_bad_grid(text):
    with pytest.raises(ConfigError):
        Parser.grid(text)


# ======================================
# 📄 Matrix files
# ======================================


def test_matrix_json_bare_and_wrapped(tmp_path):
    data = matrix_to_dict(balanced_pc().S)

    bare = Parser.matrix_json(_write_json(tmp_path / "bare.json", data))
    wrapped = Parser.matrix_json(_write_json(tmp_path / "wrapped.json", {"S": data}))

    assert np.array_equal(bare.S, wrapped.S)
    assert np.allclose(bare.S, balanced_pc().S)


def test_matrix_json_rejects_non_unitary(tmp_path):
    data = matrix_to_dict(2 * np.eye(4))

    with pytest.raises(NotUnitary):
        Parser.matrix_json(_write_json(tmp_path / "s.json", data))


def test_matrix_json_rejects_wrong_shape(tmp_path):
    data = {"rows": 3, "cols": 4, "re": [0.0] * 12, "im": [0.0] * 12}

    with pytest.raises(MatrixFormatError):
        Parser.matrix_json(_write_json(tmp_path / "s.json", data))


def test_unreadable_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")

    with pytest.raises(ConfigError):
        Parser.read_json(path)

    with pytest.raises(ConfigError):
        Parser.read_json(tmp_path / "missing.json")


# ======================================
# 🌊 Wavepacket files
# ======================================


def test_wavepacket_csv(tmp_path):
    omega = np.linspace(-8, 8, 161)
    values = GaussianPacket(0.0, 1.0).amplitude(omega)
    packet = Parser.wavepacket_csv(_write_packet_csv(tmp_path / "p.csv", omega, values))

    assert isinstance(packet, TabulatedPacket)
    assert packet.omega.size == 161
    assert packet.normalization_factor == pytest.approx(1.0, abs=1e-6)


def test_wavepacket_csv_needs_header(tmp_path):
    path = _write_packet_csv(tmp_path / "p.csv", [0, 1, 2], [1, 1, 1], header="w,a,b")

    with pytest.raises(ConfigError):
        Parser.wavepacket_csv(path)


def test_wavepacket_csv_reports_bad_rows(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("omega,re,im\n0,1,0\n1,one,0\n2,1,0\n", encoding="utf-8")

    with pytest.raises(ConfigError):
        Parser.wavepacket_csv(path)


def test_unknown_wavepacket_kind(tmp_path):
    with pytest.raises(ConfigError):
        Parser.wavepacket({"kind": "lorentzian"}, tmp_path)


# ======================================
# ⚙️ Analysis configs
# ======================================


def test_overrides_alone_make_a_config():
    config = Parser.analysis_config(None, {"preset": "balanced_pc", "alpha_sq": 1.0})

    assert config.scattering_source == "preset:balanced_pc"
    assert config.alpha_sq == 1.0
    assert config.window == INFINITE
    assert config.statistics is Statistics.BOSONIC


def test_config_file(tmp_path):
    omega = np.linspace(-8, 8, 161)
    _write_packet_csv(tmp_path / "phi.csv", omega, GaussianPacket(0.0, 1.0, delay=0.5).amplitude(omega))
    _write_json(tmp_path / "s.json", {"S": matrix_to_dict(balanced_pc().S)})

    path = _write_json(tmp_path / "config.json", {
        "scattering": {"file": "s.json"},
        "wavepackets": {
            "psi": {"kind": "gaussian", "center": 0.0, "width": 1.0},
            "phi": {"kind": "tabulated", "file": "phi.csv"},
        },
        "window": {"tau": 2.0, "t": 0.25},
        "statistics": "fermionic",
        "tolerances": {"oracle": 1e-7},
        "budget": 500,
        "seed": 4,
    })

    config = Parser.analysis_config(path)

    assert config.scattering_source == "file:s.json"
    assert isinstance(config.phi, TabulatedPacket)
    assert config.window == Window(tau=2.0, t=0.25)
    assert config.statistics is Statistics.FERMIONIC
    assert config.tolerances.oracle == 1e-7
    assert config.budget == 500


def test_haar_preset_draws_from_seed(tmp_path):
    path = _write_json(tmp_path / "config.json", {"scattering": "haar", "alpha_sq": 0.5, "seed": 4})

    from_file = Parser.analysis_config(path)
    from_flag = Parser.analysis_config(path, {"seed": 9})

    assert from_file.scattering_source == "haar:4"
    assert np.array_equal(from_file.scattering.S, haar_scattering(4).S)
    assert from_flag.scattering_source == "haar:9"
    assert not np.array_equal(from_flag.scattering.S, from_file.scattering.S)


def test_alpha_override_replaces_wavepackets(tmp_path):
    path = _write_json(tmp_path / "config.json", {
        "scattering": "balanced_pc",
        "wavepackets": {"psi": {}, "phi": {"delay": 1.0}},
    })

    config = Parser.analysis_config(path, {"alpha_sq": 0.3})

    assert config.alpha_sq == 0.3
    assert config.psi is None


def test_tau_override_keeps_window_centre(tmp_path):
    path = _write_json(tmp_path / "config.json", {
        "scattering": "balanced_pc",
        "wavepackets": {"psi": {}, "phi": {}},
        "window": {"tau": 5.0, "t": 1.0},
    })

    assert Parser.analysis_config(path, {"tau": 2.0}).window == Window(tau=2.0, t=1.0)


def test_config_needs_one_alpha_source():
    with pytest.raises(ConfigError):
        Parser.analysis_config(None, {"preset": "balanced_pc"})


def test_config_needs_a_splitter():
    with pytest.raises(ConfigError):
        Parser.analysis_config(None, {"alpha_sq": 0.5})


def test_unknown_preset_is_a_config_error():
    with pytest.raises(ConfigError):
        Parser.analysis_config(None, {"preset": "nope", "alpha_sq": 0.5})


def test_bad_statistics_is_a_config_error():
    with pytest.raises(ConfigError):
        Parser.analysis_config(None, {"preset": "balanced_pc", "alpha_sq": 0.5, "statistics": "anyonic"})


def test_window_must_be_positive():
    with pytest.raises(ConfigError):
        Parser.window({"tau": -1.0})


def test_half_a_wavepacket_pair():
    with pytest.raises(ConfigError):
        AnalysisConfig(scattering=balanced_pc(), scattering_source="test", psi=GaussianPacket(0.0, 1.0))


# ======================================
# 📏 Tolerance profiles
# ======================================


def test_tolerance_profile_from_environment(monkeypatch):
    monkeypatch.setenv("BELLSPLIT_TOLERANCE_PROFILE", "strict")
    assert tolerance_profile() == PROFILES["strict"]


def test_unknown_tolerance_profile():
    with pytest.raises(ConfigError):
        tolerance_profile("lenient")


def test_tolerance_overrides_are_checked():
    with pytest.raises(ConfigError):
        Tolerances().with_overrides({"oracel": 1e-6})

    with pytest.raises(ConfigError):
        Tolerances().with_overrides({"oracle": 0})


def test_strict_is_ten_times_tighter():
    strict, default = PROFILES["strict"].as_dict(), PROFILES["default"].as_dict()

    for key, value in default.items():
        assert strict[key] == pytest.approx(value / 10)
