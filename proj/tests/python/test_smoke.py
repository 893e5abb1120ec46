import math

import pytest

import resetsim


def test_decay_rate_saturates_at_half_kappa():
    assert resetsim.purcell_decay_rate(15e6, 10e6) == pytest.approx(7.5e6, rel=1e-12)
    assert resetsim.purcell_decay_rate(15e6, 0.0, 40e6) == 0.0


def test_thermal_round_trip():
    p = resetsim.thermal_population(4.86e9, 0.041)
    assert p == pytest.approx(0.0034, abs=1e-4)
    assert resetsim.effective_temperature(4.86e9, p) == pytest.approx(0.041, rel=1e-12)
    with pytest.raises(resetsim.NonThermalError):
        resetsim.effective_temperature(4.86e9, 0.6)
    assert issubclass(resetsim.NonThermalError, resetsim.Error)


def test_parse_quantity():
    assert resetsim.parse_quantity("4.86GHz", "Hz") == 4.86e9
    with pytest.raises(resetsim.DomainError):
        resetsim.parse_quantity("4.86GHz", "K")


def test_network_outputs():
    s21 = resetsim.dissipator_s21([4.23e9, 5.5e9])
    assert len(s21) == 2
    assert abs(s21[0]) > abs(s21[1])
    assert resetsim.diplexer_isolation_db() < -60.0


def test_fringe_linecut_keywords():
    tp = [i * 1e-9 for i in range(0, 101, 2)]
    fit = resetsim.fringe_linecut(tp, 0.0, bath_temperature_k=0.0, t1_s=0.0)
    assert fit["oscillatory"]
    assert fit["envelope_s"] == pytest.approx(2 / (2 * math.pi * 15e6), rel=0.05)
    with pytest.raises(TypeError):
        resetsim.fringe_linecut(tp, 0.0, bogus=1.0)


def test_benchmark_is_deterministic():
    a = resetsim.benchmark("eg", seed=3, shots=2000)
    b = resetsim.benchmark("eg", seed=3, shots=2000)
    assert a == b
    assert 0.0 < a["residual"] < 0.05


def test_cli_in_process(tmp_path):
    code, out, err = resetsim.run_cli(["thermal", "--freq", "4.86GHz", "--temp", "41mK", "--out", str(tmp_path)])
    assert code == 0, err
    assert out.startswith("p_e = 0.33")
    assert (tmp_path / "manifest.json").exists()
    code, _, err = resetsim.run_cli(["--config", str(tmp_path / "nope.json"), "thermal"])
    assert code == 2
    assert "nope.json" in err
