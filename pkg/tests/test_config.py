"""Configuration loading: defaults, validation, overrides, hashing."""

import math

import pytest

from polaron_dicke.config import ConfigError, config_hash, load_config, parse_area


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.toml"
    path.write_text("")
    cfg = load_config(path)
    assert cfg.temperature == 4.0
    assert cfg.gamma == 0.005  # 0.2 ns radiative lifetime
    assert cfg.material.mass_density == 5370.0
    assert cfg.material.deform_h == -3.5
    assert cfg.pulse_area == pytest.approx(math.pi / 8.0, rel=1e-15)
    assert cfg.drive_renorm is True


def test_no_file_gives_defaults():
    cfg = load_config(None)
    assert cfg.temperature == 4.0


def test_negative_temperature_rejected(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[bath]\ntemperature = -1\n")
    with pytest.raises(ConfigError, match="bath.temperature"):
        load_config(path)


def test_unknown_key_rejected_with_location(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[bath]\ntemperatur = 4\n")
    with pytest.raises(ConfigError, match="bath.temperatur"):
        load_config(path)
    path.write_text("[numerics.quadrature]\nreltol = 1e-9\n")
    with pytest.raises(ConfigError, match="numerics.quadrature.reltol"):
        load_config(path)


def test_parse_error_reports_position(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("[bath\ntemperature = 4\n")
    with pytest.raises(ConfigError, match="line"):
        load_config(path)


@pytest.mark.parametrize(
    "text,expected",
    [
        ("pi/8", math.pi / 8.0),
        ("pi", math.pi),
        ("2*pi", 2.0 * math.pi),
        ("0.5pi", 0.5 * math.pi),
        ("3pi/4", 0.75 * math.pi),
        ("1.25", 1.25),
        (0.7, 0.7),
        (2, 2.0),
    ],
)
def test_parse_area(text, expected):
    assert parse_area(text) == pytest.approx(expected, rel=1e-15)


def test_parse_area_matches_documented_value():
    assert f"{parse_area('pi/8'):.10f}" == "0.3926990817"


def test_parse_area_rejects_garbage():
    for bad in ("pie", "pi/", "two*pi", "", True):
        with pytest.raises(ConfigError):
            parse_area(bad)


def test_set_overrides(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text("[bath]\ntemperature = 10\n")
    cfg = load_config(path, overrides=["bath.temperature=77", "pulse.area=pi/2"])
    assert cfg.temperature == 77.0
    assert cfg.pulse_area == pytest.approx(math.pi / 2.0, rel=1e-15)
    with pytest.raises(ConfigError, match="no.such.key"):
        load_config(path, overrides=["no.such.key=1"])
    with pytest.raises(ConfigError):
        load_config(path, overrides=["bath.temperature"])


def test_validation_catches_bad_values(tmp_path):
    cases = [
        "[bath]\ngamma = 0.0\n",
        "[grid]\nn_points = 1\n",
        "[grid]\nn_points = 2.5\n",
        "[numerics.integrator]\nmethod = 'leapfrog'\n",
        "[output]\nformats = ['csv', 'xml']\n",
        "[pulse]\nfwhm = -3.0\n",
        "[numerics.quadrature]\nomega_max = 0.5\n",
    ]
    for text in cases:
        path = tmp_path / "case.toml"
        path.write_text(text)
        with pytest.raises(ConfigError):
            load_config(path)


def test_scenario_defaults_yield_to_user_values(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text("[grid]\nt_max = 42.0\n")
    cfg = load_config(path, scenario_defaults={"grid": {"t_max": 10.0, "n_points": 501}})
    assert cfg.t_max == 42.0
    assert cfg.n_points == 501


def test_hash_deterministic_and_sensitive(tmp_path):
    a = load_config(None)
    b = load_config(None)
    assert a.hash == b.hash
    c = load_config(None, overrides=["bath.temperature=5"])
    assert c.hash != a.hash
    assert config_hash(a.resolved) == a.hash


def test_typed_accessors_roundtrip():
    cfg = load_config(None)
    assert cfg.quadrature.rel_tol == 1e-10
    assert cfg.integrator.method == "rk45-adaptive"
    pulse = cfg.pulse()
    assert pulse.fwhm == pytest.approx(20.0, rel=1e-15)
    assert cfg.out_dir == "out"
    assert cfg.formats == ["csv", "json"]
