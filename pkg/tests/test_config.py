import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vibrospec.config import (
    ConfigError,
    RunConfig,
    apply_overrides,
    build_system,
    config_to_dict,
    config_to_toml,
    load_config,
    parse_config_dict,
)


def test_defaults_are_complete_and_valid():
    cfg = parse_config_dict({})
    assert cfg.model.n == 1
    assert cfg.numerics.e_max == 12
    assert cfg.numerics.epsilon == 0.01
    assert cfg.numerics.omega_points == 2001
    assert cfg.bath.omega == 1.0


def test_unknown_key_is_named_in_the_error():
    with pytest.raises(ConfigError) as err:
        parse_config_dict({"bath": {"gama": 5.0}})
    assert "bath.gama" in str(err.value)


def test_unknown_section_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config_dict({"bathe": {}})
    assert "bathe" in str(err.value)


def test_type_errors_are_caught():
    with pytest.raises(ConfigError):
        parse_config_dict({"numerics": {"omega_points": 10.5}})
    with pytest.raises(ConfigError):
        parse_config_dict({"model": {"n": 0}})
    with pytest.raises(ConfigError):
        parse_config_dict({"numerics": {"epsilon": -1.0}})
    with pytest.raises(ConfigError):
        parse_config_dict({"model": {"geometry": "pentagon"}})


def test_sweep_axis_and_values_must_travel_together():
    with pytest.raises(ConfigError):
        parse_config_dict({"sweep": {"axis": "gamma"}})
    with pytest.raises(ConfigError):
        parse_config_dict({"sweep": {"values": [1.0]}})
    with pytest.raises(ConfigError):
        parse_config_dict({"sweep": {"axis": "gamma", "values": []}})
    with pytest.raises(ConfigError):
        parse_config_dict({"sweep": {"axis": "epsilon", "values": [1.0]}})
    ok = parse_config_dict({"sweep": {"axis": "V", "values": [0.1, 1.0]}})
    assert ok.sweep.axis == "V"


def test_toml_round_trip(tmp_path):
    cfg = parse_config_dict(
        {"model": {"n": 2, "coupling": 0.5}, "bath": {"gamma": 0.05}}
    )
    path = tmp_path / "run.toml"
    path.write_text(config_to_toml(cfg))
    again = load_config(path)
    assert config_to_dict(again) == config_to_dict(cfg)


def test_json_sidecar_round_trip(tmp_path):
    cfg = parse_config_dict({"model": {"n": 3, "geometry": "ring"}})
    sidecar = {"config": config_to_dict(cfg), "provenance": {"version": "x"}}
    path = tmp_path / "run.meta.json"
    path.write_text(json.dumps(sidecar))
    again = load_config(path)
    assert config_to_dict(again) == config_to_dict(cfg)


def test_overrides_parse_toml_literals():
    raw = config_to_dict(RunConfig())
    out = apply_overrides(
        raw,
        ["bath.gamma=0.05", "model.n=3", "sweep.axis='g'", "sweep.values=[0, 1]",
         "model.geometry='ring'"],
    )
    cfg = parse_config_dict(out)
    assert cfg.bath.gamma == 0.05
    assert cfg.model.n == 3
    assert cfg.sweep.values == [0, 1]
    assert cfg.model.geometry == "ring"


def test_override_bad_shapes_rejected():
    raw = config_to_dict(RunConfig())
    with pytest.raises(ConfigError):
        apply_overrides(raw, ["bath.gamma"])
    with pytest.raises(ConfigError):
        apply_overrides(raw, ["gamma=1"])


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/path.toml")


def test_build_system_uniform_and_multi_term():
    cfg = parse_config_dict({"model": {"n": 2}, "bath": {"g": 1.0, "gamma": 0.5}})
    system = build_system(cfg)
    assert system.n_monomers == 2
    assert system.bath.per_monomer_terms[0][0].gamma == 0.5

    cfg2 = parse_config_dict(
        {"bath": {"terms": [{"g": 0.5, "gamma": 1.0}, {"g": 0.25, "gamma": 2.0, "omega": 0.5}]}}
    )
    system2 = build_system(cfg2)
    assert system2.bath.term_count == 2
    assert system2.bath.per_monomer_terms[0][1].center == 0.5


def test_build_system_surfaces_model_errors_as_config_errors():
    cfg = parse_config_dict({"model": {"n": 2, "geometry": "ring"}})
    with pytest.raises(ConfigError):
        build_system(cfg)


@settings(max_examples=25, deadline=None)
@given(
    n=st.integers(1, 4),
    g=st.floats(0, 5, allow_nan=False),
    gamma=st.floats(0, 10, allow_nan=False),
    e_max=st.integers(0, 12),
)
def test_config_dict_round_trips_through_parse(n, g, gamma, e_max):
    raw = {
        "model": {"n": n},
        "bath": {"g": g, "gamma": gamma},
        "numerics": {"e_max": e_max},
    }
    cfg = parse_config_dict(raw)
    assert config_to_dict(parse_config_dict(config_to_dict(cfg))) == config_to_dict(cfg)
