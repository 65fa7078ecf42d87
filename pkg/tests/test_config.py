"""Config schema: defaults, strict keys, round trips."""

import pytest

import motordse as m
from motordse.config import dump_config, load_config, parse_config_text
from motordse.errors import ConfigError
from motordse.reports import parse_report_config, render_report

from conftest import BUNDLED, CONFIG_DIR


def test_empty_text_yields_defaults():
    cfg = parse_config_text("")
    assert cfg == m.RunConfig()
    assert cfg.motor == m.DEFAULT_MOTOR
    assert cfg.dse.t_start == 1.0


def test_bundled_configs_parse(tmp_path):
    kinds = set()
    for name in BUNDLED:
        cfg = load_config(CONFIG_DIR / f"{name}.cfg")
        kinds.add(cfg.fault.kind)
        assert cfg.sim.seed == 1      # shared seeds across scenarios
        assert cfg.sim.f_sample == 100.0
        if cfg.fault.kind is not m.FaultKind.NONE:
            assert cfg.fault.R_f == 5.0 and cfg.fault.R_g == 0.1
            assert (cfg.fault.t_on, cfg.fault.t_off) == (5.0, 5.25)
    assert kinds == {
        m.FaultKind.NONE, m.FaultKind.LINE_GROUND,
        m.FaultKind.LINE_LINE, m.FaultKind.THREE_PHASE_GROUND,
    }


def test_unknown_key_is_hard_error():
    with pytest.raises(ConfigError, match="'Rz'"):
        parse_config_text("[motor]\nRz = 4\n")
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config_text("[motr]\nRs = 4\n")


def test_bad_value_reports_location():
    with pytest.raises(ConfigError, match="sim.dt"):
        parse_config_text("[sim]\ndt = fast\n")


def test_cross_field_validation_is_config_error():
    with pytest.raises(ConfigError, match="too coarse"):
        parse_config_text("[sim]\ndt = 0.01\nf_sample = 100.0\n")
    with pytest.raises(ConfigError, match="phase"):
        parse_config_text("[fault]\nkind = line_line\nphases = a\n")


def test_dump_parse_round_trip():
    cfg = parse_config_text(
        "[fault]\nkind = line_line_ground\nphases = bc\nR_f = 2.5\n"
        "[dse]\nwindow = 7\ninclude_speed_residual = false\nt_start = 0.25\n"
        "[source]\ntheta0 = 0.3\n"
    )
    again = parse_config_text(dump_config(cfg))
    assert again == cfg


def test_report_echo_round_trip(noisy_record):
    cfg = m.RunConfig()
    text = render_report(cfg, [], [])
    assert parse_report_config(text) == cfg
