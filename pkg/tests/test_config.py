import math

import pytest

from dotmeasure import ConfigError, DetectorRegime
from dotmeasure.config import apply_overrides, build_model, parse_config
from dotmeasure.table import Table, emit_csv, format_csv, read_csv

MINIMAL = """\
[model]
name = double_dot

[params]
Gamma_L = 1
Gamma_R = 1
Omega = 1
epsilon = 0
"""


def test_minimal_config():
    cfg = parse_config(MINIMAL)
    assert cfg.model == "double_dot"
    assert cfg.params == {"Gamma_L": 1.0, "Gamma_R": 1.0, "Omega": 1.0, "epsilon": 0.0}
    assert cfg.run.tmax == 10.0 and cfg.run.method == "exact"


def test_missing_omega_is_named():
    text = MINIMAL.replace("Omega = 1\n", "")
    with pytest.raises(ConfigError, match="Omega") as info:
        parse_config(text)
    assert info.value.key == "Omega"


def test_primed_width_defaults_to_unprimed():
    cfg = parse_config("[model]\nname = single_dot_detector\n[params]\n"
                       "Gamma_L = 1\nGamma_R = 2\ngamma_L = 3\ngamma_R = 4\n")
    assert build_model(cfg.model, cfg.params).params.gamma_Lp == 3.0


def test_unknown_param_rejected_with_line():
    with pytest.raises(ConfigError, match="gamma_R") as info:
        parse_config(MINIMAL + "gamma_R = 3\n")
    assert info.value.key == "gamma_R"
    assert info.value.line == 9


def test_unknown_run_key_and_section():
    with pytest.raises(ConfigError, match="tmin") as info:
        parse_config(MINIMAL + "[run]\ntmin = 3\n")
    assert info.value.line == 10
    with pytest.raises(ConfigError, match="extra"):
        parse_config(MINIMAL + "[extra]\nx = 1\n")


def test_parse_error_carries_line_number():
    with pytest.raises(ConfigError, match="line 4") as info:
        parse_config("[model]\nname = double_dot\n[params]\nthis line has no equals\n")
    assert info.value.line == 4
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("Gamma_L = 1\n")


def test_non_numeric_value():
    with pytest.raises(ConfigError, match="line 6"):
        parse_config(MINIMAL.replace("Gamma_R = 1", "Gamma_R = fast"))


@pytest.mark.parametrize("run, key", [
    ("count = 1", "count"),
    ("tmax = 0", "tmax"),
    ("npoints = 1", "npoints"),
    ("method = euler", "method"),
    ("mode = sweep", "parameter"),
])
def test_run_validation(run, key):
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL + f"[run]\n{run}\n")
    assert info.value.key == key


def test_negative_width_is_config_error():
    with pytest.raises(ConfigError, match="Gamma_L"):
        parse_config(MINIMAL.replace("Gamma_L = 1", "Gamma_L = -1"))


def test_model_param_mismatch():
    with pytest.raises(ConfigError, match="reduced"):
        parse_config(MINIMAL.replace("double_dot", "reduced"))
    with pytest.raises(ConfigError, match="unknown model"):
        parse_config(MINIMAL.replace("double_dot", "triple_dot"))


def test_overrides():
    cfg = apply_overrides(parse_config(MINIMAL), ["Omega=2", "run.tmax=5", "run.method=rk-adaptive"])
    assert cfg.params["Omega"] == 2.0
    assert cfg.run.tmax == 5.0 and cfg.run.method == "rk-adaptive"
    with pytest.raises(ConfigError):
        apply_overrides(cfg, ["Omega"])
    with pytest.raises(ConfigError):
        apply_overrides(cfg, ["run.bogus=1"])
    with pytest.raises(ConfigError):
        apply_overrides(cfg, ["gamma_L=1"])


def test_energies_select_regime():
    base = ("[model]\nname = double_dot_detector\n[params]\nGamma_L = 1\nGamma_R = 1\n"
            "Omega = 1\ngamma_L = 1\ngamma_R = 100\nE0 = 0\nU1 = 4\nU2 = 2\n")
    for ef, regime in ((1.5, DetectorRegime.ALWAYS_BLOCKED),
                       (3.0, DetectorRegime.BLOCKED_BY_DOT1),
                       (5.0, DetectorRegime.NEVER_BLOCKED)):
        cfg = parse_config(base + f"EF_det = {ef}\n")
        assert build_model(cfg.model, cfg.params).params.regime is regime
    with pytest.raises(ConfigError, match="regime"):
        parse_config(base + "EF_det = 3\nregime = NeverBlocked\n")
    with pytest.raises(ConfigError):
        parse_config(base + "EF_det = -1\n")


# ---------------------------------------------------------------- CSV

def test_empty_table_is_header_only(tmp_path):
    path = tmp_path / "t.csv"
    emit_csv(Table(["t [1/Gamma0]", "I_S [e*Gamma0]"]), path)
    assert path.read_bytes() == b"t [1/Gamma0],I_S [e*Gamma0]\n"


def test_one_row_table_is_two_lines(tmp_path):
    path = tmp_path / "t.csv"
    emit_csv(Table(["x", "y"], [[0.1, "NeverBlocked"]]), path)
    assert path.read_bytes() == b"x,y\n0.10000000000000001,NeverBlocked\n"


def test_round_trip_is_bit_exact(tmp_path, rng):
    values = list(rng.normal(size=20) * 10.0 ** rng.integers(-300, 300, 20))
    values += [math.pi, 1 / 3, 5e-324, 1.7976931348623157e308, -0.0]
    path = tmp_path / "t.csv"
    emit_csv(Table(["v"], [[v] for v in values]), path)
    back = read_csv(path)
    assert back.columns == ["v"]
    for a, (b,) in zip(values, back.rows):
        assert a == b and math.copysign(1, a) == math.copysign(1, b)


def test_quoting_and_missing_cells():
    text = format_csv(Table(["a,b", "c"], [[None, "x\"y"]]))
    assert text == '"a,b",c\n,"x""y"\n'


def test_emit_to_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError, match="file"):
        emit_csv(Table(["x"]), blocker / "sub" / "t.csv")
