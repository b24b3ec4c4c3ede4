import math

import pytest

from ringmzi.errors import ConfigError
from ringmzi.expfile import (
    dumps_experiment,
    load_experiment,
    loads_experiment,
)

BASE = """\
[source1]
nbar = 0.110
purity = 0.92
modes = 2

[source2]
nbar = 0.110
purity = 0.92
modes = 2

[mzi]
theta_rad = 0.6301

[detectors]
eta_idler_1 = 0.0135
eta_idler_2 = 0.0287
eta_signal_c = 0.75
eta_signal_d = 0.75

[truncation]
max_total_pairs = 10

[sweep]
phi_start_rad = 0.0
phi_stop_rad = 6.283185307179586
points = 32
"""

JSA = """
[jsa]
pump_center_nm = 1546.12
pump_fwhm_pm = 200.0
pump_res_fwhm_pm = 33.0
signal_center_nm = 1552.52
signal_fwhm_pm = 33.0
idler_center_nm = 1539.77
idler_fwhm_pm = 31.0
filter_ghz = 200.0
"""

CROSSTALK = """
[crosstalk]
rings = s1, s2
s1_mzi_coeff_pm_per_mw = 0.7166
s1_self_coeff_pm_per_mw = 10.0
s1_quiescent_mw = 30.0
s2_mzi_coeff_pm_per_mw = 0.5166
s2_self_coeff_pm_per_mw = 10.0
s2_quiescent_mw = 30.0
mzi_max_mw = 60.0
points = 13
"""


class TestParsing:
    def test_required_fields(self):
        exp = loads_experiment(BASE)
        assert exp.source1.nbar == 0.110
        assert exp.theta_rad == 0.6301
        assert exp.eta_idler_2 == 0.0287
        assert exp.max_total_pairs == 10
        assert exp.jsa is None
        assert exp.crosstalk is None

    def test_optional_sections(self):
        exp = loads_experiment(BASE + JSA + CROSSTALK)
        assert exp.jsa.pump_fwhm_pm == 200.0
        assert exp.jsa.grid_points == 512  # default
        assert set(exp.crosstalk.rings) == {"s1", "s2"}
        assert exp.crosstalk.mzi_max_mw == 60.0

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="unknown section"):
            loads_experiment(BASE + "\n[extra]\nx = 1\n")

    def test_unknown_key_rejected(self):
        bad = BASE.replace("theta_rad = 0.6301", "theta_rad = 0.6301\nbogus = 2")
        with pytest.raises(ConfigError, match="unknown keys"):
            loads_experiment(bad)

    def test_missing_section_rejected(self):
        bad = BASE.replace("[truncation]\nmax_total_pairs = 10\n", "")
        with pytest.raises(ConfigError, match="missing section"):
            loads_experiment(bad)

    def test_missing_key_rejected(self):
        bad = BASE.replace("purity = 0.92\nmodes = 2\n\n[source2]",
                           "modes = 2\n\n[source2]", 1)
        with pytest.raises(ConfigError, match="missing key"):
            loads_experiment(bad)

    def test_non_numeric_value_rejected(self):
        bad = BASE.replace("theta_rad = 0.6301", "theta_rad = abc")
        with pytest.raises(ConfigError, match="not a number"):
            loads_experiment(bad)

    def test_non_integer_points_rejected(self):
        bad = BASE.replace("points = 32", "points = 32.5")
        with pytest.raises(ConfigError, match="integer"):
            loads_experiment(bad)

    def test_crosstalk_unknown_ring_key_rejected(self):
        bad = BASE + CROSSTALK + "s3_quiescent_mw = 1.0\n"
        with pytest.raises(ConfigError, match="unknown keys"):
            loads_experiment(bad)

    def test_crosstalk_requires_ring_list(self):
        bad = BASE + "\n[crosstalk]\nmzi_max_mw = 60\npoints = 3\n"
        with pytest.raises(ConfigError, match="rings"):
            loads_experiment(bad)


class TestRoundTrip:
    def test_parse_dump_parse_identical(self):
        exp = loads_experiment(BASE + JSA + CROSSTALK)
        again = loads_experiment(dumps_experiment(exp))
        assert again == exp

    def test_minimal_roundtrip(self):
        exp = loads_experiment(BASE)
        assert loads_experiment(dumps_experiment(exp)) == exp


class TestDerivedObjects:
    def test_phis_grid(self):
        exp = loads_experiment(BASE)
        phis = exp.phis()
        assert len(phis) == 32
        assert phis[0] == 0.0
        assert phis[1] == pytest.approx(2 * math.pi / 32)

    def test_empty_sweep_rejected(self):
        bad = BASE.replace("points = 32", "points = 0")
        exp = loads_experiment(bad)
        with pytest.raises(ConfigError):
            exp.phis()

    def test_experiment_config(self):
        exp = loads_experiment(BASE)
        cfg = exp.experiment_config()
        assert cfg.mzi.theta == 0.6301
        assert cfg.det_signal_c.eta == 0.75
        assert cfg.trunc.max_total_pairs == 10
        assert cfg.s1.schmidt.purity() == pytest.approx(0.92)

    def test_trunc_override(self):
        exp = loads_experiment(BASE)
        assert exp.experiment_config(trunc_override=4).trunc.max_total_pairs == 4

    def test_jsa_inputs_require_section(self):
        exp = loads_experiment(BASE)
        with pytest.raises(ConfigError):
            exp.jsa_inputs()
        full = loads_experiment(BASE + JSA)
        pump, pump_res, signal_res, idler_res = full.jsa_inputs()
        assert pump.center_nm == pump_res.center_nm == 1546.12
        assert signal_res.fwhm_pm == 33.0
        assert idler_res.center_nm == 1539.77


def test_load_experiment_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_experiment(tmp_path / "nope.ini")


def test_load_experiment_from_disk(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text(BASE)
    assert load_experiment(path).theta_rad == 0.6301
