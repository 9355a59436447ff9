"""Tests for the experiment harness: config parsing, sweeps, CSV output."""
import numpy as np
import pytest

from cspursuit.errors import ConfigError
from cspursuit.experiments import (CSV_COLUMNS, GAMMA_RULES, SWEEP_AXES,
                                   ExperimentConfig, load_config, run_mismatch,
                                   run_sweep, rows_to_csv_text, write_csv)


def small_config(**overrides):
    fields = dict(M=16, N_ue=2, s_bar=3, s_c=1, pilot_length=12, snr_db=25.0,
                  sweep_axis="pilot_length", sweep_values=(8, 12),
                  algorithms=("msp",), n_trials=3, base_seed=5)
    fields.update(overrides)
    return ExperimentConfig(**fields)


VALID_TEXT = """\
# sweep over the pilot length
M = 16
N_ue = 2
s_bar = 3
s_c = 1          # prior quality
pilot_length = 12
snr_db = 25
sweep_axis = pilot_length

sweep_values = 8, 12, 16
algorithms = genie, msp
n_trials = 4
base_seed = 9
"""


class TestLoadConfig:
    def test_full_roundtrip(self, tmp_path):
        path = tmp_path / "sweep.cfg"
        path.write_text(VALID_TEXT)
        cfg = load_config(path)
        assert cfg.M == 16 and cfg.N_ue == 2 and cfg.s_bar == 3
        assert cfg.sweep_values == (8, 12, 16)
        assert all(isinstance(v, int) for v in cfg.sweep_values)
        assert cfg.algorithms == ("genie", "msp")
        assert cfg.n_trials == 4 and cfg.base_seed == 9
        assert cfg.gamma_rule == "sqrt_2nt" and cfg.gamma_value is None

    def test_snr_axis_parses_floats(self, tmp_path):
        text = VALID_TEXT.replace("sweep_axis = pilot_length",
                                  "sweep_axis = snr_db")
        text = text.replace("sweep_values = 8, 12, 16",
                            "sweep_values = 2.5, 10, 25")
        path = tmp_path / "snr.cfg"
        path.write_text(text)
        cfg = load_config(path)
        assert cfg.sweep_values == (2.5, 10.0, 25.0)

    def test_int_axis_rejects_fractions(self, tmp_path):
        text = VALID_TEXT.replace("sweep_values = 8, 12, 16",
                                  "sweep_values = 8.5, 12")
        path = tmp_path / "bad.cfg"
        path.write_text(text)
        with pytest.raises(ConfigError, match="sweep_values"):
            load_config(path)

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text(VALID_TEXT + "bogus = 3\n")
        with pytest.raises(ConfigError, match="bogus"):
            load_config(path)

    def test_duplicate_key(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text(VALID_TEXT + "M = 8\n")
        with pytest.raises(ConfigError, match="duplicate"):
            load_config(path)

    def test_missing_required(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("M = 16\nN_ue = 2\n")
        with pytest.raises(ConfigError, match="missing required"):
            load_config(path)

    def test_line_without_equals(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text(VALID_TEXT + "just words\n")
        with pytest.raises(ConfigError, match="key=value"):
            load_config(path)

    def test_non_numeric_int(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text(VALID_TEXT.replace("M = 16", "M = sixteen"))
        with pytest.raises(ConfigError, match="M"):
            load_config(path)


class TestConfigValidation:
    @pytest.mark.parametrize("overrides,pattern", [
        (dict(M=0), "M"),
        (dict(N_ue=0), "N_ue"),
        (dict(s_bar=0), "s_bar"),
        (dict(s_c=-1), "s_c"),
        (dict(pilot_length=0), "pilot_length"),
        (dict(sweep_axis="bogus"), "sweep_axis"),
        (dict(sweep_values=()), "sweep_values"),
        (dict(algorithms=()), "algorithms"),
        (dict(algorithms=("nope",)), "nope"),
        (dict(n_trials=0), "n_trials"),
        (dict(gamma_rule="bogus"), "gamma_rule"),
        (dict(gamma_rule="explicit"), "gamma_value"),
        (dict(true_overlap=-1), "true_overlap"),
    ])
    def test_rejects(self, overrides, pattern):
        with pytest.raises(ConfigError, match=pattern):
            small_config(**overrides)

    def test_constant_tuples(self):
        assert SWEEP_AXES == ("pilot_length", "snr_db", "s_c", "believed_s_c")
        assert GAMMA_RULES == ("sqrt_2nt", "explicit")
        assert CSV_COLUMNS == ("sweep_axis", "sweep_value", "algorithm",
                               "nmse", "nmse_median", "nmse_ci95_halfwidth",
                               "mean_iterations", "support_recovery_rate",
                               "n_trials", "base_seed")


class TestRunSweep:
    def test_deterministic(self):
        cfg = small_config()
        a = rows_to_csv_text(run_sweep(cfg))
        b = rows_to_csv_text(run_sweep(cfg))
        assert a == b

    def test_noise_free_genie(self):
        # overdetermined on the support: genie least squares is exact
        cfg = small_config(pilot_length=16, sweep_values=(16,),
                           algorithms=("genie",), n_trials=1)
        rows = run_sweep(cfg, noise=False)
        assert rows[0].nmse <= 1e-12
        assert rows[0].support_recovery_rate == 1.0

    def test_row_order_and_fields(self):
        cfg = small_config(algorithms=("genie", "msp"))
        rows = run_sweep(cfg)
        assert [(r.sweep_value, r.algorithm) for r in rows] == [
            (8, "genie"), (8, "msp"), (12, "genie"), (12, "msp")]
        for r in rows:
            assert r.sweep_axis == "pilot_length"
            assert r.n_trials == 3 and r.base_seed == 5
            assert 0.0 <= r.support_recovery_rate <= 1.0
            assert r.nmse_ci95_halfwidth >= 0.0

    def test_rejects_believed_axis(self):
        cfg = small_config(sweep_axis="believed_s_c", sweep_values=(1,),
                           true_overlap=1)
        with pytest.raises(ConfigError, match="run_mismatch"):
            run_sweep(cfg)

    def test_s_c_axis_forwards_belief(self):
        # at s_c = 0 the prior carries no guarantee, so msp collapses to
        # the plain chunk-wise pursuit
        cfg = small_config(sweep_axis="s_c", sweep_values=(0,),
                           algorithms=("msp", "mmv_sp"), n_trials=5)
        rows = run_sweep(cfg)
        assert rows[0].nmse == rows[1].nmse
        assert rows[0].mean_iterations == rows[1].mean_iterations


class TestRunMismatch:
    def test_requires_axis(self):
        cfg = small_config(true_overlap=1)
        with pytest.raises(ConfigError, match="believed_s_c"):
            run_mismatch(cfg)

    def test_requires_overlap(self):
        cfg = small_config(sweep_axis="believed_s_c", sweep_values=(1,))
        with pytest.raises(ConfigError, match="true_overlap"):
            run_mismatch(cfg)

    def test_overlap_cap(self):
        cfg = small_config(sweep_axis="believed_s_c", sweep_values=(1,),
                           true_overlap=2)
        with pytest.raises(ConfigError, match="s_bar - 2"):
            run_mismatch(cfg)

    def test_negative_believed_value(self):
        cfg = small_config(sweep_axis="believed_s_c", sweep_values=(-1,),
                           true_overlap=1)
        with pytest.raises(ConfigError, match="nonnegative"):
            run_mismatch(cfg)

    def test_genie_ignores_belief(self):
        cfg = small_config(sweep_axis="believed_s_c", sweep_values=(0, 1),
                           algorithms=("genie",), true_overlap=1, n_trials=4)
        rows = run_mismatch(cfg)
        assert rows[0].nmse == rows[1].nmse
        assert rows[0].nmse_median == rows[1].nmse_median
        assert rows[0].mean_iterations == rows[1].mean_iterations

    def test_matches_sweep_when_belief_is_true(self):
        # pinned-overlap and drawn-overlap protocols share the median up to
        # Monte-Carlo noise when the believed value equals the true overlap
        common = dict(M=32, N_ue=2, s_bar=4, pilot_length=16, snr_db=25.0,
                      algorithms=("msp",), n_trials=80, base_seed=7)
        swept = run_sweep(ExperimentConfig(
            s_c=2, sweep_axis="s_c", sweep_values=(2,), **common))
        pinned = run_mismatch(ExperimentConfig(
            s_c=2, sweep_axis="believed_s_c", sweep_values=(2,),
            true_overlap=2, **common))
        ratio = pinned[0].nmse_median / swept[0].nmse_median
        assert 0.5 <= ratio <= 2.0

    def test_overconfidence_shape(self):
        # overlap pinned at 3: the conservative variant stays flat across
        # believed values while the locking variant degrades past the truth
        cfg = ExperimentConfig(
            M=64, N_ue=2, s_bar=8, s_c=3, pilot_length=24, snr_db=25.0,
            sweep_axis="believed_s_c", sweep_values=(2, 3, 4, 5, 6),
            algorithms=("msp", "cmsp"), n_trials=200, base_seed=0,
            true_overlap=3)
        rows = run_mismatch(cfg)
        msp = [r.nmse_median for r in rows if r.algorithm == "msp"]
        cmsp = [r.nmse_median for r in rows if r.algorithm == "cmsp"]
        assert msp[1] <= msp[2] <= msp[3] <= msp[4]
        assert max(cmsp) / min(cmsp) < 3.0


class TestCsv:
    def test_header_and_shape(self):
        rows = run_sweep(small_config())
        text = rows_to_csv_text(rows)
        lines = text.split("\n")
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert lines[-1] == ""  # trailing newline
        assert len(lines) == len(rows) + 2
        assert "\r" not in text

    def test_float_precision(self):
        rows = run_sweep(small_config(n_trials=7))
        line = rows_to_csv_text(rows).split("\n")[1]
        cells = line.split(",")
        assert cells[0] == "pilot_length"
        assert cells[3] == format(rows[0].nmse, ".9g")
        assert cells[-2:] == ["7", "5"]

    def test_write_csv(self, tmp_path):
        rows = run_sweep(small_config())
        path = tmp_path / "out.csv"
        write_csv(rows, path)
        assert path.read_text(encoding="utf-8") == rows_to_csv_text(rows)
