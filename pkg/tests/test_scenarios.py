"""Tests for scenario runners: files written and report contents."""

import json
import math

import pytest

from adiasim.config import validate_config
from adiasim.scenarios import (
    CHEVRON_F_CENTER,
    Unwritable,
    read_trace_config,
    run_scenario,
)

FAST_OVERRIDES = """
[schedule]
t_ad = 2

[simulation]
dt_us = 0.005
n_samples = 4
"""


def make_config(text, out_dir):
    config, errors = validate_config(text)
    assert errors == [], errors
    return config.with_(out_dir=str(out_dir))


def load_report(path):
    return json.loads(path.read_text())


class TestSweepScenarios:
    def test_combined_crossing_scenario_writes_both_variants(self, tmp_path):
        config = make_config("[scenario]\nname = fig3\n" + FAST_OVERRIDES, tmp_path)
        paths = run_scenario(config)
        names = sorted(p.rsplit("/", 1)[1] for p in paths)
        assert names == [
            "fig3a_report.json",
            "fig3a_trace_tad2.csv",
            "fig3b_report.json",
            "fig3b_trace_tad2.csv",
        ]
        # The two variants differ only in the coupling actually used.
        a_cfg = read_trace_config(str(tmp_path / "fig3a_trace_tad2.csv"))
        b_cfg = read_trace_config(str(tmp_path / "fig3b_trace_tad2.csv"))
        assert b_cfg.j == 1.7
        assert a_cfg == b_cfg.with_(j=0.0)

    def test_sweep_report_structure(self, tmp_path):
        config = make_config(
            "[scenario]\nname = fig4\n\n[schedule]\nt_ad = 2, 4\n\n"
            "[simulation]\ndt_us = 0.005\nn_samples = 4\n", tmp_path)
        run_scenario(config)
        report = load_report(tmp_path / "fig4_report.json")
        crossing = report["crossing"]
        assert crossing["min_gap_mhz"] > 0.0
        assert 0.0 < crossing["crossing_time_us"] < 2.0
        assert crossing["slope_times_t_ad_mhz"] == pytest.approx(
            crossing["slope_mhz_per_us"] * 2.0)
        assert set(crossing["per_t_ad"]) == {"2", "4"}
        for entry in crossing["per_t_ad"].values():
            assert entry["gamma"] > 0.0
            assert 0.0 <= entry["p_diabatic_lz"] <= 1.0
            assert 0.0 <= entry["p_diabatic_measured_01"] <= 1.0
            assert 0.0 <= entry["end_fidelity_01"] <= 1.0

    def test_lz_probability_scales_with_duration(self, tmp_path):
        config = make_config(
            "[scenario]\nname = fig4\n\n[schedule]\nt_ad = 2, 4\n\n"
            "[simulation]\ndt_us = 0.005\nn_samples = 4\n", tmp_path)
        run_scenario(config)
        per_tad = load_report(tmp_path / "fig4_report.json")["crossing"]["per_t_ad"]
        # gamma is proportional to t_ad, so the diabatic probability falls
        # geometrically when the protocol slows down.
        assert per_tad["4"]["gamma"] == pytest.approx(2.0 * per_tad["2"]["gamma"],
                                                      rel=1e-9)
        assert per_tad["4"]["p_diabatic_lz"] == pytest.approx(
            per_tad["2"]["p_diabatic_lz"] ** 2, rel=1e-9)


@pytest.fixture(scope="module")
def mitigation_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("table1")
    config = make_config(
        "[scenario]\nname = table1\n\n[schedule]\nt_ad = 1, 2, 3\n\n"
        "[simulation]\ndt_us = 0.005\nn_samples = 4\n", out)
    run_scenario(config)
    return load_report(out / "table1_report.json")


@pytest.fixture(scope="module")
def chirp_outputs(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig1")
    config = make_config(
        "[scenario]\nname = fig1\n\n[simulation]\nn_samples = 100\n", out)
    paths = run_scenario(config)
    return out, paths


@pytest.fixture(scope="module")
def calibration_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("chevron")
    config = make_config("[scenario]\nname = chevron\n", out)
    run_scenario(config)
    return load_report(out / "chevron_report.json")


class TestMitigationScenario:
    def test_noise_echo(self, mitigation_report):
        report = mitigation_report
        assert report["noise"]["enabled"] is True
        assert report["noise"]["t1_us"] == [50.0, 50.0]
        assert report["noise"]["t2_us"] == [40.0, 40.0]

    def test_per_state_entries(self, mitigation_report):
        report = mitigation_report
        assert set(report["states"]) == {"00", "11"}
        for entry in report["states"].values():
            assert set(entry["measured_by_t_ad"]) == {"1", "2", "3"}
            assert set(entry["per_term"]) == {"x1", "x2", "xx", "yy"}
            assert math.isfinite(entry["extrapolated"])
            assert entry["shortest_t_ad_value"] == entry["measured_by_t_ad"]["1"]

    def test_both_exact_variants_reported_and_one_selected(self, mitigation_report):
        report = mitigation_report
        for label in ("00", "11"):
            exact = report["states"][label]["exact"]
            assert "with_zz" in exact and "without_zz" in exact
            assert exact["closer_to_extrapolated"] in ("with_zz", "without_zz")
            assert exact["selected_value"] == exact[exact["closer_to_extrapolated"]]
            extrapolated = report["states"][label]["extrapolated"]
            chosen = abs(exact["selected_value"] - extrapolated)
            other_key = ("without_zz" if exact["closer_to_extrapolated"] == "with_zz"
                         else "with_zz")
            assert chosen <= abs(exact[other_key] - extrapolated)

    def test_exact_levels_are_end_of_protocol_eigenvalues(self, mitigation_report):
        report = mitigation_report
        exact = report["states"]["00"]["exact"]
        # End Hamiltonian is duration-independent; the with/without split
        # reflects only the static ZZ term.
        assert exact["with_zz"] != exact["without_zz"]
        assert exact["with_zz"] < 0.0
        assert report["states"]["11"]["exact"]["with_zz"] > 0.0


class TestChirpScenario:
    def test_files(self, chirp_outputs):
        outputs = chirp_outputs
        out, paths = outputs
        names = sorted(p.rsplit("/", 1)[1] for p in paths)
        assert names == ["fig1_chirped_trace.csv", "fig1_constant_trace.csv",
                         "fig1_report.json"]

    def test_summary_numbers(self, chirp_outputs):
        outputs = chirp_outputs
        out, _ = outputs
        summary = load_report(out / "fig1_report.json")["summary"]
        assert summary["z_mhz"] == 3.0
        assert summary["x_mhz"] == 2.7
        # In the chirped (co-rotating) frame the drive is always along +x,
        # so the transverse spin barely leaves the xz-plane...
        assert summary["max_abs_iy_chirped"] < 0.1
        assert summary["final_ix_chirped"] > 0.95
        # ...while the constant frame shows the full spiral until the
        # recorded rotation angle is unwound in post-processing.
        assert summary["max_abs_iy_constant_raw"] > 0.5
        assert summary["max_abs_iy_rotated"] < 0.1
        assert summary["final_ix_rotated"] > 0.95

    def test_constant_trace_has_rotation_columns(self, chirp_outputs):
        outputs = chirp_outputs
        out, _ = outputs
        header = [l for l in (out / "fig1_constant_trace.csv").read_text().splitlines()
                  if not l.startswith("#")][0]
        for column in ("theta_rad", "ix_rotated", "iy_rotated"):
            assert column in header.split(",")


class TestCalibrationScenario:
    def test_rabi_fit_recovers_map_coupling(self, calibration_report):
        report = calibration_report
        assert report["map"]["j_true_mhz"] == 2.0
        fit = report["rabi_fit"]
        assert fit["j_error_relative"] < 0.01
        assert fit["f_res_error_mhz"] < 0.1
        assert fit["j_mhz"] == pytest.approx(2.0, rel=0.01)
        assert fit["f_res_mhz"] == pytest.approx(CHEVRON_F_CENTER, abs=0.1)

    def test_column_frequencies_cover_map(self, calibration_report):
        report = calibration_report
        columns = report["column_frequencies"]
        assert len(columns) == report["map"]["n_frequencies"]
        # Omega grows away from resonance, with its minimum ~ j.
        omegas = [c["omega_mhz"] for c in columns]
        assert min(omegas) == pytest.approx(2.0, rel=0.05)
        assert omegas[0] > 3.0 and omegas[-1] > 3.0

    def test_polynomial_fits_round_trip(self, calibration_report):
        report = calibration_report
        coupling = report["coupling_fit"]
        assert coupling["b1_fit"] == pytest.approx(coupling["b1_true"], abs=1e-9)
        assert coupling["b3_fit"] == pytest.approx(coupling["b3_true"], abs=1e-9)
        dispersive = report["dispersive_fit_q1"]
        assert dispersive["c2_fit"] == pytest.approx(dispersive["c2_true"], abs=1e-9)
        assert dispersive["c4_fit"] == pytest.approx(dispersive["c4_true"], abs=1e-9)

    def test_resonance_shift_consistent_with_truth_model(self, calibration_report):
        report = calibration_report
        # Only qubit 1 coefficients appear verbatim in the report, so check
        # the reported end-to-end shift for basic sanity: finite, nonzero,
        # and negative (both dispersive truths pull frequencies down, qubit
        # 1 harder than qubit 2).
        shift = report["resonance_shift_at_full_amplitude_mhz"]
        assert math.isfinite(shift)
        assert shift < 0.0


class TestTraceConfigRecovery:
    def test_invalid_embedded_config_raises(self, tmp_path):
        path = tmp_path / "broken.csv"
        path.write_text("# adiasim-trace version=0\n"
                        "# cfg: [scenario]\n# cfg: name = fig9\n"
                        "t_us\n0.0\n")
        with pytest.raises(ValueError, match="embedded config"):
            read_trace_config(str(path))

    def test_fractional_duration_in_filename(self, tmp_path):
        config = make_config(
            "[scenario]\nname = custom\ninitial_states = 01\n\n"
            "[schedule]\nz1 = 2.5\nz2 = 1.5\nx1 = 2.0\nx2 = 4.1\nt_ad = 0.5\n\n"
            "[simulation]\ndt_us = 0.005\nn_samples = 4\n", tmp_path)
        paths = run_scenario(config)
        assert any(p.endswith("custom_trace_tad0p5.csv") for p in paths)

    def test_unwritable_directory(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        config = make_config("[scenario]\nname = chevron\n", blocker / "sub")
        with pytest.raises(Unwritable):
            run_scenario(config)
