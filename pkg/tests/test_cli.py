"""Command-line behavior: exit codes, config merging, printed summaries."""

import json
import re

import pytest

from edh_lab.cli import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, main


def grab(pattern, text):
    match = re.search(pattern, text)
    assert match, f"{pattern!r} not found in:\n{text}"
    return match.group(1)


def test_no_command_prints_help(capsys):
    assert main([]) == EXIT_USAGE
    assert "COMMAND" in capsys.readouterr().out


class TestSpectrum:
    def test_summary_lines(self, capsys):
        assert main(["spectrum", "--L", "5", "--N", "2", "--Jp", "0.2"]) == EXIT_OK
        out = capsys.readouterr().out
        assert grab(r"dimension (\d+)", out) == "50"
        l_av = float(grab(r"l_av = (\S+)", out))
        l_max = float(grab(r"l_max = (\S+)", out))
        assert 0.0 < l_av < l_max < 4.0
        assert int(grab(r"outliers = (\d+)", out)) >= 1

    def test_half_filling_default(self, capsys):
        assert main(["spectrum", "--L", "4"]) == EXIT_OK
        assert grab(r"dimension (\d+)", capsys.readouterr().out) == "24"

    def test_invalid_params_exit_usage(self, capsys):
        assert main(["spectrum", "--L", "4", "--N", "9"]) == EXIT_USAGE
        assert "error:" in capsys.readouterr().err

    def test_output_files_and_manifest(self, tmp_path, capsys):
        out = tmp_path / "run"
        assert main(["spectrum", "--L", "4", "--out", str(out)]) == EXIT_OK
        spectrum = out / "spectrum_L4_N2_J1_Jp0_U0_eps0.csv"
        assert spectrum.exists()
        assert (out / "correlations_L4_N2_J1_Jp0_U0_eps0.csv").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert spectrum.name in manifest["checksums"]
        assert manifest["config"]["L"] == 4

    def test_checkpoint_reuse_message(self, tmp_path, capsys):
        ckpt = tmp_path / "eig.npz"
        assert main(["spectrum", "--L", "4", "--checkpoint", str(ckpt)]) == EXIT_OK
        first = capsys.readouterr().out
        assert "reused checkpoint" not in first
        assert main(["spectrum", "--L", "4", "--checkpoint", str(ckpt)]) == EXIT_OK
        assert "reused checkpoint" in capsys.readouterr().out


class TestConfigMerging:
    def test_config_file_supplies_values(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"L": 5, "N": 2, "Jp": 0.2}))
        assert main(["spectrum", "--config", str(cfg)]) == EXIT_OK
        assert grab(r"dimension (\d+)", capsys.readouterr().out) == "50"

    def test_flags_override_config(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"L": 5, "N": 2}))
        assert main(["spectrum", "--config", str(cfg), "--L", "4"]) == EXIT_OK
        assert grab(r"dimension (\d+)", capsys.readouterr().out) == "24"

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"L": 4, "coupling": 2.0}))
        assert main(["spectrum", "--config", str(cfg)]) == EXIT_USAGE
        assert "coupling" in capsys.readouterr().err

    def test_wrong_type_rejected(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"L": "four"}))
        assert main(["spectrum", "--config", str(cfg)]) == EXIT_USAGE

    def test_threads_validated(self, monkeypatch):
        monkeypatch.delenv("OPENBLAS_NUM_THREADS", raising=False)
        assert main(["spectrum", "--L", "4", "--threads", "0"]) == EXIT_USAGE
        import os
        assert main(["spectrum", "--L", "4", "--threads", "2"]) == EXIT_OK
        assert os.environ["OPENBLAS_NUM_THREADS"] == "2"


class TestScaling:
    def test_sweep_summary_and_files(self, tmp_path, capsys):
        out = tmp_path / "sweep"
        code = main(["scaling", "--Lmin", "4", "--Lmax", "6",
                     "--eps", "0", "--eps", "0.1", "--out", str(out)])
        assert code == EXIT_OK
        text = capsys.readouterr().out
        assert text.count("l_max slope") == 2
        assert (out / "scaling_sweep.csv").exists()
        fits = json.loads((out / "fits_sweep.json").read_text())
        assert [b["eps"] for b in fits["branches"]] == [0.0, 0.1]

    def test_custom_filling_refused(self, capsys):
        code = main(["scaling", "--Lmin", "4", "--Lmax", "6", "--no-half-fill"])
        assert code == EXIT_USAGE
        assert "half-filling" in capsys.readouterr().err


class TestIntegrable:
    def test_all_lengths_vanish(self, capsys):
        code = main(["integrable", "--L", "4", "--N", "2", "--eps", "0.1"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert float(grab(r"max coherence length = (\S+)", out)) <= 1e-10
        assert float(grab(r"max eigenstate residual = (\S+)", out)) <= 1e-12

    def test_superposition_report(self, tmp_path, capsys):
        code = main(["integrable", "--L", "6", "--N", "3",
                     "--build-superposition", "--out", str(tmp_path)])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        direct = float(grab(r"direct form  = (\S+)", out))
        constructed = float(grab(r"constructed  = (\S+)", out))
        assert constructed == pytest.approx(direct, abs=1e-10)
        report = json.loads((tmp_path / "integrable_L6_N3.json").read_text())
        assert report["superposition"]["overlap_squared"] == pytest.approx(
            float(grab(r"squared overlap g = (\S+)", out)), abs=0)

    def test_superposition_needs_degeneracy(self, capsys):
        code = main(["integrable", "--L", "4", "--eps", "0.1",
                     "--build-superposition"])
        assert code == EXIT_USAGE


class TestOverlapScaling:
    def test_doubling_grid(self, tmp_path, capsys):
        code = main(["overlap-scaling", "--Lmin", "8", "--Lmax", "64",
                     "--out", str(tmp_path)])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "sizes = [8, 16, 32, 64]" in out
        float(grab(r"alpha = (\S+)", out))
        header, *rows = (tmp_path / "overlap_sweep.csv").read_text().splitlines()
        assert header == "L,overlap_squared,overlap_form_length,direct_form_length"
        assert [int(r.split(",")[0]) for r in rows] == [8, 16, 32, 64]

    def test_lmin_bound(self):
        assert main(["overlap-scaling", "--Lmin", "1", "--Lmax", "8"]) == EXIT_USAGE


class TestCorrelations:
    def test_rebuild_from_checkpoint(self, tmp_path, capsys):
        ckpt = tmp_path / "eig.npz"
        assert main(["spectrum", "--L", "4", "--checkpoint", str(ckpt)]) == EXIT_OK
        capsys.readouterr()
        out = tmp_path / "corr"
        code = main(["correlations", "--checkpoint", str(ckpt), "--out", str(out)])
        assert code == EXIT_OK
        assert "24 states + average" in capsys.readouterr().out
        lines = (out / "correlations_L4_N2_J1_Jp0_U0_eps0.csv").read_text().splitlines()
        # long format: (24 states + 1 average row) x 4 sites, plus the header
        assert len(lines) == 1 + 25 * 4
        assert lines[-1].startswith("-1,4,")

    def test_missing_checkpoint_is_runtime_error(self, tmp_path):
        code = main(["correlations", "--checkpoint", str(tmp_path / "nope.npz"),
                     "--out", str(tmp_path)])
        assert code == EXIT_RUNTIME

    def test_out_required(self, tmp_path, capsys):
        ckpt = tmp_path / "eig.npz"
        assert main(["spectrum", "--L", "4", "--checkpoint", str(ckpt)]) == EXIT_OK
        capsys.readouterr()
        assert main(["correlations", "--checkpoint", str(ckpt)]) == EXIT_USAGE
