"""Exit codes and file handling of the make-figures entry point."""

import pytest

from edh_figures.cli import EXIT_OK, EXIT_USAGE, main


def test_spectrum_figure(spectrum_csv, tmp_path, capsys):
    out = tmp_path / "fig1.png"
    argv = ["--fig", "1", "--in", str(spectrum_csv), "--out", str(out),
            "--highlight", "26"]
    assert main(argv) == EXIT_OK
    assert f"wrote {out}" in capsys.readouterr().out
    assert out.stat().st_size > 0


def test_scaling_accepts_split_inputs(scaling_csv, tmp_path, capsys):
    lines = scaling_csv.read_text().splitlines()
    part_a = tmp_path / "a.csv"
    part_b = tmp_path / "b.csv"
    part_a.write_text("\n".join([lines[0]] + lines[1:3]) + "\n")
    part_b.write_text("\n".join([lines[0]] + lines[3:]) + "\n")
    out = tmp_path / "fig2.svg"
    argv = ["--fig", "2", "--in", str(part_a), str(part_b), "--out", str(out)]
    assert main(argv) == EXIT_OK
    assert out.exists()


def test_correlations_figure(correlations_csv, tmp_path, capsys):
    out = tmp_path / "fig3.png"
    argv = ["--fig", "3", "--in", str(correlations_csv), "--out", str(out),
            "--ref-site", "1"]
    assert main(argv) == EXIT_OK
    assert out.exists()


def test_missing_input_file(tmp_path, capsys):
    argv = ["--fig", "1", "--in", str(tmp_path / "gone.csv"),
            "--out", str(tmp_path / "fig.png")]
    assert main(argv) == EXIT_USAGE
    assert "does not exist" in capsys.readouterr().err


def test_wrong_schema(scaling_csv, tmp_path, capsys):
    argv = ["--fig", "1", "--in", str(scaling_csv),
            "--out", str(tmp_path / "fig.png")]
    assert main(argv) == EXIT_USAGE
    assert "expected" in capsys.readouterr().err


def test_two_inputs_where_one_expected(spectrum_csv, tmp_path, capsys):
    argv = ["--fig", "1", "--in", str(spectrum_csv), str(spectrum_csv),
            "--out", str(tmp_path / "fig.png")]
    assert main(argv) == EXIT_USAGE
    assert "exactly one" in capsys.readouterr().err


def test_unsupported_output_suffix(spectrum_csv, tmp_path, capsys):
    argv = ["--fig", "1", "--in", str(spectrum_csv),
            "--out", str(tmp_path / "fig.pdf")]
    assert main(argv) == EXIT_USAGE
    assert ".png or .svg" in capsys.readouterr().err


def test_unknown_highlight_state(spectrum_csv, tmp_path, capsys):
    argv = ["--fig", "1", "--in", str(spectrum_csv),
            "--out", str(tmp_path / "fig.png"), "--highlight", "9999"]
    assert main(argv) == EXIT_USAGE
    assert "9999" in capsys.readouterr().err


def test_bad_figure_number_rejected_by_parser(spectrum_csv, tmp_path, capsys):
    argv = ["--fig", "4", "--in", str(spectrum_csv),
            "--out", str(tmp_path / "fig.png")]
    with pytest.raises(SystemExit) as err:
        main(argv)
    assert err.value.code == EXIT_USAGE


def test_missing_out_flag(spectrum_csv, capsys):
    with pytest.raises(SystemExit) as err:
        main(["--fig", "1", "--in", str(spectrum_csv)])
    assert err.value.code == EXIT_USAGE
