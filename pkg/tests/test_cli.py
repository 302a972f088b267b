"""Command-line interface: contracts, exit codes, and reproducibility."""

import json
from pathlib import Path

import pytest

from ltmlab.cli import EXIT_ASSERT, EXIT_CONFIG, EXIT_OK, main


def run(capsys, *argv) -> tuple:
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def read_sidecar(csv_path: Path, for_comparison: bool = False) -> dict:
    doc = json.loads((csv_path.parent / (csv_path.name + ".meta.json")).read_text())
    doc.pop("volatile", None)  # wall time differs between runs by design
    if for_comparison:  # the output path itself is echoed config, not data
        doc.get("run_config", {}).pop("output_dir", None)
    return doc


# ---------------------------------------------------------------------------
# small contracts


def test_classify_single_point_format(capsys):
    code, out, _ = run(capsys, "classify", "--point", "1/2,1/2")
    assert code == EXIT_OK
    assert out.strip() == "j=2 k=2 n=3"


def test_classify_multi_point_lists_labels(capsys):
    code, out, _ = run(
        capsys, "classify", "--point", "1/2,1/2", "--point", "31/100,43/100",
        "--backend", "rational",
    )
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert len(lines) == 2
    assert lines[0].endswith("j=2 k=2 n=3")
    assert lines[1].endswith("j=2 k=1 n=2")


def test_orbit_closes_period_three(capsys):
    code, out, _ = run(
        capsys, "orbit", "--point", "1/2,1/2", "--steps", "3",
        "--backend", "rational",
    )
    assert code == EXIT_OK
    lines = [ln.split("\t") for ln in out.strip().splitlines() if "\t" in ln]
    assert lines[0][1:] == ["1/2", "1/2"]
    assert lines[3][1:] == ["1/2", "1/2"]
    assert lines[1][1:] != lines[0][1:]


def test_sigma_rational_crossings_are_exact(capsys, tmp_path):
    code, out, _ = run(
        capsys, "sigma", "--backend", "rational", "--n-max", "6",
        "--out", str(tmp_path),
    )
    assert code == EXIT_OK
    assert "max |err| = 0" in out
    rows = (tmp_path / "sigma_crossings.csv").read_text().strip().splitlines()
    assert rows[0].startswith("n,")
    assert len(rows) == 1 + 5  # n = 2..6


def test_cones_clean_run_exits_zero(capsys, tmp_path):
    code, out, _ = run(
        capsys, "cones", "--samples", "5000", "--out", str(tmp_path),
    )
    assert code == EXIT_OK
    assert (tmp_path / "cones.csv").exists()


# ---------------------------------------------------------------------------
# exit codes


def test_unknown_flag_is_config_error():
    with pytest.raises(SystemExit) as exc:
        main(["classify", "--point", "1/2,1/2", "--frobnicate"])
    assert exc.value.code == EXIT_CONFIG


def test_rational_backend_refused_for_monte_carlo(capsys):
    code, _, err = run(capsys, "cells", "--backend", "rational")
    assert code == EXIT_CONFIG
    assert "config error" in err


def test_unknown_spec_field_is_config_error(capsys, tmp_path):
    bad = tmp_path / "spec.cfg"
    bad.write_text("y_lo = 0\nwibble = 3\n")
    code, _, err = run(capsys, "classify", "--point", "1/2,1/2",
                       "--spec-file", str(bad))
    assert code == EXIT_CONFIG
    assert "wibble" in err


def test_unknown_config_key_is_config_error(capsys, tmp_path):
    bad = tmp_path / "run.cfg"
    bad.write_text("samples = 1000\nbogus_key = 7\n")
    code, _, err = run(capsys, "cells", "--config", str(bad))
    assert code == EXIT_CONFIG
    assert "bogus_key" in err


def test_cones_violation_free_exit_code_is_distinct():
    # the assertion exit code exists and differs from config errors
    assert EXIT_ASSERT == 2 and EXIT_CONFIG == 4


# ---------------------------------------------------------------------------
# configuration precedence and reproducibility


def test_config_file_sets_defaults_but_flags_win(capsys, tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("samples = 1000\nseed = 5\n")
    out1 = tmp_path / "from-file"
    code, _, _ = run(capsys, "cells", "--config", str(cfgfile),
                     "--n-max", "8", "--out", str(out1))
    assert code == EXIT_OK
    side = read_sidecar(out1 / "cells.csv")
    assert side["run_config"]["samples"] == 1000
    assert side["run_config"]["seed"] == 5

    out2 = tmp_path / "flag-wins"
    code, _, _ = run(capsys, "cells", "--config", str(cfgfile),
                     "--samples", "2000", "--n-max", "8", "--out", str(out2))
    assert code == EXIT_OK
    side = read_sidecar(out2 / "cells.csv")
    assert side["run_config"]["samples"] == 2000


def test_identical_configs_give_identical_artifacts(capsys, tmp_path):
    args = ("cells", "--samples", "20000", "--n-max", "10", "--seed", "3")
    d1, d2 = tmp_path / "one", tmp_path / "two"
    assert run(capsys, *args, "--out", str(d1))[0] == EXIT_OK
    assert run(capsys, *args, "--out", str(d2))[0] == EXIT_OK
    for name in ("cells.csv", "cells_tail.csv"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
        assert read_sidecar(d1 / name, for_comparison=True) == read_sidecar(
            d2 / name, for_comparison=True
        )


def test_different_seeds_change_the_estimates(capsys, tmp_path):
    d1, d2 = tmp_path / "one", tmp_path / "two"
    run(capsys, "cells", "--samples", "20000", "--seed", "3", "--out", str(d1))
    run(capsys, "cells", "--samples", "20000", "--seed", "4", "--out", str(d2))
    assert (d1 / "cells.csv").read_bytes() != (d2 / "cells.csv").read_bytes()
