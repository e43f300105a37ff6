import io
import re
import subprocess
import sys

import pytest

from splitmps import load_fixture
from splitmps.cli import main
from splitmps.simps import solve_gauge
from splitmps.tensorfile import read_file


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_convert_wahl_prints_gauge_residual(tmp_path, capsys):
    target = tmp_path / "wahl.json"
    code, text = run("convert", "wahl-mps", "--to", "simps", "-o", str(target), "--compare", "wahl-simps")
    assert code == 0
    residual = float(re.search(r"residual\s*[:=]?\s*([0-9.eE+-]+)", text).group(1))
    assert residual <= 1e-9
    converted, meta = read_file(target)
    assert meta["converted_from"]
    assert solve_gauge(converted, load_fixture("wahl-simps")).residual <= 1e-9


def test_convert_cluster_gives_chi_one(tmp_path):
    target = tmp_path / "c.json"
    code, _ = run("convert", "cluster-z-mps", "-o", str(target))
    assert code == 0
    assert read_file(target)[0].chi == (1, 1)


def test_convert_without_output_writes_tensor_to_stdout(capsys):
    code, text = run("convert", "nice-simps")
    assert code == 0
    assert text.startswith("{\n  \"kind\": \"mps\"")
    assert "fidelity" in capsys.readouterr().err


def test_empty_file_exit_code(tmp_path, capsys):
    empty = tmp_path / "empty.json"
    empty.write_text("")
    assert run("convert", str(empty))[0] == 2
    assert "line 1, column 1" in capsys.readouterr().err


def test_bad_json_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "kind": mps\n}')
    assert run("analyze", str(bad))[0] == 2
    assert "line 2" in capsys.readouterr().err


def test_missing_input():
    assert run("analyze", "no-such-fixture")[0] == 2


def test_conversion_failure_exit_code(tmp_path):
    import numpy as np

    from splitmps import Mps
    from splitmps.tensorfile import write_file

    path = tmp_path / "zero.json"
    write_file(path, Mps(np.array([np.eye(2), np.zeros((2, 2))])))
    assert run("convert", str(path), "--to", "simps")[0] == 3


def test_analyze_spectrum_examples():
    code, text = run("analyze", "nice-simps", "--spectrum")
    assert code == 0
    assert "0.500000000000, 0.250000000000, 0.250000000000" in text
    code, text = run("analyze", "mbqc-simps", "--spectrum")
    values = [float(v) for v in re.search(r"\[spectrum\]\n([0-9., ]+)", text).group(1).split(",")]
    for got, want in zip(values, (0.43, 0.25, 0.25, 0.07)):
        assert abs(got - want) <= 5e-3


def test_analyze_ghz_normality():
    code, text = run("analyze", "ghz-mps", "--normality")
    assert code == 0
    assert "not normal (span 2 < 4 at cap)" in text
    code, text = run("analyze", "ghz-mps", "--spectrum")
    assert code == 0 and "SKIPPED" in text


def test_analyze_is_deterministic():
    assert run("analyze", "nice-simps") == run("analyze", "nice-simps")


def test_wire_examples():
    code, text = run("wire", "nice-simps", "--n", "4", "--outcomes", "0110")
    assert code == 0
    assert re.search(r"byproduct\s*[:=]?\s*Z\b", text)
    code, text = run("wire", "nice-simps", "--n", "4", "--outcomes", "0000")
    assert re.search(r"byproduct\s*[:=]?\s*I\b", text)
    assert re.search(r"fidelity\s*[:=]?\s*1\.0+", text)


def test_wire_sampled_mbqc():
    code, text = run("wire", "mbqc-simps", "--n", "9", "--sample", "7", "--input-state", "0.6,0.8j")
    assert code == 0
    fid = float(re.search(r"fidelity\s*[:=]?\s*([0-9.]+)", text).group(1))
    assert fid == pytest.approx(1.0, abs=1e-9)
    assert run("wire", "mbqc-simps", "--n", "9", "--sample", "7") == run("wire", "mbqc-simps", "--n", "9", "--sample", "7")


def test_wire_rejects_mixed_chi():
    assert run("wire", "aklt-simps", "--n", "4", "--outcomes", "0000")[0] == 4


def test_fixture_dir_flag(tmp_path):
    from splitmps.tensorfile import write_file

    write_file(tmp_path / "mine.json", load_fixture("nice-simps"))
    assert run("--fixture-dir", str(tmp_path), "analyze", "mine", "--spectrum")[0] == 0


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "splitmps.cli", "analyze", "nice-simps", "--spectrum"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert "0.250000000000" in proc.stdout
