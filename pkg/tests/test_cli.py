import csv
import io
import json
import math
import subprocess
import sys

import pytest

from gatemeasure.cli import main
from gatemeasure.gates import TruthTable, measurement_gate

R = repr(1 / math.sqrt(2))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_one_qubit_csv(capsys):
    code, out, _ = run(capsys, "one-qubit", "--alpha-re", R, "--beta-re", R, "--trials", "100000", "--seed", "5")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert abs(float(rows[1]["observed_freq"]) - 0.5) <= 0.0063


def test_one_qubit_json_includes_scenario(capsys):
    code, out, _ = run(capsys, "one-qubit", "--alpha-re", "0.6", "--beta-im", "0.8", "--trials", "1000", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["report"]["passed"] is True
    assert data["scenario"]["register"] == ["e", "p", "q", "a"]
    assert data["scenario"]["branches"][1]["reduced"]["register"] == ["q"]


def test_singlet_zero_counts(capsys):
    code, out, _ = run(capsys, "singlet", "--phi", "0", "--trials", "100000", "--seed", "11")
    assert code == 0
    rows = {r["assignment"]: r for r in csv.DictReader(io.StringIO(out))}
    assert rows["00"]["observed_count"] == "0" and rows["11"]["observed_count"] == "0"


def test_singlet_json(capsys):
    code, out, _ = run(capsys, "singlet", "--phi", "0.5", "--trials", "2000", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert len(data["scenario"]["branches"]) == 4
    assert data["scenario"]["branches"][2]["reduced"]["register"] == ["p1", "p2"]


def test_byte_identical_across_runs_and_workers(capsys, tmp_path):
    args = ["singlet", "--phi", "0.7", "--trials", "30000", "--seed", "99"]
    paths = []
    for i, workers in enumerate(["1", "1", "4"]):
        path = tmp_path / f"r{i}.csv"
        assert main([*args, "--workers", workers, "--out", str(path)]) == 0
        paths.append(path)
    blobs = [p.read_bytes() for p in paths]
    assert blobs[0] == blobs[1] == blobs[2]
    assert blobs[0].endswith(b"\n")


def test_continuous(capsys):
    code, out, _ = run(capsys, "continuous", "--alpha-re", "0.6", "--beta-im", "0.8", "--s-steps", "11")
    assert code == 0
    assert len(out.strip().splitlines()) == 23


def test_continuous_json(capsys):
    code, out, _ = run(capsys, "continuous", "--alpha-re", R, "--beta-re", R, "--s-steps", "3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert len(data) == 6
    assert max(p["deviation"] for p in data) <= 1e-12


@pytest.mark.parametrize("completion", ["e-block", "plain"])
def test_gate_dump(capsys, completion):
    code, out, _ = run(capsys, "gate-dump", "--completion", completion)
    assert code == 0
    assert TruthTable.from_text(out) == measurement_gate(completion).to_table()
    assert "1010 -> 1111" in out.splitlines()


def test_gate_dump_json(capsys):
    code, out, _ = run(capsys, "gate-dump", "--format", "json")
    assert json.loads(out)["rows"]["0001"] == "0010"


def test_statistical_failure_exit_1(capsys):
    code, _, err = run(capsys, "one-qubit", "--alpha-re", R, "--beta-re", R, "--trials", "1001", "--tolerance-sigmas", "1e-9")
    assert code == 1
    assert "failed" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["one-qubit", "--alpha-re", "1", "--beta-re", "1"],
        ["singlet", "--trials", "0"],
        ["continuous", "--s-steps", "1"],
        ["one-qubit", "--seed", "-3"],
    ],
)
def test_invalid_config_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["singlet", "--format", "xml"])
    assert exc.value.code == 2


def test_io_error_exit_3(capsys, tmp_path):
    code, _, err = run(capsys, "gate-dump", "--out", str(tmp_path / "missing" / "t.txt"))
    assert code == 3


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gatemeasure", "gate-dump"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("width: 4\n")
