import json
import subprocess
import sys

import pytest

from hosc import rulers
from hosc.cli import EXIT_INVALID, EXIT_IO, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_construct_two_ruler_code(tmp_path, capsys):
    f = tmp_path / "ex3.txt"
    f.write_text("0 6 7\n0 2 5\n")
    code, out, _ = run(capsys, "construct", "--L", "2", "--M", "2", "--Sp", "5", "--dts-file", str(f), "--check-scattering")
    assert code == EXIT_OK
    assert "memory: encoding 300 bits, decoding 375 bits" in out
    assert "span: (B^π_{n−14} | Bᵀ_{n−12} | B^π_{n−11} | Bᵀ_{n−5} | B_{n−1} | B_n)" in out
    assert "scattering: PASS" in out


def test_construct_errors(capsys):
    assert run(capsys, "construct", "--L", "1", "--M", "1", "--Sp", "4", "--r", "3")[0] == EXIT_USAGE
    assert run(capsys, "construct", "--L", "1", "--M", "3", "--Sp", "4")[0] == EXIT_USAGE
    assert run(capsys, "construct", "--L", "1", "--M", "1", "--Sp", "4", "--dts-file", "/nonexistent")[0] == EXIT_IO
    with pytest.raises(SystemExit) as exc:
        main(["construct", "--L", "1"])
    assert exc.value.code == EXIT_USAGE


def test_dts_verify_and_catalog(tmp_path, capsys):
    out_file = tmp_path / "d63.txt"
    assert run(capsys, "dts", "catalog", "6", "3", "-o", str(out_file))[0] == EXIT_OK
    code, out, _ = run(capsys, "dts", "verify", str(out_file))
    assert code == EXIT_OK and out.strip() == "PASS, (6,3), scope 36, sum 186, both bounds met"
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1 3\n0 2 5\n")
    assert run(capsys, "dts", "verify", str(bad))[0] == EXIT_INVALID
    junk = tmp_path / "junk.txt"
    junk.write_text("0 x\n")
    assert run(capsys, "dts", "verify", str(junk))[0] == EXIT_INVALID
    code, out, _ = run(capsys, "dts", "catalog", "--verify-catalog")
    assert code == EXIT_OK and "catalog: PASS" in out
    assert run(capsys, "dts", "catalog", "40", "9")[0] == EXIT_INVALID


def test_dts_combine(tmp_path, capsys):
    a = tmp_path / "a.txt"
    a.write_text("0 1 4 6\n")
    out_file = tmp_path / "c.txt"
    assert run(capsys, "dts", "combine", str(a), str(a), "-o", str(out_file))[0] == EXIT_OK
    d = rulers.parse_dts(out_file.read_text())
    assert (d.L, d.M, rulers.sum_of_lengths(d)) == (14, 3, 1020)


def test_dts_bounds_and_search(capsys):
    assert run(capsys, "dts", "bounds", "5", "4")[1].split() == ["51", "233"]
    code, out, _ = run(capsys, "dts", "search", "2", "3", "--scope", "13", "--seed", "1", "--budget", "2000000")
    assert code == EXIT_OK
    body = "\n".join(l for l in out.splitlines() if not l.startswith("#"))
    d = rulers.parse_dts(body.split("\n\n")[-1] if "\n\n" in body else body)
    assert rulers.is_dts(d)
    assert run(capsys, "dts", "search", "3", "3", "--scope", "5", "--budget", "1000", "--no-model")[0] == EXIT_INVALID


def test_hamming_commands(capsys):
    assert run(capsys, "hamming", "find-perm", "4")[1].split() == ["1", "1"]
    code, out, _ = run(capsys, "hamming", "dump-columns", "7", "--perm", "boolean", "--start", "57", "--count", "7")
    assert out.split() == ["1111101", "1111110", "1101110", "0011110", "0110011", "1010101", "1111111"]
    code, out, _ = run(capsys, "hamming", "verify-tables")
    assert code == EXIT_OK and "FAIL" not in out


def test_gap_commands(capsys):
    assert run(capsys, "gap", "to-epsilon", "1.85", "--S", "47", "--r", "9", "--F", "912", "--W", "48")[1].strip() == "1.052458e-02"
    assert float(run(capsys, "gap", "to-db", "1.05e-2", "--rate", "0.8")[1]) == pytest.approx(1.8533)
    assert run(capsys, "gap", "to-db", "0.7", "--rate", "0.8")[0] == EXIT_USAGE
    assert run(capsys, "gap", "to-db", "0.01")[0] == EXIT_USAGE


def test_simulate_and_sweep(tmp_path, capsys):
    cfg = {
        "code": {"L": 1, "M": 3, "Sp": 25},
        "sim": {"W": 10, "I": 3, "F": 30, "min_bits": 20000, "seed": 3},
        "channel": {"epsilon": [0.03, 0.05]},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, out1, err = run(capsys, "sweep", "--config", str(path), "--no-wall")
    assert code == EXIT_OK and "point 0" in err
    lines = out1.strip().splitlines()
    assert lines[0].startswith("gap_db,epsilon,bits") and len(lines) == 3
    code, out2, _ = run(capsys, "sweep", "--config", str(path), "--no-wall", "--threads", "2", "-q")
    assert out1 == out2
    code, out, _ = run(capsys, "simulate", "--config", str(path), "--epsilon", "0.03", "--no-wall", "-q")
    assert code == EXIT_OK and out.splitlines()[1] == lines[1]
    assert run(capsys, "simulate", "--config", str(path), "-q")[0] == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "simulate", "--config", str(bad), "--epsilon", "0.01")[0] == EXIT_USAGE
    cfg["sim"]["bogus"] = 1
    path.write_text(json.dumps(cfg))
    assert run(capsys, "sweep", "--config", str(path), "-q")[0] == EXIT_USAGE


def test_simulate_flags_gap(capsys):
    code, out, _ = run(
        capsys, "simulate", "--L", "1", "--M", "3", "--Sp", "25", "--W", "10", "--I", "3", "--F", "30",
        "--min-bits", "10000", "--gap", "3.0", "-q", "--no-wall",
    )
    assert code == EXIT_OK and out.splitlines()[1].startswith("3.0000,")


def test_entry_point():
    res = subprocess.run([sys.executable, "-m", "hosc.cli", "dts", "bounds", "6", "3"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.split() == ["36", "186"]
