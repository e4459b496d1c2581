import json
import subprocess
import sys

import pytest

from lacunaria.cli import (
    EXIT_DOMAIN,
    EXIT_OK,
    EXIT_RESOURCE,
    EXIT_VERIFY_MISMATCH,
    main,
    resolve_sequence,
)
from lacunaria.seqgen import read_sequence


def run(args):
    return main([str(a) for a in args])


# ---------------- sequence specs ----------------

def test_resolve_inline_specs():
    assert resolve_sequence("pow2:5", None, None).prefix(5) == [2, 4, 8, 16, 32]
    assert resolve_sequence("pow2m1", 4, None).prefix(4) == [1, 3, 7, 15]
    assert resolve_sequence("geometric:3/2:2:4", None, None).prefix(4) == [2, 3, 5, 8]
    assert resolve_sequence("smooth:2,3:7", None, None).prefix(7) == [1, 2, 3, 4, 6, 8, 9]
    r = resolve_sequence("rstar:1.0:50:30:7", None, None)
    assert len(r) == 30


def test_resolve_bad_spec():
    with pytest.raises(ValueError):
        resolve_sequence("nope:5", None, None)
    with pytest.raises(ValueError):
        resolve_sequence("pow2", None, None)  # no length anywhere


# ---------------- seq command ----------------

def test_seq_geometric_cli(tmp_path):
    assert run(["seq", "--kind", "geometric", "--q", "2", "--n1", "1",
                "--count", "100", "--out-dir", tmp_path]) == EXIT_OK
    seq = read_sequence(tmp_path / "sequence.txt")
    assert len(seq) == 100
    assert seq.prefix(4) == [1, 2, 4, 8]
    manifest = json.loads((tmp_path / "run.json").read_text())
    assert manifest["subcommand"] == "seq"
    assert "sequence.txt" in manifest["outputs"]


def test_seq_rstar_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(["seq", "--kind", "rstar", "--alpha", "1.0", "--scale", "50",
                    "--count", "40", "--seed", "11", "--out-dir", d]) == EXIT_OK
    assert (a / "sequence.txt").read_bytes() == (b / "sequence.txt").read_bytes()


# ---------------- dio command ----------------

def test_dio_profile_cli(tmp_path):
    assert run(["seq", "--kind", "power", "--base", "2", "--offset", "-1",
                "--count", "60", "--out-dir", tmp_path]) == EXIT_OK
    assert run(["dio", "--seq", tmp_path / "sequence.txt", "--profile",
                "--coeff-bound", "2", "--count", "60",
                "--out-dir", tmp_path]) == EXIT_OK
    payload = json.loads((tmp_path / "dio_profile.json").read_text())
    row = next(r for r in payload if r["a"] == 1 and r["b"] == -2)
    assert row["max_count"] == 59
    assert row["argmax_c"] == "1"
    csv_text = (tmp_path / "dio_profile.csv").read_text()
    assert csv_text.splitlines()[0] == "a,b,max_count,argmax_c,count_N4,count_N2,count_N"


def test_dio_budget_exit_code(tmp_path):
    assert run(["dio", "--seq", "pow2:60", "--multi", "3", "--coeff-bound", "3",
                "--count", "60", "--budget", "10", "--out-dir", tmp_path]) == EXIT_RESOURCE


def test_dio_ratio_cli(tmp_path):
    assert run(["dio", "--seq", "pow2m1:100", "--ratio", "1", "-2",
                "--count", "100", "--out-dir", tmp_path]) == EXIT_OK
    payload = json.loads((tmp_path / "dio_ratio.json").read_text())
    assert payload["ratios"][-1][1] > 0.9


# ---------------- perm command ----------------

def test_perm_pairing_cli(tmp_path):
    assert run(["seq", "--kind", "power", "--base", "2", "--offset", "-1",
                "--count", "80", "--out-dir", tmp_path]) == EXIT_OK
    assert run(["perm", "--pairing", "1", "2", "--seq", tmp_path / "sequence.txt",
                "--blocks", "geometric:2:4:4", "--gap-ratio", "8",
                "--out-dir", tmp_path]) == EXIT_OK
    cert = json.loads((tmp_path / "certificate.json").read_text())
    assert cert["a"] == 1 and cert["b"] == 2
    assert all(blk["c"] == "1" for blk in cert["blocks"])


def test_perm_insufficient_witnesses_exit(tmp_path):
    assert run(["perm", "--pairing", "1", "2", "--seq", "pow2:50",
                "--blocks", "geometric:1:4:4", "--out-dir", tmp_path]) == EXIT_DOMAIN


# ---------------- var command ----------------

def test_var_cli(tmp_path):
    assert run(["var", "--f", "cos:1=1,cos:2=1", "--seq", "pow2",
                "--count", "64", "--out-dir", tmp_path]) == EXIT_OK
    payload = json.loads((tmp_path / "variance.json").read_text())
    assert payload["kac_variance"] == "2"
    assert payload["exact_variance"] == "127/64"
    assert payload["l2_norm_sq"] == "1"


# ---------------- clt command ----------------

def test_clt_cli_small(tmp_path):
    assert run(["clt", "--f", "cos:1", "--seq", "pow2", "--count", "64",
                "--samples", "400", "--seed", "7", "--ks", "gaussian:1/2",
                "--out-dir", tmp_path]) == EXIT_OK
    payload = json.loads((tmp_path / "clt_summary.json").read_text())
    assert abs(payload["statistics"]["variance"] - 0.5) < 0.2
    assert payload["ks"]["distance"] < 0.2


def test_clt_random_perm_spec(tmp_path):
    assert run(["clt", "--f", "cos:1", "--seq", "pow2", "--perm", "random:seed=7",
                "--count", "32", "--samples", "100", "--seed", "3",
                "--out-dir", tmp_path]) == EXIT_OK


# ---------------- lil command ----------------

def test_lil_cli(tmp_path):
    assert run(["lil", "--f", "cos:1", "--seq", "pow2", "--count", "256",
                "--points", "2", "--variance", "1/2", "--seed", "5",
                "--out-dir", tmp_path]) == EXIT_OK
    lines = (tmp_path / "lil_trajectories.csv").read_text().strip().splitlines()
    assert lines[0] == "point,N,running_max_ratio"
    # 2 points x checkpoints {16,...,256} = 2 * 5 rows
    assert len(lines) == 1 + 2 * 5


# ---------------- verify ----------------

def test_verify_clean_run(tmp_path):
    assert run(["seq", "--kind", "geometric", "--q", "3/2", "--n1", "2",
                "--count", "50", "--out-dir", tmp_path]) == EXIT_OK
    assert run(["verify", "--manifest", tmp_path / "run.json"]) == EXIT_OK


def test_verify_detects_edit(tmp_path):
    assert run(["seq", "--kind", "power", "--base", "2", "--offset", "0",
                "--count", "30", "--out-dir", tmp_path]) == EXIT_OK
    path = tmp_path / "sequence.txt"
    path.write_text(path.read_text().replace("1073741824", "1073741825"))
    assert run(["verify", "--manifest", tmp_path / "run.json"]) == EXIT_VERIFY_MISMATCH


def test_verify_monte_carlo_replay(tmp_path):
    assert run(["clt", "--f", "cos:1", "--seq", "pow2", "--count", "32",
                "--samples", "50", "--seed", "9", "--out-dir", tmp_path]) == EXIT_OK
    assert run(["verify", "--manifest", tmp_path / "run.json"]) == EXIT_OK


def test_verify_thread_count_invariance(tmp_path):
    # run with 1 worker, replay manifest patched to 3 workers: same bytes
    assert run(["clt", "--f", "cos:1", "--seq", "pow2", "--count", "32",
                "--samples", "60", "--seed", "2", "--out-dir", tmp_path]) == EXIT_OK
    manifest = json.loads((tmp_path / "run.json").read_text())
    manifest["params"]["threads"] = 3
    (tmp_path / "run.json").write_text(json.dumps(manifest))
    assert run(["verify", "--manifest", tmp_path / "run.json"]) == EXIT_OK


# ---------------- true subprocess smoke ----------------

def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "lacunaria", "seq", "--kind", "power",
         "--base", "2", "--offset", "0", "--count", "5",
         "--out-dir", str(tmp_path)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "sequence.txt").exists()
