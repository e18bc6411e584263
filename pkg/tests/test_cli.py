import json
import subprocess
import sys

from pgl3ekr.cli import main
from pgl3ekr.pairspace import load_N


def test_q2_all_text(capsys):
    assert main(["--q", "2", "--suite", "all"]) == 0
    out = capsys.readouterr().out
    assert "FLAGGED" in out and "FAIL " not in out
    assert out.strip().splitlines()[-1].endswith("2 flagged")


def test_not_prime_power(capsys):
    assert main(["--q", "6", "--suite", "all"]) == 2
    assert "not a prime power" in capsys.readouterr().err


def test_bad_flags(capsys):
    assert main(["--workers", "0"]) == 2
    assert main(["--suite", "bogus"]) == 2
    assert main(["--q", "7", "--suite", "all"]) == 2
    assert main(["--q", "x"]) == 2


def test_json_n_rank_q3(tmp_path):
    out = tmp_path / "r.json"
    assert main(["--q", "3", "--suite", "N", "--format", "json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert set(data) == {"version", "config", "checks"}
    keys = {"id", "q", "status", "expected", "computed", "citation", "elapsed_ms", "note"}
    assert all(set(c) == keys for c in data["checks"])
    rank = next(c for c in data["checks"] if c["id"] == "N.rank")
    assert rank["computed"]["rank"] == 120
    # round trip is idempotent
    again = json.dumps(json.loads(json.dumps(data)), indent=2) + "\n"
    assert again == out.read_text()


def test_text_and_json_agree(tmp_path, capsys):
    main(["--q", "2", "--suite", "group", "--format", "json", "--out", str(tmp_path / "r.json")])
    main(["--q", "2", "--suite", "group"])
    text = capsys.readouterr().out
    data = json.loads((tmp_path / "r.json").read_text())
    for c in data["checks"]:
        line = next(l for l in text.splitlines() if f" {c['id']} " in l)
        assert line.split()[0] == c["status"].upper()


def test_dump_n(tmp_path):
    path = tmp_path / "n.bin"
    assert main(["--q", "2,3", "--suite", "gf", "--dump-n", str(path)]) == 0
    assert load_N(tmp_path / "n_q2.bin").n == 7
    assert load_N(tmp_path / "n_q3.bin").n == 13


def test_seed_and_workers_flags(capsys):
    assert main(["--q", "2", "--suite", "group", "--seed", "0x2a", "--workers", "2", "--budget", "10"]) == 0
    assert "seed=0x2a" in capsys.readouterr().out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "pgl3ekr", "--q", "6"], capture_output=True, text=True)
    assert res.returncode == 2
