import json
import subprocess
import sys

import pytest

from mkwaring.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compute(capsys):
    code, out, err = run(capsys, "compute", "14")
    assert code == 0 and "m=2548" in out and not err
    code, out, _ = run(capsys, "compute", "1")
    assert code == 0 and "m=1" in out


def test_compute_legacy_banner(capsys):
    code, out, err = run(capsys, "compute", "14", "--legacy-1976")
    assert code == 0 and "m=5096" in out
    assert "LEGACY" in err


def test_compute_range_json(capsys):
    code, out, _ = run(capsys, "compute", "5", "7", "--json")
    doc = json.loads(out)
    assert code == 0 and [d["m"] for d in doc] == ["10", "360", "14"]
    code, out, _ = run(capsys, "compute", "6", "--json")
    assert json.loads(out)["m"] == "360"


@pytest.mark.parametrize("argv", [
    ["compute", "0"],
    ["compute", "x"],
    ["compute", "7", "5"],
    ["compute", "14", "--bogus"],
    ["frobnicate"],
    [],
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_table_check_fixture(capsys):
    code, out, _ = run(capsys, "table", "--from", "1", "--to", "150", "--check-fixture")
    assert code == 0 and "0 mismatches" in out


def test_table_oeis(capsys):
    code, out, _ = run(capsys, "table", "--from", "1", "--to", "150", "--oeis", "A370252")
    assert code == 0
    code, _, _ = run(capsys, "table", "--oeis", "A005729", "--oeis", "A005730", "--oeis", "A005731")
    assert code == 0


def test_table_legacy_mismatch(capsys):
    code, out, err = run(capsys, "table", "--check-fixture", "--legacy-1976")
    assert code == 1
    assert "k=14 m: expected 2548, got 5096" in out
    assert "LEGACY" in err


def test_table_bad_range(capsys):
    assert run(capsys, "table", "--from", "5", "--to", "4")[0] == 2
    assert run(capsys, "table", "--oeis", "A000045")[0] == 2
    assert run(capsys, "table", "--oeis", "nonsense")[0] == 2
    assert run(capsys, "table", "--from", "200", "--to", "210", "--oeis", "A370252")[0] == 2


def test_table_render_formats(capsys, tmp_path):
    code, out, _ = run(capsys, "table", "--to", "3")
    assert code == 0 and out == "k,a,b,m_over_k,m,corrected\n1,1,1,1,1,0\n2,1,1,1,2,0\n3,1,2,2,6,0\n"
    code, out, _ = run(capsys, "table", "--to", "2", "--format", "json")
    assert len(json.loads(out)) == 2
    path = tmp_path / "t.md"
    code, out, _ = run(capsys, "table", "--from", "14", "--to", "14", "--format", "markdown", "-o", str(path))
    assert code == 0 and "**2548**" in path.read_text()


def test_table_bfile(capsys, tmp_path):
    good = tmp_path / "b370252.txt"
    good.write_text("1 1\n2 2\n3 6\n")
    assert run(capsys, "table", "--to", "10", "--bfile", str(good))[0] == 0
    bad = tmp_path / "b005729.txt"
    bad.write_text("1 1\n2 1\n3 5\n")
    code, out, _ = run(capsys, "table", "--to", "10", "--bfile", str(bad))
    assert code == 1 and "k=3" in out
    broken = tmp_path / "b005730.txt"
    broken.write_text("1 1\nabc\n")
    code, _, err = run(capsys, "table", "--bfile", str(broken))
    assert code == 4 and ":2:" in err
    assert run(capsys, "table", "--bfile", str(tmp_path / "b000001.txt"))[0] == 4


def test_table_fetch_failure(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path))
    monkeypatch.setenv("MKWARING_OEIS_ENDPOINT", "http://127.0.0.1:9/{id}")
    code, _, err = run(capsys, "table", "--oeis", "A370252", "--fetch")
    assert code == 4 and "cannot fetch" in err


def test_certify(capsys):
    code, out, _ = run(capsys, "certify", "3")
    assert code == 0 and "status=FULL" in out
    code, out, _ = run(capsys, "certify", "1")
    assert code == 0 and "status=FULL" in out


def test_certify_6_json(capsys, tmp_path):
    code, out, _ = run(capsys, "certify", "6", "--json", "-")
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "FULL"
    assert "Z/8[x]/(x^2+x+1)" in {w["ring"] for w in doc["witnesses"]}
    path = tmp_path / "c.json"
    code, out, _ = run(capsys, "certify", "6", "--json", str(path))
    assert code == 0 and json.loads(path.read_text())["m"] == "360" and "status=FULL" in out


def test_certify_partial(capsys):
    code, out, _ = run(capsys, "certify", "6", "--max-ring-size", "16")
    assert code == 3 and "uncertified primes: 2" in out


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "--ring", "Z/8[x]/(x^2+x+1)", "--k", "6")
    assert code == 0 and json.loads(out)["m_k_R"] == 8
    code, out, _ = run(capsys, "oracle", "--ring", "GF(2^2)", "--k", "3", "--kind", "K")
    assert code == 0 and json.loads(out)["is_full"] is False
    code, out, _ = run(capsys, "oracle", "--ring", "Z/4[x]/(x)", "--k", "2")
    assert code == 0 and json.loads(out)["m_k_R"] == 1


def test_oracle_errors(capsys):
    assert run(capsys, "oracle", "--ring", "Z/8[x]/(2x^2+1)", "--k", "2")[0] == 2
    assert run(capsys, "oracle", "--ring", "GF(3^2)", "--k", "2", "--kind", "K")[0] == 2
    assert run(capsys, "oracle", "--ring", "Z/8[x]/(x^2+x+1)", "--k", "2", "--max-ring-size", "10")[0] == 4
    assert run(capsys, "oracle", "--k", "2")[0] == 2


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0 and "[FAIL]" not in out


def test_selftest_legacy_fails(capsys):
    code, out, _ = run(capsys, "selftest", "--legacy-1976")
    assert code == 1
    assert "[FAIL] published table fixture" in out


def test_selftest_low_cap(capsys):
    code, out, _ = run(capsys, "selftest", "--max-ring-size", "10")
    assert code == 1
    assert "[SKIPPED-FATAL] cube-root ring tower" in out


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"table": {"from": 14, "to": 14, "format": "markdown"}}))
    code, out, _ = run(capsys, "--config", str(cfg), "table")
    assert code == 0 and "**2548**" in out
    # flags win over the file
    code, out, _ = run(capsys, "--config", str(cfg), "table", "--to", "15")
    assert code == 0 and "| 15 |" in out
    flat = tmp_path / "flat.json"
    flat.write_text(json.dumps({"max-ring-size": 16}))
    assert run(capsys, "--config", str(flat), "certify", "6")[0] == 3


def test_config_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"no_such_option": 1}))
    assert run(capsys, "--config", str(bad), "compute", "3")[0] == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert run(capsys, "--config", str(broken), "compute", "3")[0] == 2
    assert run(capsys, "--config", str(tmp_path / "absent.json"), "compute", "3")[0] == 4


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mkwaring", "compute", "14"], capture_output=True, text=True)
    assert proc.returncode == 0 and "m=2548" in proc.stdout
