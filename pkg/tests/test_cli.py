import json
import shutil
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

import mlab.verifier as V
from mlab.catalog import bundled_catalog_dir
from mlab.cli import cli_main
from mlab.verifier import FAIL, CheckReport

CATALOG = bundled_catalog_dir()
CORE = CATALOG / "core.grp"
SCHEMA = json.loads((Path(V.__file__).parent / "data" / "report.schema.json").read_text())


def run(capsys, *argv):
    code = cli_main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_multiplier_plain(capsys):
    code, out, _ = run(capsys, "multiplier", CORE, "--group", "S4")
    assert code == 0 and out == "S4: [2]\n"


def test_multiplier_json_validates(capsys):
    code, out, _ = run(capsys, "multiplier", CORE, "--json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    got = {r["group"]: r["invariants"] for r in doc["results"]}
    assert got == {"S3": [], "D4": [2], "Q8": [], "D6": [2], "Dic3": [], "A4": [2], "S4": [2]}


def test_bogomolov(capsys):
    code, out, _ = run(capsys, "bogomolov", CORE, "--json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    assert all(r["kind"] == "sha2" and r["invariants"] == [] for r in doc["results"])


def test_group_queries(capsys):
    assert run(capsys, "sylow", CORE, "--group", "S4", "-p", "2")[1].startswith("S4 p=2: order 8, class 2,")
    assert run(capsys, "normalizer", CORE, "--group", "S4", "-p", "3")[1].startswith("S4 p=3: N_G(P) order 6,")
    assert run(capsys, "class", CORE, "--group", "S4")[1] == "S4: not nilpotent\n"
    assert run(capsys, "class", CORE, "--group", "D4")[1] == "D4: class 2\n"
    assert run(capsys, "class", CORE, "--group", "S4", "-p", "2")[1] == "S4 Sylow 2: class 2\n"


def test_verify_plain_and_json(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", CORE, "--group", "S4", "--check", "theorem_bogomolov", "-p", "2")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2 and lines[0].split()[:3] == ["PASS", "S4", "theorem_bogomolov"]
    assert lines[1] == "summary: total=1 PASS=1 FAIL=0 NOT_APPLICABLE=0 SKIPPED_BUDGET=0"
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", CORE, "--check", "res_cor_identity", "--json", "--output", dest)
    assert code == 0 and out == ""
    doc = json.loads(dest.read_text())
    jsonschema.validate(doc, SCHEMA)
    assert doc["summary"]["FAIL"] == 0 and doc["summary"]["total"] == len(doc["reports"]) > 0


def test_verify_fail_exit_code(capsys, monkeypatch):
    def broken(G):
        return CheckReport("h2_order", G.name, {}, FAIL, {"forced": True})

    monkeypatch.setattr(V, "check_h2_order", broken)
    code, out, _ = run(capsys, "verify", CORE, "--group", "S3", "--check", "h2_order", "--json")
    assert code == 1
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["reports"][0]["witness"] == {"forced": True}


def test_verify_budget(capsys):
    code, out, _ = run(capsys, "verify", CORE, "--group", "S4", "--check", "h2_order", "--max-order", "12")
    assert code == 0 and out.startswith("SKIPPED_BUDGET")


def test_suite_json(capsys, tmp_path):
    small = tmp_path / "small.grp"
    small.write_text("group C2\nperm (1 2)\nend\n\ngroup S3\nperm (1 2)\nperm (1 2 3)\nend\n")
    code, out, _ = run(capsys, "suite", small, "--json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["format"] == "mlab-report/1" and "jobs" not in doc["config"]
    assert {r["group"] for r in doc["reports"]} == {"C2", "S3"}


BAD_FILES = [
    ("group G\nperm (1 2 1)\nend\n", "line 2, column 11: point 1 appears twice"),
    ("group G\ntable 2\n0 1\n1 1\nend\n", "line 4, column 3:"),
    ("group G\nperm (1 2)\n", "line 1, column 1:"),
]


@pytest.mark.parametrize("text,msg", BAD_FILES)
def test_parse_errors_exit_2(capsys, tmp_path, text, msg):
    f = tmp_path / "bad.grp"
    f.write_text(text)
    code, out, err = run(capsys, "multiplier", f)
    assert code == 2 and out == "" and msg in err


def test_usage_errors_exit_2(capsys, tmp_path):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "sylow", CORE, "-p", "2")[0] == 2  # --group is required
    assert run(capsys, "multiplier", tmp_path / "missing.grp")[0] == 2
    code, _, err = run(capsys, "multiplier", CORE, "--group", "nope")
    assert code == 2 and "no group named 'nope'" in err
    assert run(capsys, "verify", CORE, "--check", "bogus")[0] == 2
    code, _, err = run(capsys, "sylow", CORE, "--group", "S4", "-p", "4")
    assert code == 2 and "prime" in err


def test_cap_exceeded_exit_2(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("MLAB_MAX_ORDER", "8")
    code, _, err = run(capsys, "multiplier", CORE, "--group", "S4")
    assert code == 2 and "cap" in err


def test_cache_directory(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("MLAB_CACHE_DIR", str(tmp_path))
    assert run(capsys, "multiplier", CORE, "--group", "A4")[1] == "A4: [2]\n"
    files = list(tmp_path.rglob("*.json"))
    assert len(files) == 1
    # a second run is served from the cache; a corrupt file is recomputed
    assert run(capsys, "multiplier", CORE, "--group", "A4")[1] == "A4: [2]\n"
    files[0].write_text("garbage")
    code, out, _ = run(capsys, "multiplier", CORE, "--group", "A4")
    assert code == 0 and out == "A4: [2]\n"
    assert json.loads(files[0].read_text())["payload"] == [2]


def test_console_script():
    exe = shutil.which("mlab")
    cmd = [exe] if exe else [sys.executable, "-m", "mlab.cli"]
    p = subprocess.run(cmd + ["multiplier", str(CORE), "--group", "D4"], capture_output=True, text=True, timeout=120)
    assert p.returncode == 0 and p.stdout == "D4: [2]\n"
    p = subprocess.run(cmd + ["--version"], capture_output=True, text=True, timeout=60)
    assert p.returncode == 0 and p.stdout.startswith("mlab ")


@pytest.mark.parametrize("command", ["multiplier", "bogomolov"])
def test_cached_output_is_byte_identical(capsys, tmp_path, monkeypatch, command):
    monkeypatch.delenv("MLAB_CACHE_DIR", raising=False)
    fresh = run(capsys, command, CORE, "--json")
    monkeypatch.setenv("MLAB_CACHE_DIR", str(tmp_path))
    first = run(capsys, command, CORE, "--json")
    assert list(tmp_path.rglob("*.json"))
    second = run(capsys, command, CORE, "--json")
    assert fresh == first == second and fresh[0] == 0


def test_explore_flag(capsys):
    code, out, _ = run(capsys, "verify", CORE, "--group", "S4", "--check", "theorem_holt", "-p", "2",
                       "--explore", "--json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    (r,) = doc["reports"]
    assert r["status"] == "NOT_APPLICABLE" and r["witness"]["outside_hypothesis"]["equal"] is True
    assert doc["config"]["explore"] is True
    code, out, _ = run(capsys, "verify", CORE, "--group", "S4", "--check", "theorem_holt", "-p", "2", "--json")
    assert "outside_hypothesis" not in json.loads(out)["reports"][0]["witness"]
