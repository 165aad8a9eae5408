import json
import subprocess
import sys

import pytest

from mmx.cli import main


def strip_timing(obj):
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k != "elapsed_ms"}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def run(capsys, *argv):
    code = main(list(argv) + ["--no-cache"])
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def test_compute_mixed_ex1(capsys):
    code, out, _ = run(capsys, "compute", "mixed", "--instance", "ex1.toml")
    assert code == 0 and out["schema"] == 1 and out["D"] == 2
    assert out["table"]["e^0[2;0]"] == 1 and out["table"]["e^0[1;1]"] == 2 and out["table"]["e^0[0;2]"] == 0


def test_compute_br_and_spread(capsys):
    assert run(capsys, "compute", "br", "--instance", "ex3")[1]["br"] == [3, 1, 0, 0]
    code, out, _ = run(capsys, "compute", "spread", "--instance", "ex1", "--slot", "1")
    assert (out["spread"], out["mu"]) == (2, 2)


def test_verify_teo3ii(capsys):
    code, out, _ = run(capsys, "verify", "--instance", "ex5.toml", "--theorem", "teo3ii", "--j", "0")
    assert code == 0 and out["report"]["pass"]


def test_fc_maxlen(capsys):
    code, out, _ = run(capsys, "fc", "maxlen", "--instance", "ex2.toml", "--slot", "1", "--seed", "7")
    assert code == 0 and out["length"] == 2


def test_fc_find(capsys):
    code, out, _ = run(capsys, "fc", "find", "--instance", "ex2", "--seed", "3")
    assert code == 0 and out["certificate"]["fc3_dims"] == [2, 1]


def test_reduce(capsys):
    code, out, _ = run(capsys, "reduce", "check", "--instance", "ex4", "--generators", "x^2*T1", "y^2*T1")
    assert code == 0 and out["is_reduction"]
    code, out, _ = run(capsys, "reduce", "check", "--instance", "ex4", "--generators", "x^2*T1")
    assert code == 1 and not out["is_reduction"] and out["exit_code"] == 1
    code, out, _ = run(capsys, "reduce", "check", "--instance", "ex2")
    assert code == 0 and out["N"] == out["mu"] == 2


@pytest.mark.parametrize("argv", [
    ["compute", "mixed", "--instance", "error_J_not_finite"],
    ["compute", "mixed", "--instance", "error_no_I"],
    ["compute", "mixed", "--instance", "degenerate_torsion"],
    ["compute", "mixed", "--instance", "does_not_exist.toml"],
    ["verify", "--instance", "ex1", "--theorem", "bogus"],
    ["compute", "br", "--instance", "ex1", "--slot", "9"],
])
def test_input_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out is None and err.startswith("mmx:")


def test_bad_k0_is_input_error(capsys):
    code, _, _ = run(capsys, "verify", "--instance", "ex1", "--theorem", "teo12i", "--k0", "2")
    assert code == 2


def test_repeat_runs_are_identical(capsys):
    argv = ["report", "--instance", "ex2", "--seed", "4"]
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv)[1]
    assert a["pass"] and a["exit_code"] == 0
    assert json.dumps(strip_timing(a)) == json.dumps(strip_timing(b))


def test_out_file(tmp_path, capsys):
    target = tmp_path / "o" / "table.json"
    code = main(["compute", "mixed", "--instance", "ex2", "--out", str(target), "--no-cache"])
    assert code == 0 and capsys.readouterr().out == ""
    assert json.loads(target.read_text())["table"]["e^0[1;1]"] == 1


def test_disk_cache_cold_warm(tmp_path, capsys):
    from mmx.cache import GB_CACHE

    argv = ["compute", "mixed", "--instance", "ex1", "--cache-dir", str(tmp_path)]
    GB_CACHE.clear_memory()  # as in a fresh process
    main(argv)
    cold = json.loads(capsys.readouterr().out)
    assert any(tmp_path.glob("*.gb"))
    GB_CACHE.clear_memory()
    GB_CACHE.hits = 0
    main(argv)
    warm = json.loads(capsys.readouterr().out)
    assert strip_timing(cold) == strip_timing(warm) and GB_CACHE.hits > 0


def test_cache_gc_command(tmp_path, capsys):
    (tmp_path / "x.gb").write_text("x" * 50)
    assert main(["cache", "gc", "--max-bytes", "0", "--dir", str(tmp_path)]) == 0
    assert json.loads(capsys.readouterr().out)["evicted"] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mmx", "compute", "spread", "--instance", "ex2", "--no-cache"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0 and json.loads(proc.stdout)["spread"] == 2


@pytest.mark.parametrize("name", ["ex1", "ex2", "ex3", "ex4", "ex5", "family_ex1", "family_mr2",
                                  "family_nonideal", "degenerate_unit"])
def test_report_passes_on_corpus(capsys, name):
    code, out, _ = run(capsys, "report", "--instance", name)
    assert code == 0 and out["pass"], [c for r in out["verifications"].values() for c in r["subchecks"]
                                       if not c["pass"]]
