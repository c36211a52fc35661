import io
import json
import subprocess
import sys

import pytest

from strongmin.cli import run
from strongmin.report import DELIM


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), buf)
    return code, buf.getvalue()


def json_part(out):
    return json.loads(out.split(DELIM + "\n", 1)[1])


def test_delta_prints_two():
    assert call("delta", "examp1.struct", "--set", "a1,a2,b1,b2,c1,c2") == (0, "2\n")


def test_delta_json():
    code, out = call("delta", "examp1", "--set", "c1", "--json")
    assert code == 0 and json_part(out)["delta"] == 1


def test_verify_examp2():
    code, out = call("verify", "examp2")
    assert code == 0
    assert "PASS" in out and "FAIL" not in out.split(DELIM)[0]
    assert json_part(out)["ok"] is True


def test_decompose_height_two():
    code, out = call("decompose", "examp1.struct", "--base", "a1,a2", "--group", "pointwise")
    assert code == 0
    assert out.splitlines()[0].endswith("height 2")
    assert json_part(out)["height"] == 2


@pytest.mark.parametrize("argv", [
    ["delta", "examp1", "--set", "a1,b1"],
    ["icl", "k4-design", "--set", "w"],
    ["good-pairs", "examp1", "--chi"],
    ["linear-decompose", "examp2"],
    ["decompose", "steiner-ce"],
    ["orbits", "examp2-sym", "--group", "setwise"],
    ["dclstar", "examp2"],
    ["quasigroup", "alpha-line-4"],
    ["flowers", "two-flowers", "--set", "c11,c12,c13", "--over", "b1,b2"],
    ["lmu-check", "examp1"],
])
def test_output_is_byte_identical(argv):
    a, b = call(*argv), call(*argv)
    assert a == b


def test_exit_codes(capsys):
    assert call("nope")[0] == 2
    assert call("delta")[0] == 2
    assert call("delta", "missing.struct")[0] == 2
    assert call("delta", "examp1", "--set", "zz")[0] == 2  # unknown point is a parse error
    assert call("quasigroup", "examp1")[0] == 1
    assert call("lmu-check", "examp1", "--mu", "alpha=1")[0] == 1
    err = capsys.readouterr().err
    assert "usage error" in err


def test_unknown_point_message(capsys):
    call("delta", "examp1", "--set", "zz")
    assert "zz" in capsys.readouterr().err


def test_mu_one_warning(capsys):
    code, out = call("quasigroup", "alpha-line-3")
    assert code == 0 and out.startswith("definable-product")
    call("build-generic", "alpha-line-3", "--mu", "alpha=1")
    assert "mu(alpha) = 1" in capsys.readouterr().err


def test_corrupt_file_reported_with_line(tmp_path, capsys):
    bad = tmp_path / "bad.struct"
    bad.write_text("flavor: hypergraph\npoints: a b\nrel: a b c\n")
    assert call("delta", str(bad))[0] == 2
    assert f"{bad}:3:" in capsys.readouterr().err
    code, out = call("selftest", "--count", "3", "--fixtures-dir", str(tmp_path))
    assert code == 1
    assert f"{bad}:3:" in out


def test_build_generic_and_report(tmp_path):
    seed = tmp_path / "seed.struct"
    seed.write_text("flavor: linear\npoints: a1 a2\n")
    rep = tmp_path / "rep"
    code, out = call("build-generic", str(seed), "--mu", "alpha=2", "--alpha-at", "a1,a2", "--report", str(rep))
    assert code == 0
    assert out.split(DELIM)[0].count("realized:") == 2
    assert json_part(out)["complete"] is True
    assert {p.name for p in rep.iterdir()} >= {"report.txt", "growth.png", "structure.png", "input.png"}
    assert (rep / "report.txt").read_text() == out


def test_build_budget_exhausted(tmp_path):
    seed = tmp_path / "seed.struct"
    seed.write_text("flavor: linear\npoints: a1 a2\n")
    code, out = call("build-generic", str(seed), "--mu", "alpha=3", "--alpha-at", "a1,a2", "--budget", "3")
    assert code == 1 and "unmet" in out


def test_amalgamate(tmp_path):
    out_file = tmp_path / "am.struct"
    code, out = call("amalgamate", "examp1", "examp1", "--glue", "a1=a1,a2=a2", "--out", str(out_file))
    assert code == 0 and json_part(out)["delta"] == 2
    code, out = call("delta", str(out_file))
    assert out == "2\n"


def test_figures_for_structured_verbs(tmp_path):
    for argv, fig in [(["decompose", "examp2"], "decomposition.png"), (["dclstar", "examp1"], "orbits-setwise.png"),
                      (["flowers", "two-flowers", "--set", "c11,c12,c13", "--over", "b1,b2"], "bouquet.png")]:
        d = tmp_path / argv[0]
        assert call(*argv, "--report", str(d))[0] == 0
        assert (d / fig).stat().st_size > 1000


def test_selftest_seed_determinism():
    code0, out0 = call("selftest", "--count", "20")
    code7, out7 = call("selftest", "--count", "20", "--seed", "7")
    assert code0 == code7 == 0
    status = lambda out: [(p["name"], p["status"]) for p in json_part(out)["properties"]]
    assert status(out0) == status(out7)
    assert call("selftest", "--count", "20")[1] == out0


def test_no_color_and_console_script():
    env = {"NO_COLOR": "1", "PATH": ""}
    r = subprocess.run([sys.executable, "-m", "strongmin.cli", "verify", "examp1"], capture_output=True, text=True,
                       env=env)
    assert r.returncode == 0 and "\033[" not in r.stdout
