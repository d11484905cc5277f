import csv
import io
import json
import subprocess
import sys

import pytest

from conftest import FIXTURES, SCHEME_DIR
from pairpaths.circuit import build_scheme_b, with_splitter
from pairpaths.cli import main
from pairpaths.evolution import dense_oracle, outcome_distribution


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--format", "json")
    assert code == 0
    data = json.loads(text)
    assert data["schema_version"] == 1
    return data


def test_simulate_a_json():
    d = run_json("simulate", "--scheme", "a")
    assert d["distribution"]["pEF"] == 0.25 and d["distribution"]["pFE"] == 0.25
    assert d["bell"]["psiPlusOverlap"] == 1.0


def test_simulate_b():
    d = run_json("simulate", "--scheme", "b")
    assert d["distribution"]["pEE"] == 0.25 and d["distribution"]["pFF"] == 0.25
    assert d["bell"]["phiMinusOverlap"] == 1.0
    code, text = run("simulate", "--scheme", "b")
    assert code == 0 and "phiMinusOverlap" in text


def test_tolerance_flag_controls_pruning():
    loose = run_json("simulate", "--scheme", "a", "--tolerance", "0")["state"]
    default = run_json("simulate", "--scheme", "a")["state"]
    assert len(loose) >= len(default) == 4


def test_simulate_file_and_csv():
    code, text = run("simulate", "--scheme", str(SCHEME_DIR / "scheme_a.scm.txt"), "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["section", "key", "value", "imag"]
    assert ["probability", "EF", "0.25", ""] in rows


def test_simulate_missing_file(capsys):
    code, _ = run("simulate", "--scheme", "missing.scm.txt")
    assert code == 2
    assert "file not found" in capsys.readouterr().err


def test_simulate_bad_file(capsys):
    code, _ = run("simulate", "--scheme", str(FIXTURES / "bad_ratio.scm.txt"))
    assert code == 2
    assert "4:22" in capsys.readouterr().err


def test_sample_b():
    d = run_json("sample", "--scheme", "b", "-n", "100000", "--seed", "7")
    assert d["cells"]["EF"] == 0 and d["cells"]["FE"] == 0
    assert d["n"] == 100000 and d["seed"] == 7
    assert "standardError" in d["frequencies"]["EE"]


def test_sample_zero_and_repeatable():
    code, text = run("sample", "--scheme", "a", "-n", "0", "--seed", "1")
    assert code == 0
    assert run("sample", "--scheme", "b", "-n", "1000")[1] == run("sample", "--scheme", "b", "-n", "1000")[1]


def test_sample_negative_n():
    assert run("sample", "--scheme", "a", "-n", "-3")[0] == 2


def test_lhv_from_qm():
    d = run_json("lhv", "--from-qm")
    assert d["verdict"] == "Infeasible"
    assert d["contradictionFraction"] == 0.5
    assert d["certificate"] == {"a:EE": "-1", "b:EE": "1"}


def test_lhv_product_form():
    assert run_json("lhv", "--from-qm", "--product-form")["verdict"] == "Infeasible"


def test_lhv_files(tmp_path):
    p = tmp_path / "b.json"
    p.write_text('{"EE":0.25,"EF":0,"FE":0,"FF":0.25,"E_":0,"F_":0,"_E":0,"_F":0,"__":0.5}')
    d = run_json("lhv", "--a", str(p), "--b", str(p))
    assert d["verdict"] == "Feasible"
    assert d["weights"] == {"EE": "1/4", "FF": "1/4", "__": "1/2"}
    assert d["contradictionFraction"] == 0.0


def test_lhv_malformed(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"EE": 1}')
    assert run("lhv", "--a", str(p), "--b", str(p))[0] == 2
    assert run("lhv")[0] == 2


def test_sweep_matches_simulate():
    rows = run_json("sweep", "--scheme", "a", "--param", "bs1=1/sqrt2")["rows"]
    sim = run_json("simulate", "--scheme", "a")["distribution"]
    assert len(rows) == 1
    for k in ("pEE", "pEF", "pFE", "pFF"):
        assert rows[0][k] == sim[k]
    assert rows[0]["gammaTotal"] == sim["gammaTotal"]


def test_sweep_zero_phase_matches_default():
    rows = run_json("sweep", "--scheme", "a", "--param", "phase_ab=0:0:1")["rows"]
    sim = run_json("simulate", "--scheme", "a")["distribution"]
    assert rows[0]["pEF"] == sim["pEF"]


def test_sweep_bs3_against_dense_oracle():
    rows = run_json("sweep", "--scheme", "b", "--param", "bs3=0:1:0.25")["rows"]
    assert [r["value"] for r in rows] == [0, 0.25, 0.5, 0.75, 1.0]
    for r in rows:
        d = outcome_distribution(dense_oracle(with_splitter(build_scheme_b(), 3, r["value"])))
        for k in ("pEE", "pEF", "pFE", "pFF"):
            assert r[k] == pytest.approx(getattr(d, k), abs=1e-11)


def test_sweep_phase_grid_in_pi():
    rows = run_json("sweep", "--scheme", "a", "--param", "minus.phase_cd=0:pi:pi/4")["rows"]
    assert len(rows) == 5
    assert rows[-1]["pEE"] == pytest.approx(0.25, abs=1e-12)
    assert rows[-1]["pEF"] == pytest.approx(0, abs=1e-12)


def test_parse_value():
    from pairpaths.cli import UsageError, parse_value
    assert parse_value("1/sqrt2") == 0.5 ** 0.5
    assert parse_value("3pi/4") == pytest.approx(2.356194490192345)
    assert parse_value("-0.5") == -0.5
    with pytest.raises(UsageError):
        parse_value("abc")


def test_sweep_unknown_param():
    assert run("sweep", "--scheme", "a", "--param", "bs9=0:1:0.5")[0] == 2


def test_parse_check():
    assert run("parse-check", str(SCHEME_DIR / "scheme_a.scm.txt"))[0] == 0


def test_parse_check_duplicate_label(capsys):
    code, _ = run("parse-check", str(FIXTURES / "bad_duplicate_label.scm.txt"))
    err = capsys.readouterr().err
    assert code == 2
    assert "6:17" in err and "'P'" in err


def test_parse_check_encoding(capsys):
    code, _ = run("parse-check", str(FIXTURES / "bad_encoding.scm.txt"))
    assert code == 2
    assert "invalid encoding" in capsys.readouterr().err


def test_parse_check_io_failure(tmp_path):
    assert run("parse-check", str(tmp_path))[0] == 3
    assert run("parse-check", str(tmp_path / "nope.scm.txt"))[0] == 3


def test_global_flags_before_command():
    d = json.loads(run("--format", "json", "simulate", "--scheme", "a")[1])
    assert d["command"] == "simulate"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pairpaths", "lhv", "--from-qm", "--format", "json"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["verdict"] == "Infeasible"
