import json
import subprocess
import sys

import pytest

from subdyn import cli
from subdyn.falsify import exact_matrix_relation
from subdyn.projdyn import Padic

SANOV = {"field": {"type": "real"}, "n": 2,
         "matrices": [[["1", "2"], ["0", "1"]], [["1", "0"], ["2", "1"]]],
         "arenas": [{"arcs": {"plus": ["1", "inf"], "minus": ["inf", "-1"]}},
                    {"arcs": {"plus": ["0", "1"], "minus": ["-1", "0"]}}]}


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        p = tmp_path / name
        p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(p)
    return write


def run(*argv):
    code, report, _ = cli.run(["--no-timestamp", *argv])
    return code, report


def test_fg_intersect_trivial(files):
    g1 = files("g1.json", {"rank": 2, "generators": ["a"]})
    g2 = files("g2.json", {"rank": 2, "generators": ["b"]})
    code, rep = run("fg", "intersect", g1, g2)
    assert code == 0
    assert rep["result"]["trivial"] is True
    assert rep["result"]["intersection"]["generators"] == []


def test_sanov_pingpong_certified(files):
    code, rep = run("projdyn", "pingpong", files("sanov.json", SANOV))
    assert code == 0 and rep["result"]["certified"] and rep["result"]["mode"] == "EXACT"


def test_overlapping_arcs_are_false(files):
    doc = dict(SANOV, arenas=[SANOV["arenas"][0], SANOV["arenas"][0]])
    code, rep = run("projdyn", "pingpong", files("bad.json", doc))
    assert code == 1 and "overlap" in rep["result"]


def test_recur_bound_rotation(files):
    sys5 = files("sys.json", {"rank": 1, "points": 5, "perms": {"T": [2, 3, 4, 5, 1]}})
    code, rep = run("recur", "bound", sys5, "--A", "0,1", "--eps", "1/10")
    assert code == 0 and rep["result"]["n"] == 4
    code, _ = run("recur", "verify", sys5, "--A", "0,1", "--eps", "1/10", "--n", "4")
    assert code == 0
    code, _ = run("recur", "verify", sys5, "--A", "0,1", "--eps", "1/10", "--n", "2")
    assert code == 1


def test_zero_and_one_based_T_agree(files):
    a = files("a.json", {"points": 5, "perms": {"T": [2, 3, 4, 5, 1]}})
    b = files("b.json", {"points": 5, "perms": {"T": [1, 2, 3, 4, 0]}})
    assert run("recur", "tower", a, "--A", "0")[1]["result"] == run("recur", "tower", b, "--A", "0")[1]["result"]


def test_report_carries_version_seed_constants(files):
    g = files("g.json", {"rank": 2, "generators": ["ab"]})
    code, rep = run("--seed", "12345678901234", "fg", "rank", g)
    assert code == 0
    assert rep["seed"] == 12345678901234
    assert rep["version"] == cli.__version__
    assert {"c", "c1", "c2", "tolerance", "precision", "budget"} <= set(rep["constants"])
    assert "timestamp" not in rep


def test_reports_are_byte_identical(files, tmp_path):
    doc = files("m.json", {"field": {"type": "real"}, "n": 3,
                           "entries": [["100", "0", "0"], ["0", "1", "0"], ["0", "0", "1/100"]]})
    outs = []
    for k in range(2):
        out = str(tmp_path / f"r{k}.json")
        assert cli.main(["--no-timestamp", "--out", out, "projdyn", "proximal", doc,
                         "--r", "1/2", "--eps", "1/10"]) == 0
        outs.append(open(out, "rb").read())
    assert outs[0] == outs[1]


def test_flags_after_subcommand(files):
    g = files("g.json", {"rank": 2, "generators": ["a"]})
    code, report, _ = cli.run(["fg", "rank", g, "--seed", "7", "--no-timestamp"])
    assert code == 0 and report["seed"] == 7 and "timestamp" not in report


@pytest.mark.parametrize("doc,needle", [
    ({"rank": 2, "generators": ["a"], "extra": 1}, "unknown keys"),
    ({"rank": 2}, "missing keys"),
    ({"rank": 2, "generators": ["ac"]}, "generators[0]"),
    ('{"rank": 2,\n  "generators": [}', "line 2"),
])
def test_input_errors_exit_3(files, doc, needle):
    code, rep = run("fg", "rank", files("bad.json", doc))
    assert code == 3 and rep["verdict"] == "input_error"
    assert needle in rep["result"]["error"]


def test_singular_matrix_rejected(files):
    m = files("m.json", {"field": {"type": "real"}, "n": 2, "entries": [["1", "2"], ["2", "4"]]})
    code, rep = run("projdyn", "cartan", m)
    assert code == 3 and "singular" in rep["result"]["error"]


def test_inconclusive_differs_from_false(files):
    rot = files("rot.json", {"field": {"type": "real"}, "n": 2, "entries": [["0", "-1"], ["1", "0"]]})
    assert run("projdyn", "fixdata", rot)[0] == 2
    assert run("projdyn", "proximal", rot, "--r", "1/2", "--eps", "1/10")[0] == 1


def test_irs_build_feeds_other_commands(files, tmp_path):
    act = files("act.json", {"rank": 2, "points": 3, "weights": ["1/3"] * 3,
                             "perms": {"a": [2, 3, 1], "b": [1, 2, 3]}})
    out = str(tmp_path / "irs.json")
    assert cli.main(["--no-timestamp", "--out", out, "irs", "build", act]) == 0
    g = files("g.json", {"rank": 2, "generators": ["b"]})
    code, rep = run("irs", "cover", out, g)
    assert code == 0 and rep["result"]["covers"]
    code, rep = run("irs", "condition", out, "--max-index", "3")
    assert code == 0 and rep["result"]["mass"] == "1"
    assert run("irs", "condition", out, "--max-index", "2")[0] == 1


def test_padic_pingpong_with_bound_arenas(files):
    doc = {"field": {"type": "padic", "p": 5, "digits": 12}, "n": 2,
           "matrices": [[["25", "0"], ["0", "1/25"]], [["13", "12"], ["12", "13"]]]}
    code, rep = run("projdyn", "pingpong", files("p.json", doc))
    assert code == 0 and rep["result"]["certified"]
    assert all(m == "BOUND" for m in rep["result"]["modes"])
    # the exact falsifier agrees: no short relation between the two
    Q5 = Padic(5, 12)
    assert exact_matrix_relation([Q5.mat(m) for m in doc["matrices"]], 8) is None


def test_synthesize_and_degenerate(files):
    doc = {"field": {"type": "real"}, "n": 2, "b_p": [["4", "0"], ["0", "1/4"]],
           "b_q": [["4", "0"], ["0", "1/4"]], "gamma": [["1", "0"], ["0", "1"]]}
    code, rep = run("projdyn", "synthesize", files("s.json", doc))
    assert code == 0 and all(m > 0 for m in rep["result"]["margins"].values())
    doc["gamma"] = [["0", "-1"], ["1", "0"]]
    code, rep = run("projdyn", "synthesize", files("d.json", doc))
    assert code == 1 and "degenerate_position" in rep["result"]


def test_family_sanov(files):
    doc = {"field": {"type": "real"}, "n": 2, "generators": SANOV["matrices"],
           "groups": [{"generators": ["aa", "bb"], "b": "aabb"}, {"generators": ["ab", "bA"], "b": "ab"}],
           "requests": [{"p": 0, "q": 1, "gamma": "e"}, {"p": 1, "q": 0, "gamma": "ab"}]}
    code, rep = run("projdyn", "family", files("f.json", doc))
    assert code == 0
    assert rep["result"]["stallings_rank"] == 2 and rep["result"]["failures"] == []


def test_module_entry_point(files):
    g1 = files("g1.json", {"rank": 2, "generators": ["a"]})
    g2 = files("g2.json", {"rank": 2, "generators": ["b"]})
    proc = subprocess.run([sys.executable, "-m", "subdyn.cli", "--no-timestamp", "fg", "intersect", g1, g2],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["trivial"] is True
