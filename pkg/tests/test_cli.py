import io
import json
import subprocess
import sys

import pytest

from kugasatake import documents
from kugasatake.cli import main
from kugasatake.exceptions import ValidationError
from kugasatake.lattice import e8_gram
from kugasatake.pipeline import PipelineConfig, render, run_pipeline, selftest

P3 = {"f1": ["1", "0", "0"], "f2": ["0", "1", "0"]}
P2 = {"f1": ["1", "0"], "f2": ["0", "1"]}
SWAP_SETUP = {"rank": 2, "gram": [[0, -1], [-1, 0]], "generators": [[[0, 1], [1, 0]]],
              "pic_basis": [[1, 1]]}
FLOAT_P3 = {"f1": ["1.4142135623730950488016887242096980786", "0", "1"], "f2": ["0", "1", "0"],
            "precision": 128}


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)
    return write


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


# -- pipeline ----------------------------------------------------------------

def test_pipeline_rank3_swap():
    rep = run_pipeline(PipelineConfig(), P3, SWAP_SETUP)
    assert rep["picard"]["generators"] == [[0, 0, 1]]
    assert rep["picard"]["verified"] is True
    assert rep["torus"]["polarization_type"] == [4, 4]
    sieve = rep["brauer"]["sieve"]
    assert sieve["excluded"] == [2]
    assert all(row["prime"] >= 3 and row["T_invariant_order"] == 1 for row in sieve["checked"])
    bad = {row["prime"]: row for row in rep["brauer"]["bad_primes"]}
    assert bad[2]["bound"] == 2
    assert rep["unverified"] == []


def test_pipeline_rank2_elliptic_curve():
    rep = run_pipeline(PipelineConfig(), P2)
    assert rep["torus"]["complex_dimension"] == 1
    assert rep["torus"]["polarization_type"] == [2]


def test_pipeline_asymmetric_gram_is_stage_tagged():
    bad = dict(SWAP_SETUP, gram=[[0, -1], [2, 0]])
    with pytest.raises(ValidationError) as info:
        run_pipeline(PipelineConfig(), P3, bad)
    assert info.value.stage == "brauer"
    assert "[brauer]" in str(info.value)


def test_pipeline_metadata_above_guard():
    rep = run_pipeline(PipelineConfig(guard=4), {"f1": ["1"] + ["0"] * 4, "f2": ["0", "1"] + ["0"] * 3})
    assert rep["torus"]["dense"] is False
    assert rep["torus"]["complex_dimension"] == 2 ** 3


def test_pipeline_float_mode_is_flagged():
    rep = run_pipeline(PipelineConfig(mode="float", precision_bits=128), FLOAT_P3)
    assert rep["picard"]["verified"] is False
    assert rep["unverified"]


def test_pipeline_is_deterministic():
    cfg1 = PipelineConfig(threads=1)
    cfg4 = PipelineConfig(threads=4)
    a = render(run_pipeline(cfg1, P3, SWAP_SETUP))
    b = render(run_pipeline(cfg1, P3, SWAP_SETUP))
    c = render(run_pipeline(cfg4, P3, SWAP_SETUP))
    assert a == b
    # the config echo does not include the thread count, so the reports match byte for byte
    assert a == c


@pytest.mark.parametrize("doc", [
    {"guard": 1},
    {"mode": "float", "eps": -1.0},
    {"mode": "quadratic"},
    {"mode": "nonsense"},
    {"unknown_key": 3},
])
def test_config_validation(doc):
    with pytest.raises(ValidationError):
        PipelineConfig.from_document(doc)


# -- selftest ----------------------------------------------------------------

def test_selftest_passes():
    buf = io.StringIO()
    ok, results = selftest(stream=buf)
    assert ok
    names = [r[0] for r in results]
    assert "e8_fixture" in names and "float_mode_flags" in names
    assert buf.getvalue().count("PASS") == len(results)


def test_selftest_corrupted_e8():
    gram = [list(r) for r in e8_gram()]
    gram[7][7] = 3
    buf = io.StringIO()
    ok, results = selftest(gram, stream=buf)
    assert not ok
    failed = [r[0] for r in results if not r[1]]
    assert failed == ["e8_fixture"]
    assert "FAIL e8_fixture" in buf.getvalue()


# -- command line ------------------------------------------------------------

def test_cli_pipeline(files, capsys):
    code, out, _ = run(["pipeline", "--period", files("p.json", P3), "--setup", files("s.json", SWAP_SETUP)],
                       capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["picard"]["generators"] == [[0, 0, 1]]


def test_cli_pipeline_threads_byte_identical(files, capsys):
    p, s = files("p.json", P3), files("s.json", SWAP_SETUP)
    outs = []
    for t in ("1", "3"):
        code, out, _ = run(["pipeline", "--period", p, "--setup", s, "--threads", t], capsys)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_cli_out_file(files, capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(["neat", "--n", "3", "--out", str(target)], capsys)
    assert code == 0 and out == ""
    assert documents.load(str(target))["prime"] == 11


def test_cli_validation_exit_code(files, capsys):
    bad = dict(SWAP_SETUP, gram=[[0, -1], [2, 0]])
    code, _, err = run(["pipeline", "--period", files("p.json", P3), "--setup", files("s.json", bad)], capsys)
    assert code == 1
    assert "[brauer]" in err


def test_cli_missing_argument_exit_code(capsys):
    with pytest.raises(SystemExit) as info:
        main(["neat"])
    assert info.value.code == 1


def test_cli_guard_exit_code(files, capsys, monkeypatch):
    monkeypatch.setenv("KS_GUARD_RANK", "3")
    elem = {"q": [1, 1, 1, 1, 1], "terms": [{"subset": [], "coeff": "1"}]}
    code, _, err = run(["clifford", "matrix", "--a", files("a.json", elem)], capsys)
    assert code == 2


def test_cli_selftest_exit_codes(files, capsys):
    code, out, _ = run(["selftest"], capsys)
    assert code == 0
    assert "FAIL" not in out
    gram = [list(r) for r in e8_gram()]
    gram[7][7] = 3
    code, out, err = run(["selftest", "--e8-fixture", files("e8.json", {"gram": gram})], capsys)
    assert code == 3
    assert "FAIL e8_fixture" in out and "e8_fixture" in err


@pytest.mark.parametrize("argv,key,value", [
    (["neat", "--n", "2"], "prime", 5),
    (["fujino", "--dim", "2", "--c", "4,4"], "separates", False),
    (["fujino", "--dim", "1", "--c", "2"], "separates", True),
    (["ks", "dims", "--n", "21"], "complex_dimension", 524288),
])
def test_cli_small_commands(argv, key, value, capsys):
    code, out, _ = run(argv, capsys)
    assert code == 0
    assert json.loads(out)[key] == value


def test_cli_lattice_k3(capsys):
    code, out, _ = run(["lattice", "--k3", "1"], capsys)
    rep = json.loads(out)
    assert rep["H"]["signature"] == [19, 3] and rep["H"]["discriminant"] == 1
    assert rep["P"]["discriminant"] == 2


def test_cli_brauer_commands(files, capsys):
    s = files("s.json", SWAP_SETUP)
    code, out, _ = run(["brauer", "sieve", "--setup", s, "--mw", "6", "--exclude", "3"], capsys)
    rep = json.loads(out)
    assert rep["excluded"] == [2, 3] and rep["ell0"] == 3
    code, out, _ = run(["brauer", "bound", "--setup", s, "--prime", "2"], capsys)
    assert json.loads(out)["bound"] == 2
    code, out, _ = run(["brauer", "check", "--setup", s, "--prime", "2", "--n", "1"], capsys)
    assert json.loads(out)["K_order"] == 2
    code, _, _ = run(["brauer", "bound", "--setup", s], capsys)
    assert code == 1


def test_cli_ks_and_picard(files, capsys):
    p = files("p.json", P2)
    code, out, _ = run(["ks", "build", "--period", p], capsys)
    assert json.loads(out)["polarization_type"] == [2]
    code, out, _ = run(["picard", "--period", files("p3.json", P3)], capsys)
    assert json.loads(out)["generators"] == [[0, 0, 1]]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "kugasatake", "neat", "--n", "1"],
                         capture_output=True, text=True, timeout=60)
    assert res.returncode == 0
    assert json.loads(res.stdout)["prime"] == 3
    res = subprocess.run([sys.executable, "-m", "kugasatake", "--help"], capture_output=True, text=True, timeout=60)
    assert res.returncode == 0
    for cmd in ("lattice", "clifford", "ks", "picard", "brauer", "neat", "fujino", "pipeline", "selftest"):
        assert cmd in res.stdout
