import json
import subprocess
import sys
from pathlib import Path

import pytest

from hyperconf import io
from hyperconf.abstract import hyps_algebra, validate
from hyperconf.cli import main
from hyperconf.errors import InputError

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_xor(capsys):
    code, out, _ = run(capsys, "eval", "-f", "(X -> Y) & (Y -> X)", "-e", DATA / "twobits.json",
                       "-p", DATA / "uniform4.json")
    assert code == 0
    assert "value = {{01,10}, {00,11}}" in out
    assert "H = 1.000000" in out and "H0 = 1.000000" in out


def test_medvedev_countermodel_exit_zero(capsys):
    code, out, _ = run(capsys, "medvedev", "-f", "X | ~X", "--nmax", "2")
    assert code == 0 and "valid = false" in out and "countermodel_n = 2" in out


def test_entropy_heps(capsys):
    code, out, _ = run(capsys, "entropy", "-x", DATA / "triangle.json", "-p", DATA / "uniform3.json",
                       "--kind", "heps")
    assert code == 0 and out.strip() == "Heps = 0.584963"


def test_entropy_inf(capsys, tmp_path):
    hyp = tmp_path / "x.json"
    hyp.write_text(json.dumps({"labels": ["1", "2"], "maxs": [["1"]]}))
    prob = tmp_path / "p.json"
    prob.write_text(json.dumps({"labels": ["1", "2"], "pmf": [0.5, 0.5]}))
    code, out, _ = run(capsys, "entropy", "-x", hyp, "-p", prob, "--kind", "all")
    assert code == 0 and "H = inf" in out and "Hinf = 0.000000" not in out


@pytest.mark.parametrize("argv", [
    ["setting", "butterfly", DATA / "butterfly.json"],
    ["setting", "disjunctive", DATA / "butterfly.json"],
    ["setting", "sw", DATA / "butterfly.json"],
    ["setting", "tradeoff", DATA / "tradeoff.json"],
    ["setting", "index", DATA / "index.json"],
    ["jscc", "onto", DATA / "c5_onto.json"],
    ["jscc", "channel", DATA / "c5_channel.json"],
    ["jscc", "ratio", DATA / "c5_onto.json"],
    ["unconfuse", "-x", DATA / "triangle.json", "-p", DATA / "uniform3.json", "--objective", "h0"],
    ["entropy", "-x", DATA / "triangle.json", "--kind", "capacity"],
])
def test_json_output_is_deterministic(capsys, argv):
    code, first, _ = run(capsys, "--json", *argv)
    assert code == 0
    code, second, _ = run(capsys, "--json", *argv)
    assert first == second
    doc = json.loads(first)
    assert set(doc) == {"command", "inputs", "results"}


def test_json_results_round_trip(capsys):
    code, out, _ = run(capsys, "eval", "--json", "-f", "X | Y", "-e", DATA / "twobits.json")
    doc = json.loads(out)
    x = io.hyperconfusion_from_json({"labels": ["00", "01", "10", "11"], "maxs": doc["results"]["value"]})
    assert len(x.maxs) == 4


def test_input_error_exit_two(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "entropy", "-x", bad, "-p", bad)
    assert code == 2 and "invalid JSON" in err
    code, _, err = run(capsys, "eval", "-f", "X &", "-e", DATA / "twobits.json")
    assert code == 2 and "byte 3" in err
    code, _, err = run(capsys, "eval", "-f", "Q", "-e", DATA / "twobits.json")
    assert code == 2 and "unbound" in err
    code, _, _ = run(capsys, "entropy", "-x", DATA / "triangle.json", "-p", DATA / "uniform4.json")
    assert code == 2
    code, _, _ = run(capsys, "entropy", "-x", DATA / "missing.json", "-p", DATA / "uniform3.json")
    assert code == 2


def test_size_error_exit_three(capsys, tmp_path):
    labels = [str(i) for i in range(13)]
    hyp = tmp_path / "x.json"
    hyp.write_text(json.dumps({"labels": labels, "maxs": [[v] for v in labels]}))
    prob = tmp_path / "p.json"
    prob.write_text(json.dumps({"labels": labels, "pmf": [1 / 13] * 12 + [1 - 12 / 13]}))
    code, _, err = run(capsys, "unconfuse", "-x", hyp, "-p", prob)
    assert code == 3 and "size limit" in err


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["entropy"])
    assert exc.value.code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hyperconf", "medvedev", "-f", "A -> A", "--nmax", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "valid = true" in res.stdout


def test_timing_goes_to_stderr(capsys):
    code, out, err = run(capsys, "--timing", "medvedev", "-f", "A -> A", "--nmax", "1")
    assert code == 0 and "time:" in err and "time" not in out


def test_algebra_json_round_trip():
    h = hyps_algebra(2)
    doc = json.loads(json.dumps(io.algebra_to_json(h)))
    back = io.algebra_from_json(doc)
    assert back.labels == h.labels and (back.imp == h.imp).all()
    assert validate(back)


def test_environment_and_channel_round_trip():
    space, env = io.environment_from_json(io.load_json(DATA / "twobits.json"))
    again = io.environment_from_json(json.loads(json.dumps(io.environment_to_json(space, env))))
    assert again == (space, env)
    ch = io.channel_from_json(io.load_json(DATA / "c5_channel.json")["channel"])
    assert io.channel_from_json(json.loads(json.dumps(io.channel_to_json(ch)))) == ch


def test_schema_errors():
    with pytest.raises(InputError):
        io.hyperconfusion_from_json({"labels": ["a"]})
    with pytest.raises(InputError):
        io.hyperconfusion_from_json({"labels": ["a"], "maxs": [["b"]]})
    with pytest.raises(InputError):
        io.prob_from_json({"labels": ["a"], "pmf": ["x"]})
    with pytest.raises(InputError):
        io.environment_from_json({"labels": ["a"], "atoms": []})
