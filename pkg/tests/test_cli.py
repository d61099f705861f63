import json

import pytest

from lichnerowicz.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_sp2(capsys):
    code, out, _ = run(capsys, "verify", "--geometry", "flat", "--dim", "3", "--suite", "sp2", "--trials", "50", "--seed", "1")
    rep = json.loads(out)
    assert code == 0 and rep["pass"]
    assert all(r["failures"] == 0 and r["trials"] == 50 for r in rep["results"])


def test_verify_hyperbolic_fig3(capsys):
    code, out, _ = run(capsys, "verify", "--geometry", "hyperbolic", "--dim", "2", "--suite", "fig3")
    rep = json.loads(out)
    assert code == 0
    assert sum(r["skipped"] for r in rep["results"]) > 0


def test_hyperbolic_lorentz_rejected(capsys):
    code, out, err = run(capsys, "verify", "--geometry", "hyperbolic", "--signature", "1,1")
    assert code == 2 and out == ""
    assert json.loads(err)["error"] == "FlagError"


def test_output_byte_identical(capsys):
    argv = ("verify", "--dim", "2", "--suite", "depth", "--trials", "3", "--seed", "4")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--dim", "2", "(u1)^2")
    comps = json.loads(out)["components"]
    assert [(c["s"], c["k"], c["phi"]) for c in comps] == [(2, 0, "1/2*u1^2 - 1/2*u2^2"), (0, 1, "1/2")]


def test_normalize(capsys):
    code, out, _ = run(capsys, "normalize", "--dim", "3", "--expr", "tr g")
    (term,) = json.loads(out)["normal_form"]
    assert term["coeff"] == {"num": "Ncal^2 + 2*Ncal - C^2 + 1", "den": "1"}


def test_apply(capsys):
    code, out, _ = run(capsys, "apply", "--dim", "3", "--expr", "N", "u1*u2")
    assert json.loads(out)["result"] == "2*u1*u2"


def test_apply_tensor_json(capsys, tmp_path):
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"dim": 3, "signature": [3, 0], "geometry": "flat",
                                "terms": [{"u": [2, 0, 0], "coeff": [{"x": [0, 0, 0], "q": "1"}]}]}))
    code, out, _ = run(capsys, "apply", "--dim", "3", "--expr", "tr", f"@{path}")
    assert json.loads(out)["result"] == "2"


def test_syntax_error_json(capsys):
    code, out, err = run(capsys, "normalize", "--dim", "3", "--expr", "inv(g)")
    assert code == 2
    assert json.loads(err)["position"] == 4


def test_singular_error_json(capsys):
    code, _, err = run(capsys, "apply", "--dim", "2", "--expr", "inv(Ncal + C - 1)", "1")
    data = json.loads(err)
    assert code == 2 and (data["s"], data["k"], data["n"]) == (0, 0, 2)


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "--geometry", "hyperbolic", "--dim", "2",
                       "--x0", "0,1", "--pi0", "1,0", "--z0", "1,0", "--steps", "200", "--sample-every", "50")
    rep = json.loads(out)
    assert len(rep["states"]) == 5
    assert max(rep["drift"].values()) < 1e-10


def test_simulate_boundary(capsys):
    code, _, err = run(capsys, "simulate", "--geometry", "hyperbolic", "--dim", "2",
                       "--x0", "0,1", "--pi0", "0,-3", "--z0", "0,0", "--dt", "0.5", "--steps", "10")
    assert code == 2 and json.loads(err)["error"] == "BoundaryCrossing"


def test_pochhammer(capsys):
    code, out, _ = run(capsys, "pochhammer", "--m", "1", "2", "--dim", "3")
    reps = json.loads(out)["reports"]
    assert [r["ratio_constant"] for r in reps] == [True, False]


def test_detour(capsys):
    code, out, _ = run(capsys, "detour", "--dim", "2", "--max-rank", "2", "--seed", "1")
    rep = json.loads(out)
    assert [r["rank"] for r in rep["ranks"]] == [0, 1, 2]


def test_bad_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "bogus"])
    assert exc.value.code == 2
    assert json.loads(capsys.readouterr().err)["error"] == "FlagError"
