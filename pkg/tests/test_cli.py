from __future__ import annotations

import json

import pytest

from quadricops.cli import main


def _xy_spec(tmp_path, n=3):
    e = [1] + [0] * (n - 1)
    path = tmp_path / f"xy{n}.json"
    path.write_text(json.dumps({"terms": [{"prefactor": [{"coeff": 1, "x": e, "y": e}]}]}))
    return path


@pytest.mark.parametrize("sig,n", [("2,1", 3), ("2,2", 4)])
def test_apply_closed_form_to_bilinear_monomial(tmp_path, capsys, sig, n):
    code = main(["apply", "--op", "Fclosed", "--lambda", "-1", "--mu", "-1",
                 "--function", str(_xy_spec(tmp_path, n)), "--signature", sig])
    assert code == 0
    assert capsys.readouterr().out.strip() == str(n * n)


def test_print_formats(capsys):
    assert main(["print", "--op", "F", "--signature", "1,2", "--format", "latex"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("F") and "Q(\\mathbf x,\\mathbf y)^{-1}" in out
    assert main(["print", "--op", "reg", "--signature", "2,1", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data and {"coeff", "qxy_exp", "mono", "deriv"} <= set(data[0])
    assert main(["print", "--op", "explicit", "--signature", "2,1"]) == 0
    assert "(XII)" in capsys.readouterr().out


def test_usage_errors_exit_2(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["print", "--op", "nope", "--signature", "2,1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["print", "--op", "F", "--signature", "1,1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["apply", "--op", "nope", "--lambda", "0", "--mu", "0", "--function", str(_xy_spec(tmp_path)), "--signature", "2,1"])
    assert exc.value.code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["apply", "--op", "F", "--lambda", "0", "--mu", "0", "--function", str(bad), "--signature", "2,1"]) == 2


def test_verify_exit_codes(tmp_path, capsys):
    # the identity suite alone has no failing check
    rep = tmp_path / "ids.json"
    code = main(["verify", "--signature", "2,1", "--suite", "identities", "--oracle-trials", "2", "--report", str(rep)])
    out = capsys.readouterr().out
    assert code == 0
    assert "PASS-WITH-ERRATA" in out and "warning:" in out
    assert json.loads(rep.read_text())["checks"]
    # the tangential suite includes the printed closed form, which fails
    code = main(["verify", "--signature", "2,1", "--suite", "tangential", "--trials", "3"])
    out = capsys.readouterr().out
    assert code == 1
    assert "FAIL" in out


def test_verify_reports_are_byte_identical(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        main(["verify", "--signature", "2,1", "--suite", "equivalence", "--trials", "3", "--seed", "5", "--report", str(p), "--no-timing"])
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_errata_subcommand(tmp_path):
    out = tmp_path / "errata.json"
    assert main(["errata", "--signature", "2,1", "--out", str(out), "--trials", "2"]) == 0
    data = json.loads(out.read_text())
    assert {r["component"] for r in data["twelve_term_table"]} == {"II", "III", "VII", "VIII", "IX.contraction"}
    assert {r["component"] for r in data["closed_form"]} == {"xy_box_x", "yx_box_y", "Q_dx_dy"}
    assert data["independent_confirmation"]["all_trials_consistent"] is True
