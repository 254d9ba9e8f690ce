"""End-to-end tests for the command-line interface.

Everything goes through cli.main(argv) so exit codes, stdout bytes, and
stderr diagnostics are exercised exactly as a shell user would see them.
"""

import json

from qcseries import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- series golden output ----------------------------------------------------------


def test_series_proj_chart_part1_golden(capsys):
    code, out, err = run(
        capsys, "series", "proj", "--n", "1", "--max-d", "2", "--chart", "part1"
    )
    assert code == 0 and err == ""
    lines = out.splitlines()
    assert lines[0] == "qcseries series v1"
    assert "param chart=part1" in lines
    assert "row i=0 d=1 1/(alpha + h)" in lines
    assert (
        "series i=0 1 + q/(alpha + h) + q^2/(2(alpha + h)(alpha + 2*h))" in lines
    )
    # the other fixed point carries the sign-flipped denominators
    assert "series i=1 1 - q/(alpha - h) + q^2/(2(alpha - 2*h)(alpha - h))" in lines


def test_series_proj_point_target(capsys):
    code, out, _ = run(capsys, "series", "proj", "--n", "0", "--max-d", "3")
    assert code == 0
    lines = out.splitlines()
    assert "row i=0 d=2 1/(2h^2)" in lines
    assert "row i=0 d=3 1/(6h^3)" in lines
    assert "series i=0 1 + q/(h) + q^2/(2h^2) + q^3/(6h^3)" in lines


def test_series_toda_plain_rows(capsys):
    code, out, _ = run(capsys, "series", "toda", "--max", "4")
    assert code == 0
    lines = out.splitlines()
    assert "row i=0 j=0 1" in lines
    assert "row i=1 j=1 2" in lines
    assert "row i=2 j=2 3/8" in lines
    # triangle bound: i + j never exceeds the requested total
    for line in lines:
        if line.startswith("row"):
            parts = dict(p.split("=") for p in line.split()[1:3])
            assert int(parts["i"]) + int(parts["j"]) <= 4


def test_series_toda_eq_chart(capsys):
    code, out, _ = run(
        capsys, "series", "toda-eq", "--max", "1", "--chart", "part3"
    )
    assert code == 0
    lines = out.splitlines()
    assert "param chart=part3" in lines
    assert "row i=0 j=0 1" in lines
    # root variables rewritten as consecutive weight differences
    assert "row i=1 j=0 -1/((lambda_0 - lambda_1 - h)h)" in lines


def test_series_flag_a2_identity_rows(capsys):
    code, out, _ = run(capsys, "series", "flag-a2", "--max", "2")
    assert code == 0
    lines = out.splitlines()
    assert "param convention=lemma37" in lines
    assert "row w=id beta=0,0 1" in lines
    assert "row w=id beta=1,0 1/(alpha_1 + h)" in lines
    assert (
        "row w=id beta=1,1 (alpha_1 + alpha_2 + 2*h)"
        "/((alpha_2 + h)(alpha_1 + alpha_2 + h)(alpha_1 + h))" in lines
    )


def test_series_flag_a1_alternate_convention(capsys):
    code, out, _ = run(
        capsys, "series", "flag-a1", "--convention", "theorem38", "--max-d", "1"
    )
    assert code == 0
    assert "param convention=theorem38" in out.splitlines()


def test_series_flag_a1_alternate_convention_pole_is_reported(capsys):
    # the alternate denominator convention runs into a vanishing factor at
    # depth two; the CLI reports it on stderr and exits 1 instead of crashing
    code, out, err = run(
        capsys, "series", "flag-a1", "--convention", "theorem38", "--max-d", "2"
    )
    assert code == 1
    assert out == ""
    assert "pole" in err


def test_series_deterministic_bytes(capsys):
    argv = ("series", "proj", "--n", "2", "--max-d", "3")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_series_out_file(tmp_path, capsys):
    path = tmp_path / "table.txt"
    code, out, _ = run(
        capsys, "series", "toda", "--max", "2", "--out", str(path)
    )
    assert code == 0 and out == ""
    written = path.read_text(encoding="utf-8")
    _, direct, _ = run(capsys, "series", "toda", "--max", "2")
    assert written == direct


# -- q-series rendering ------------------------------------------------------------


def test_q_series_text_shapes():
    assert cli.q_series_text(["1"]) == "1"
    assert cli.q_series_text(["1", "1/(h)"]) == "1 + q/(h)"
    assert cli.q_series_text(["1", "-1/(h)", "1"]) == "1 - q/(h) + q^2"
    assert (
        cli.q_series_text(["0", "2", "-3/(h + 1)"])
        == "0 + 2*q - 3*q^2/(h + 1)"
    )


# -- verify ------------------------------------------------------------------------


def test_verify_single_check_passes(capsys):
    code, out, _ = run(capsys, "verify", "batyrev", "--max", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "qcseries verify v1"
    assert "check batyrev" in lines
    assert "status pass" in lines
    assert not any(l.startswith("failure") for l in lines)


def test_verify_all_quick(capsys):
    code, out, _ = run(capsys, "verify", "all")
    assert code == 0
    lines = out.splitlines()
    statuses = [l for l in lines if l.startswith("status ")]
    # every suite in the quick matrix must report, none may fail
    assert len(statuses) >= len(cli.VERIFY_CHECKS)
    assert all(s in ("status pass", "status skipped") for s in statuses)


def test_verify_falsify_control_fails(capsys):
    code, out, _ = run(capsys, "verify", "batyrev", "--max", "3", "--falsify")
    assert code == 1
    lines = out.splitlines()
    assert "check falsified-control" in lines
    assert "status fail" in lines
    assert "failure deliberately wrong spot value | 2 | 3" in lines
    # the genuine check still passes alongside the planted failure
    assert "status pass" in lines


def test_verify_json_mirror(capsys):
    code, out, _ = run(capsys, "verify", "lemma34", "--max", "2", "--json")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 1
    payload = json.loads(lines[0])
    assert payload["format"] == "qcseries.verify.v1"
    assert payload["reports"]
    assert all(r["status"] == "pass" for r in payload["reports"])
    assert all("wall" not in key for r in payload["reports"] for key in r)


def test_verify_json_deterministic(capsys):
    argv = ("verify", "toda-plain", "--max", "5", "--json")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


# -- usage errors ------------------------------------------------------------------


def test_unknown_check_exits_2(capsys):
    code, _, err = run(capsys, "verify", "nonsense")
    assert code == 2
    assert err != ""


def test_series_proj_dimension_out_of_range(capsys):
    code, _, err = run(capsys, "series", "proj", "--n", "5")
    assert code == 2
    assert "error:" in err


def test_series_degree_cap_enforced(capsys):
    code, _, err = run(capsys, "series", "proj", "--n", "3", "--max-d", "5")
    assert code == 2
    assert "cap" in err


def test_verify_bound_cap_enforced(capsys):
    code, _, err = run(capsys, "verify", "toda-eq", "--max", "99")
    assert code == 2
    assert "cap" in err


def test_chart_rejected_off_target(capsys):
    code, _, err = run(capsys, "series", "toda", "--max", "2", "--chart", "part3")
    assert code == 2
    assert "equivariant" in err
    code, _, err = run(capsys, "series", "proj", "--n", "0", "--chart", "part1")
    assert code == 2


def test_negative_bound_rejected(capsys):
    code, _, err = run(capsys, "verify", "batyrev", "--max", "-1")
    assert code == 2
    assert ">= 0" in err
