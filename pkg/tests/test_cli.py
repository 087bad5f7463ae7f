import io
import json

import pytest

from probhopf import fusion, groups, probgroup
from probhopf.cli import run
from probhopf.classdata import class_data, class_probgroup
from probhopf.groups import BUILTIN_GROUPS

BROKEN = """fusionring v1
rank 2
unit 1
dual 1 1
dual 2 2
N 1 1 1 1
N 1 2 2 1
N 2 1 2 1
N 2 2 1 2
"""


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_dual_table():
    code, out, _ = call("dual", "builtin:S3-charring")
    assert code == 0
    rows = [ln.split() for ln in out.splitlines()]
    assert ["f3", "1", "1", "-1/2"] in rows
    assert "dual sizes: 1 3 2" in out


def test_dual_json_lines():
    code, out, _ = call("dual", "builtin:S3-charring", "--format", "json")
    assert code == 0
    objs = [json.loads(ln) for ln in out.splitlines()]
    checks = [o for o in objs if "status" in o]
    assert checks and all(o["status"] == "pass" and "residual" in o for o in checks)
    values = {o["name"]: o["value"] for o in objs if "value" in o}
    assert values["functionals"][2] == ["1", "1", "-1/2"]


def test_classify_order_three():
    code, out, _ = call("classify", "--order", "3")
    assert code == 0
    assert "2 structures found" in out


def test_classify_order_two():
    code, out, _ = call("classify", "--order", "2", "--max-size", "50")
    assert code == 0
    assert "1 structure found" in out


def test_broken_fusion_ring(tmp_path):
    path = tmp_path / "broken.fr"
    path.write_text(BROKEN)
    code, out, _ = call("validate-fusion", str(path))
    assert code == 1
    assert "duality axiom at (2,2)" in out


def test_parse_error_exit_code(tmp_path):
    path = tmp_path / "bad.pg"
    path.write_text("probgroup v1\nelements 2\nunit 1\np 1 1 9 1\n")
    code, _, err = call("probgroup", str(path))
    assert code == 2
    assert f"{path}:4:" in err


@pytest.mark.parametrize("argv", [
    ["probgroup", "/no/such/file"],
    ["probgroup", "builtin:Z99"],
    ["probgroup", "builtin:S3-bogus"],
    ["quotient", "builtin:S3-charring", "--subgroup", "chi1,chi3"],
    ["nonsense"],
])
def test_input_errors(argv, capsys):
    code, _, _ = call(*argv)
    assert code == 2


def test_garbage_file_never_crashes(tmp_path):
    path = tmp_path / "junk"
    path.write_bytes(b"\xff\xfe\x00garbage")
    code, _, _ = call("probgroup", str(path))
    assert code == 2


@pytest.mark.parametrize("argv", [
    ["probgroup", "builtin:S3-charring"],
    ["probgroup", "builtin:A4-classes"],
    ["subgroups", "builtin:S3-charring"],
    ["quotient", "builtin:S3-charring", "--subgroup", "chi1,chi2"],
    ["group", "info", "builtin:S3"],
    ["group", "ortho", "builtin:Q8"],
    ["group", "fusion", "builtin:D4"],
    ["double", "builtin:S3"],
    ["double", "builtin:Z4", "--check", "restriction"],
    ["validate-fusion", "builtin:S4-charring"],
])
def test_commands_pass(argv):
    code, out, _ = call(*argv)
    assert code == 0, out
    assert "FAIL" not in out


def test_quotient_output():
    _, out, _ = call("quotient", "builtin:S3-charring", "--subgroup", "chi1,chi2")
    assert "p 2 2 1 1/2" in out and "p 2 2 2 1/2" in out


def test_double_size_guard():
    code, _, _ = call("double", "builtin:S4", "--max-order", "10")
    assert code == 2


def test_output_is_deterministic():
    assert call("double", "builtin:Q8") == call("double", "builtin:Q8")


@pytest.mark.parametrize("name", sorted(BUILTIN_GROUPS))
def test_builtin_round_trips(name):
    G = groups.builtin_group(name)
    assert (groups.loads(groups.dumps(G)).table == G.table).all()
    cd = class_data(G)
    F = fusion.from_group_characters(cd)
    assert fusion.equal(fusion.loads(fusion.dumps(F)), F)
    A = class_probgroup(cd)
    assert probgroup.equal(probgroup.loads(probgroup.dumps(A)), A)
