import json
import os
import subprocess
import sys

import pytest

from jk import cli
from jk.algebra import InvariantViolationError, PoleAtQZeroError
from jk.spaces import SpaceDescriptor, SpaceError

SMOKE_COMMANDS = [
    ["projective", "--n", "3", "--d", "2"],
    ["grassmannian", "--r", "2", "--n", "3", "--d", "1", "--format", "json"],
    ["grassmannian", "--r", "2", "--n", "3", "--d", "1", "--form", "structured"],
    ["flag", "--dims", "1,2", "--n", "3", "--d", "1,0"],
    ["product", "--factor", "p:2", "--factor", "p:2", "--d", "1,1",
     "--format", "json"],
    ["conjecture-c", "--n", "2", "--d", "1"],
    ["conjecture-bd", "--n", "2", "--cap", "1", "--format", "json"],
    ["chi", "--space", "gr:1,2", "--d", "1", "--order", "2"],
    ["verify", "route", "--r", "2", "--n", "3", "--d", "1", "--format",
     "json"],
    ["verify", "weyl", "--r", "2", "--n", "3"],
]


def run_cli(cmd, env_extra=None):
    env = dict(os.environ)
    env.pop("JK_THREADS", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "jk.cli"] + cmd,
                          capture_output=True, env=env)


def test_repeated_runs_are_byte_identical():
    for cmd in SMOKE_COMMANDS:
        a = run_cli(cmd)
        b = run_cli(cmd)
        assert a.returncode == 0, (cmd, a.stderr)
        assert a.returncode == b.returncode
        assert a.stdout == b.stdout, cmd


def test_hash_seed_does_not_change_output():
    cmd = ["verify", "abelian-nonabelian", "--r", "2", "--n", "3", "--d",
           "1", "--format", "json"]
    a = run_cli(cmd, {"PYTHONHASHSEED": "0"})
    b = run_cli(cmd, {"PYTHONHASHSEED": "1"})
    assert a.stdout == b.stdout


def test_thread_env_does_not_change_output():
    cmd = ["verify", "reduction", "--r", "2", "--n", "3", "--max-d", "1",
           "--format", "json"]
    a = run_cli(cmd)
    b = run_cli(cmd, {"JK_THREADS": "4"})
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout


def test_exit_codes(capsys):
    assert cli.main(["projective", "--n", "3", "--d", "0"]) == 0
    assert capsys.readouterr().out == "1\n"
    # usage errors
    assert cli.main(["grassmannian", "--r", "2", "--n", "4"]) == 2
    assert cli.main(["grassmannian", "--r", "2", "--n", "4", "--d", "1",
                     "--cap", "2"]) == 2
    assert cli.main(["grassmannian", "--r", "5", "--n", "2", "--d", "1"]) == 2
    assert cli.main(["chi", "--space", "zz:3", "--d", "0"]) == 2
    assert cli.main(["chi", "--space", "gr:2,4", "--d", "0", "--gamma",
                     "Ldual:1"]) == 2
    assert cli.main(["chi", "--space", "gr:2,4", "--d", "0", "--gamma",
                     "spin"]) == 2
    capsys.readouterr()
    # verification failure
    assert cli.main(["verify", "abelian-nonabelian", "--r", "2", "--n", "3",
                     "--d", "1", "--mode", "strict"]) == 1
    out = capsys.readouterr().out
    assert out.rstrip().endswith("verdict: fail")


def test_argparse_rejections():
    for cmd in (["bogus"], [], ["verify"], ["verify", "bogus"],
                ["flag", "--dims", "x", "--n", "3", "--d", "0,0"],
                ["projective", "--n", "3", "--d", "-1"]):
        proc = run_cli(cmd)
        assert proc.returncode == 2, cmd


def test_invariant_violation_exit_code(monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise InvariantViolationError("injected")

    monkeypatch.setattr(cli.vf, "route_check", boom)
    assert cli.main(["verify", "route", "--r", "2", "--n", "3", "--d",
                     "1"]) == 3
    assert "invariant violation" in capsys.readouterr().err

    def pole(*args, **kwargs):
        raise PoleAtQZeroError(-1)

    monkeypatch.setattr(cli, "descendant_series", pole)
    assert cli.main(["chi", "--space", "p:2", "--d", "1"]) == 3


def test_out_file(tmp_path, capsys):
    target = tmp_path / "coeff.json"
    code = cli.main(["grassmannian", "--r", "2", "--n", "3", "--d", "1",
                     "--format", "json", "--out", str(target)])
    assert code == 0
    assert capsys.readouterr().out == ""
    obj = json.loads(target.read_text())
    assert obj["space"] == {"kind": "grassmannian", "r": 2, "n": 3}
    assert obj["form"] == "invariant"


def test_chi_outputs(capsys):
    assert cli.main(["chi", "--space", "gr:1,2", "--d", "1", "--order",
                     "2"]) == 0
    assert capsys.readouterr().out == "9*q^2 + 4*q + 1\n"
    assert cli.main(["chi", "--space", "gr:2,4", "--d", "0", "--gamma",
                     "detSdual", "--format", "json"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["gamma"] == "detSdual"
    assert obj["series"]["num"] == [[0] * len(obj["series"]["vars"]) + ["6"]]


def test_series_and_report_shapes(capsys):
    assert cli.main(["projective", "--n", "2", "--cap", "1", "--format",
                     "json"]) == 0
    series = json.loads(capsys.readouterr().out)
    assert [c["degree"] for c in series["coefficients"]] == [[0], [1]]
    assert cli.main(["verify", "route", "--r", "2", "--n", "3", "--max-d",
                     "1", "--format", "json"]) == 0
    reports = json.loads(capsys.readouterr().out)
    assert isinstance(reports, list) and len(reports) == 2
    assert all(r["verdict"] == "pass" for r in reports)
    assert reports[0]["params"] == {"r": 2, "n": 3, "d": 0}


def test_parse_space_round_trip():
    for space in (SpaceDescriptor.projective(3),
                  SpaceDescriptor.grassmannian(2, 5),
                  SpaceDescriptor.flag((1, 2), 3),
                  SpaceDescriptor.lagrangian_flag(4),
                  SpaceDescriptor.bd_flag(2)):
        assert cli.parse_space(space.text()).equals(space)
    with pytest.raises(SpaceError):
        cli.parse_space("gr:2")
    with pytest.raises(SpaceError):
        cli.parse_space("q:3")
