import json
import subprocess
import sys
from fractions import Fraction

import pytest

from ffmoments.cli import RunConfig, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_theoretical_json(capsys):
    code, out, _ = run_cli(
        capsys, "theoretical", "--q", "2", "--spec", "coprime:k=2", "--r", "1", "--truncate", "30", "--output", "json"
    )
    assert code == 0
    doc = json.loads(out)
    assert list(doc) == ["spec", "q", "r", "T", "lo", "hi", "crude_bound"]
    lo, hi = Fraction(doc["lo"]), Fraction(doc["hi"])
    assert lo <= hi <= Fraction(doc["crude_bound"])
    assert abs(float((lo + hi) / 2) - 0.615472) < 1e-6


def test_eisenstein_degree_constraint_is_a_validation_error(capsys):
    code, out, err = run_cli(capsys, "empirical", "--q", "2", "--spec", "eisenstein:d=2:flavor=plain", "--r", "1", "--m", "1")
    assert code == 2 and out == ""
    assert "--spec" in err and "d >= 3" in err


def test_budget_exceeded(capsys):
    code, _, err = run_cli(capsys, "empirical", "--q", "2", "--spec", "coprime:k=2", "--r", "1", "--m", "40")
    assert code == 3
    assert str(2**82) in err


def test_env_budget_override(capsys, monkeypatch):
    monkeypatch.setenv("FFM_BUDGET", "10")
    code, _, err = run_cli(capsys, "empirical", "--q", "2", "--spec", "coprime:k=2", "--m", "1")
    assert code == 3 and "16" in err
    monkeypatch.setenv("FFM_BUDGET", "lots")
    code, _, err = run_cli(capsys, "empirical", "--q", "2", "--spec", "coprime:k=2", "--m", "1")
    assert code == 2 and "FFM_BUDGET" in err


@pytest.mark.parametrize(
    "argv,field",
    [
        (["theoretical", "--q", "4", "--spec", "coprime:k=2"], "--q"),
        (["theoretical", "--q", "2", "--spec", "coprime:k=1"], "--spec"),
        (["theoretical", "--q", "2", "--spec", "unimodular:n=3:m=2"], "--spec"),
        (["theoretical", "--q", "2", "--spec", "coprime:k=2", "--r", "0"], "--r"),
        (["empirical", "--q", "2", "--spec", "coprime:k=2", "--m", "-1"], "--m"),
        (["localdensity", "--q", "2", "--spec", "coprime:k=2", "--place", "x^2+1"], "--place"),
        (["jointdensity", "--q", "2", "--spec", "coprime:k=2", "--m", "1", "--places", "x", "x"], "--places"),
        (["diagnose", "--q", "2", "--spec", "coprime:k=2", "--m", "1", "--alpha", "abc"], "--alpha"),
        (["places", "--q", "2", "--max-degree", "0"], "--max-degree"),
    ],
)
def test_validation_errors_name_the_field(capsys, argv, field):
    code, out, err = run_cli(capsys, *argv)
    assert code == 2 and out == ""
    assert field in err


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["theoretical", "--spec", "coprime:k=2"])
    assert info.value.code == 2


def test_empirical_json(capsys):
    code, out, _ = run_cli(capsys, "empirical", "--q", "2", "--spec", "coprime:k=2", "--r", "1", "--m", "1")
    doc = json.loads(out)
    assert code == 0
    assert list(doc) == ["spec", "q", "r", "m", "value", "excluded", "box_size", "runtime_ms"]
    assert (doc["value"], doc["excluded"], doc["box_size"]) == ("3/8", 1, 16)


def test_empirical_csv_table(capsys):
    code, out, _ = run_cli(capsys, "empirical", "--q", "2", "--spec", "coprime:k=2", "--m", "3", "--output", "csv")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "m,empirical,theoretical_lo,theoretical_hi"
    assert [line.split(",")[1] for line in lines[1:]] == ["0/1", "3/8", "33/64", "147/256"]


def test_places_csv(capsys):
    code, out, _ = run_cli(capsys, "places", "--q", "2", "--max-degree", "2")
    assert code == 0
    assert out.splitlines() == [
        "degree,generator,count_cumulative",
        "1,1*x,1",
        "1,1+1*x,2",
        "2,1+1*x+1*x^2,3",
    ]


def test_jointdensity_and_localdensity(capsys):
    code, out, _ = run_cli(
        capsys, "jointdensity", "--q", "2", "--spec", "coprime:k=2", "--m", "5", "--places", "x", "x+1", "--no-timing"
    )
    doc = json.loads(out)
    assert code == 0 and doc["value"] == "255/4096" and doc["places"] == ["1*x", "1+1*x"]
    code, out, _ = run_cli(
        capsys, "localdensity", "--q", "2", "--spec", "eisenstein:d=3:flavor=affine", "--place", "x", "--exhaustive"
    )
    doc = json.loads(out)
    assert doc["value"] == doc["exhaustive"] == "3/32"


def test_diagnose(capsys):
    code, out, _ = run_cli(
        capsys, "diagnose", "--q", "2", "--spec", "coprime:k=2", "--m", "4", "--c-prime", "1", "--alpha", "1", "--no-timing"
    )
    assert code == 0 and json.loads(out)["max_count"] == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["places", "--q", "3", "--max-degree", "2", "--output", "json"],
        ["theoretical", "--q", "2", "--spec", "eisenstein:d=3:flavor=shifted", "--r", "2", "--truncate", "12"],
        ["empirical", "--q", "2", "--spec", "coprime:k=2", "--r", "2", "--m", "2", "--workers", "2"],
        ["jointdensity", "--q", "2", "--spec", "coprime:k=3", "--m", "1", "--places", "x", "1+1*x"],
        ["localdensity", "--q", "3", "--spec", "unimodular:n=2:m=3", "--place", "x+2", "--exhaustive"],
        ["diagnose", "--q", "2", "--spec", "coprime:k=2", "--m", "1", "--c-prime", "1/2", "--alpha", "2", "--no-timing"],
    ],
)
def test_run_config_round_trip(argv):
    cfg = RunConfig.from_argv(argv)
    assert RunConfig.from_argv(cfg.argv()) == cfg
    assert cfg.argv() == RunConfig.from_argv(cfg.argv()).argv()


def test_outputs_are_byte_identical_across_runs_and_workers(capsys):
    base = ["empirical", "--q", "2", "--spec", "unimodular:n=2:m=3", "--r", "2", "--m", "1", "--no-timing"]
    outputs = {run_cli(capsys, *base, "--workers", w)[1] for w in ("1", "2", "1")}
    assert len(outputs) == 1


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ffmoments", "theoretical", "--q", "3", "--spec", "coprime:k=2", "--truncate", "5"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["T"] == 5
