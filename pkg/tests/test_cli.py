import csv
import io
import json

import pytest

from complex_em.cli import ConfigError, RunConfig, emit, load_config, main, run


def report_of(tmp_path, *argv, name="r.json"):
    out = tmp_path / name
    code = main(["--out", str(out), *argv])
    return code, out.read_bytes()


def test_identities_seed7_pass(tmp_path):
    code, data = report_of(tmp_path, "--suite", "identities", "--seed", "7")
    rep = json.loads(data)
    assert code == 0
    assert rep["summary"]["failed"] == 0 and rep["summary"]["total"] > 0
    assert rep["config"]["seed"] == 7


def test_sanity_records_pass_on_non_solution(tmp_path):
    code, data = report_of(tmp_path, "--suite", "maxwell", "--scenario", "trig_random")
    rep = json.loads(data)
    assert code == 0
    sanity = [r for r in rep["records"] if r["expect"] == "non-solution sanity"]
    assert sanity and all(r["residual"] > r["tolerance"] * r["scale"] for r in sanity)


def test_failing_record_gives_exit_1(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[run]\nsuites = maxwell\nscenarios = trig_random\n\n[maxwell]\ntolerance.CovariantMaxwell = 1e10\n")
    code, data = report_of(tmp_path, "--config", str(cfg))
    rep = json.loads(data)
    assert code == 1
    bad = [r for r in rep["records"] if not r["passed"]]
    assert [r["tag"] for r in bad] == ["CovariantMaxwell"] and bad[0]["tolerance"] == 1e10


@pytest.mark.parametrize("text", [
    "[run]\nseed = seven\n",
    "[run]\nbogus = 1\n",
    "[nowhere]\nx = 1\n",
    "[tolerances]\nB04 = -1\n",
    "[run]\nchannel = fd8\n",
    "[run]\nsuites = nothing\n",
    "[maxwell]\nCovariantMaxwell = 1e-3\n",
    "not an ini file",
])
def test_malformed_config_gives_exit_2(tmp_path, text, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(text)
    assert main(["--config", str(cfg)]) == 2
    assert "invalid configuration" in capsys.readouterr().err


def test_bad_flags_give_exit_2(tmp_path):
    assert main(["--channel", "fd3"]) == 2
    assert main(["--config", str(tmp_path / "missing.ini")]) == 2
    assert main(["--scenario", "nope"]) == 2
    assert main(["--suite", "identities", "--out", str(tmp_path / "no" / "dir.json")]) == 2


def test_config_loading_and_flag_override(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[run]\nsuites = identities, boost\nseed = 3\nc = 2.0\nchannel = fd4\n"
                   "[tolerances]\nB04 = 1e-9\n[lagrangian]\ntolerance.ConjugateMomentum = 1e-5\n")
    kw = load_config(str(cfg))
    assert kw["suites"] == ("identities", "boost") and kw["seed"] == 3 and kw["c"] == 2.0
    assert kw["tolerances"] == {"B04": 1e-9, "lagrangian.ConjugateMomentum": 1e-5}
    code, data = report_of(tmp_path, "--config", str(cfg), "--seed", "5", "--channel", "exact",
                           "--suite", "boost")
    rep = json.loads(data)
    assert rep["config"]["seed"] == 5 and rep["config"]["channel"] == "exact"
    assert rep["config"]["suites"] == ["boost"] and code == 0


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(suites=())
    with pytest.raises(ConfigError):
        RunConfig(grid_n=1)
    with pytest.raises(ConfigError):
        RunConfig(c=0.0)
    with pytest.raises(ConfigError):
        RunConfig(tolerances={"B04": float("nan")})
    assert RunConfig(suites=("all",)).suites[0] == "identities"


def test_determinism_excluding_timestamp(tmp_path):
    argv = ("--suite", "identities", "--suite", "potentials", "--seed", "11")
    _, a = report_of(tmp_path, *argv)
    _, b = report_of(tmp_path, *argv)
    # the timestamp block is the last key of the report
    cut = a.index(b'"timestamp"')
    assert a[:cut] == b[:b.index(b'"timestamp"')]
    assert set(json.loads(a)["timestamp"]) == {"started", "wall_time_s"}


def test_csv_output(tmp_path):
    code, data = report_of(tmp_path, "--suite", "boost", "--format", "csv", name="r.csv")
    rows = list(csv.reader(io.StringIO(data.decode())))
    rep = run(RunConfig(suites=("boost",)))
    assert code == 0
    assert len(rows) == len(rep.records) + 1
    assert rows[0][:3] == ["suite", "scenario", "tag"]


def test_empty_report_is_valid_json():
    rep = run(RunConfig(suites=("boost",), scenarios=("vacuum_plane_wave",)))
    d = json.loads(emit(rep, "json"))
    assert d["records"] == [] and d["summary"] == {"total": 0, "passed": 0, "failed": 0}
    assert rep.exit_code == 0
    with pytest.raises(ValueError):
        emit(rep, "xml")


def test_pass_flag_semantics_and_summary():
    rep = run(RunConfig(suites=("maxwell",), scenarios=("vacuum_plane_wave", "trig_random")))
    for r in rep.records:
        within = r.residual <= r.tolerance * r.scale
        assert r.passed == (within if r.expect == "zero" else not within)
    s = rep.summary
    assert s["total"] == len(rep.records) and s["passed"] + s["failed"] == s["total"]
    keys = [r.key for r in rep.records]
    assert keys == sorted(keys)


def test_record_keys_are_unique():
    rep = run(RunConfig(suites=("maxwell", "balance"), scenarios=("vacuum_plane_wave", "trig_random")))
    keys = [r.key for r in rep.records]
    assert len(keys) == len(set(keys))
