# tests/test_orchestrator.py

import glob
import json
import os
import sys

import pytest

# Ensure project root is on sys.path
ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(ROOT_DIR)

from rankone_lab import EXIT_FAIL, EXIT_OK, EXIT_STALL, EXIT_USAGE, main  # noqa: E402
from tools.config_tool import ConfigTool  # noqa: E402
from tools.errors import ConfigError  # noqa: E402


@pytest.fixture(autouse=True)
def _no_worker_override(monkeypatch):
    monkeypatch.delenv("RANKONE_WORKERS", raising=False)


def write_json(path, payload):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f)
    return str(path)


def family_spec(tmp_path, count=7):
    return write_json(
        tmp_path / "family.json",
        {
            "schema": "rankone-mixing-set/1",
            "kind": "interval-family",
            "entries": [
                {"a": 100 ** i, "L": (i + 2) * 100 ** i, "multiplicity": i + 1} for i in range(1, count + 1)
            ],
        },
    )


def only(pattern):
    matches = glob.glob(pattern)
    assert len(matches) == 1, matches
    return matches[0]


def read_bytes(path):
    with open(path, "rb") as f:
        return f.read()


def synth(tmp_path, out="out", stages=5):
    spec = family_spec(tmp_path)
    output = str(tmp_path / out)
    code = main(["--output", output, "synth", "--theorem", "1", "--spec", spec, "--stages", str(stages)])
    return code, output, spec


def test_synth_writes_schedule_and_audit(tmp_path):
    code, output, _ = synth(tmp_path)
    assert code == EXIT_OK
    run_dir = only(os.path.join(output, "run_synth_*"))
    for name in ("schedule.json", "audit.txt", "choices.csv", "results.json", "run_trail.jsonl"):
        assert os.path.isfile(os.path.join(run_dir, name))

    results = json.loads(read_bytes(os.path.join(run_dir, "results.json")))
    assert results["verdict"] == "PASS"
    assert results["summary"]["heights"][:4] == ["1", "102", "10204", "1030612"]
    assert "timestamp" not in read_bytes(os.path.join(run_dir, "results.json")).decode()


def test_rerun_is_byte_identical(tmp_path):
    _, output, _ = synth(tmp_path, out="first")
    _, again, _ = synth(tmp_path, out="second")
    first = only(os.path.join(output, "run_synth_*"))
    second = only(os.path.join(again, "run_synth_*"))
    assert os.path.basename(first) == os.path.basename(second)
    for name in ("schedule.json", "audit.txt", "choices.csv", "results.json"):
        assert read_bytes(os.path.join(first, name)) == read_bytes(os.path.join(second, name))


def test_synth_stall_exit_code(tmp_path):
    spec = family_spec(tmp_path, count=2)
    code = main(["--output", str(tmp_path / "out"), "synth", "--theorem", "1", "--spec", spec, "--stages", "6"])
    assert code == EXIT_STALL


def test_corr_output_does_not_depend_on_workers(tmp_path):
    _, output, _ = synth(tmp_path)
    schedule = os.path.join(only(os.path.join(output, "run_synth_*")), "schedule.json")
    lags = "1,2,101,102,103,10204,20408,30612"
    outputs = []
    for workers in ("1", "4"):
        out = str(tmp_path / f"corr{workers}")
        code = main(["--output", out, "--workers", workers, "corr", "--schedule", schedule, "--A", "1:0", "--lags", lags])
        assert code == EXIT_OK
        outputs.append(read_bytes(os.path.join(only(os.path.join(out, "run_corr_*")), "correlations.csv")))
    assert outputs[0] == outputs[1]
    lines = outputs[0].decode().splitlines()
    assert lines[0] == "lag,lo,hi,method,stage_used"
    assert lines[1].startswith("1,1/2,1/2,exact-dp,")


def test_verify_rigidity_and_mixing_verdicts(tmp_path):
    _, output, spec = synth(tmp_path)
    schedule = os.path.join(only(os.path.join(output, "run_synth_*")), "schedule.json")

    code = main(["--output", str(tmp_path / "rig"), "verify", "--kind", "rigidity", "--schedule", schedule, "--A", "1:0"])
    assert code == EXIT_OK

    code = main([
        "--output", str(tmp_path / "mix"), "verify", "--kind", "mixing", "--schedule", schedule,
        "--A", "1:0", "--mixing-spec", spec, "--sample-count", "20",
    ])
    assert code == EXIT_OK
    results = json.loads(read_bytes(os.path.join(only(str(tmp_path / "mix" / "run_verify_*")), "results.json")))
    assert results["verdict"] == "PASS"

    code = main([
        "--output", str(tmp_path / "bad"), "verify", "--kind", "mixing", "--schedule", schedule,
        "--A", "1:0", "--lags", "10204,1030612",
    ])
    assert code == EXIT_FAIL


def test_build_expands_generator_directive(tmp_path):
    family_spec(tmp_path)
    path = write_json(
        tmp_path / "generated.json",
        {"schema": "rankone-schedule/1", "h1": 1, "generator": {"theorem": "1", "spec": "family.json", "stages": 4}},
    )
    code = main(["--output", str(tmp_path / "out"), "build", "--schedule", path])
    assert code == EXIT_OK
    run_dir = only(str(tmp_path / "out" / "run_build_*"))
    expanded = json.loads(read_bytes(os.path.join(run_dir, "schedule.json")))
    assert len(expanded["stages"]) == 3
    assert os.path.isfile(os.path.join(run_dir, "stages.csv"))


def test_usage_errors_exit_one(tmp_path):
    assert main(["verify"]) == EXIT_USAGE
    _, output, _ = synth(tmp_path)
    schedule = os.path.join(only(os.path.join(output, "run_synth_*")), "schedule.json")
    code = main(["--output", str(tmp_path / "x"), "corr", "--schedule", schedule, "--A", "9:0", "--lags", "1"])
    assert code == EXIT_USAGE
    assert main(["--output", str(tmp_path / "y"), "--workers", "0", "build", "--schedule", schedule]) == EXIT_USAGE


def test_worker_override_from_environment(monkeypatch):
    monkeypatch.setenv("RANKONE_WORKERS", "3")
    assert ConfigTool().build_run_config("corr", {}).workers == 3
    monkeypatch.setenv("RANKONE_WORKERS", "many")
    with pytest.raises(ConfigError):
        ConfigTool().build_run_config("corr", {})


def test_poisson_samples_the_stage_tower_and_flags_unresolved_lags(tmp_path):
    _, output, _ = synth(tmp_path)
    schedule = os.path.join(only(os.path.join(output, "run_synth_*")), "schedule.json")
    code = main([
        "--output", str(tmp_path / "pois"), "poisson", "--schedule", schedule, "--A", "1:0",
        "--mc-lags", "102,2000000", "--samples", "4000",
    ])
    assert code == EXIT_OK
    run_dir = only(str(tmp_path / "pois" / "run_poisson_*"))
    summary = json.loads(read_bytes(os.path.join(run_dir, "results.json")))["summary"]
    assert summary["verdict"] == "INCONCLUSIVE"
    assert summary["mc_mode"] == "full"
    # h4 = 1030612 exceeds the 10^6 word cap, so stage 3 is sampled
    assert summary["mc_stage"] == 3
    assert summary["mc_unresolved"] == [2000000]
    assert summary["mc_cells"] == 49
    assert 0.9 < summary["normalization_mass"] < 1

    lines = read_bytes(os.path.join(run_dir, "poisson.csv")).decode().splitlines()
    assert lines[0] == "lag,stage,k,n,analytic_prob,mc_freq,ci_lo,ci_hi,status"
    assert lines[1].startswith("102,3,0,0,")
    assert lines[-1] == "2000000,3,,,,,,,inconclusive"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
