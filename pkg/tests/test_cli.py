import json
from pathlib import Path

import pytest

from blindflow.cli import EXIT_INVARIANT, EXIT_OK, EXIT_VALIDATION, main
from blindflow.workloads import read_instance, write_instance

from conftest import single_flow_example, two_coflow_example

TRACE = str(Path(__file__).parent / "data" / "shuffle_five.txt")


def instance_file(tmp_path, inst, name="inst.json"):
    path = tmp_path / name
    write_instance(inst, path)
    return str(path)


def test_generate_to_file_and_stdout(tmp_path, capsys):
    out = tmp_path / "inst.json"
    argv = ["generate", "-n", "4", "-m", "3", "--p-max", "4", "-D", "5", "-T", "2.0",
            "--seed", "7", "--output", str(out)]
    assert main(argv) == EXIT_OK
    inst = read_instance(out)
    assert len(inst.coflows) == 4

    assert main(argv[:-2]) == EXIT_OK  # same draw to stdout
    stdout = capsys.readouterr().out
    payload = json.loads(stdout)
    assert len(payload["coflows"]) == 4
    assert payload == json.loads(out.read_text())


def test_generate_uniform_weights(tmp_path):
    out = tmp_path / "w.json"
    argv = ["generate", "-n", "6", "-m", "3", "--p-max", "4", "-D", "5", "-T", "2.0",
            "--seed", "3", "--weights", "uniform:2,9", "--output", str(out)]
    assert main(argv) == EXIT_OK
    inst = read_instance(out)
    assert all(2 <= cf.weight <= 9 for cf in inst.coflows)
    assert any(cf.weight != 2.0 for cf in inst.coflows)


def test_generate_rejects_bad_weights_spec(tmp_path, capsys):
    argv = ["generate", "-n", "2", "-m", "2", "--p-max", "2", "-D", "3", "-T", "1.0",
            "--weights", "uniform:x"]
    assert main(argv) == EXIT_VALIDATION
    assert "--weights" in capsys.readouterr().err


def test_run_round_trip(tmp_path, capsys):
    path = instance_file(tmp_path, two_coflow_example())
    assert main(["run", "--instance", path, "--algorithm", "blindflow"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["weighted_total"] == pytest.approx(157.0 / 6.0, rel=1e-12)
    assert "timeline" not in payload

    assert main(["run", "--instance", path, "--algorithm", "blindflow", "--timeline"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["timeline"]) == 3


def test_run_all_algorithms(tmp_path, capsys):
    path = instance_file(tmp_path, two_coflow_example())
    for name in ("blindflow", "blindflow-max", "baseline", "augmented", "aalo-like"):
        assert main(["run", "--instance", path, "--algorithm", name]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["weighted_total"] > 0


def test_run_unknown_algorithm_exits_one(tmp_path, capsys):
    path = instance_file(tmp_path, single_flow_example())
    assert main(["run", "--instance", path, "--algorithm", "nope"]) == EXIT_VALIDATION
    capsys.readouterr()


def test_run_missing_file(capsys):
    assert main(["run", "--instance", "/no/such/file.json", "--algorithm", "blindflow"]) == EXIT_VALIDATION
    assert "error" in capsys.readouterr().err


def test_run_empty_instance(tmp_path, capsys):
    from blindflow.model import Instance, SwitchConfig

    path = instance_file(tmp_path, Instance(switch=SwitchConfig.uniform(2), coflows=()))
    assert main(["run", "--instance", path, "--algorithm", "blindflow"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["weighted_total"] == 0.0


def test_run_unit_weights_flag(tmp_path, capsys):
    inst = two_coflow_example()
    path = instance_file(tmp_path, inst)
    assert main(["run", "--instance", path, "--algorithm", "blindflow", "--unit-weights"]) == EXIT_OK
    flattened = json.loads(capsys.readouterr().out)
    # with unit weights the objective is the plain sum of completion times
    assert flattened["weighted_total"] == pytest.approx(
        sum(flattened["coflow_completion"].values()), rel=1e-12
    )


def test_certify_outputs_report(tmp_path, capsys):
    path = instance_file(tmp_path, two_coflow_example())
    assert main(["certify", "--instance", path]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert set(payload) == {"objective", "j_aug", "feasible", "worst_slack_14", "worst_slack_15", "violations"}
    assert payload["feasible"] is True
    assert payload["violations"] == []
    assert payload["objective"] == pytest.approx(payload["j_aug"] / 2.0, rel=1e-12)


def test_flp_command(tmp_path, capsys):
    path = instance_file(tmp_path, single_flow_example())
    assert main(["flp", "--instance", path, "--slot", "1.0", "--horizon", "4"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["optimal_value"] == pytest.approx(1.0, abs=1e-9)
    assert payload["completion_fractions"]["1:0"] == pytest.approx(1.0, abs=1e-9)
    assert main(["flp", "--instance", path, "--slot", "1.0", "--horizon", "0"]) == EXIT_VALIDATION
    capsys.readouterr()


def test_import_command(tmp_path, capsys):
    out = tmp_path / "trace.json"
    assert main(["import", "--trace", TRACE, "--capacity-mbps", "10", "--output", str(out)]) == EXIT_OK
    inst = read_instance(out)
    assert len(inst.coflows) == 5
    assert inst.switch.input_capacities == (10.0,) * 4

    assert main(["import", "--trace", TRACE, "--capacity-mbps", "10", "--first", "3"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["coflows"]) == 3


def test_import_bad_trace(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("nope\n")
    assert main(["import", "--trace", str(bad), "--capacity-mbps", "10"]) == EXIT_VALIDATION
    assert "line 1" in capsys.readouterr().err


def test_sweep_csv_deterministic(tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    argv = ["sweep", "--axis", "p", "--values", "1,3", "-n", "3", "-m", "3", "-D", "4",
            "-T", "1.0", "--seed", "5", "--algorithms", "blindflow"]
    assert main(argv + ["--output", str(out1)]) == EXIT_OK
    assert main(argv + ["--output", str(out2)]) == EXIT_OK
    assert out1.read_bytes() == out2.read_bytes()
    header = out1.read_text().splitlines()[0]
    assert header == "axis_value,algorithm,mean_J,mean_ratio_vs_dual"


def test_sweep_json_output(capsys):
    argv = ["sweep", "--axis", "p", "--values", "2", "-n", "2", "-m", "2", "-D", "3",
            "-T", "0.5", "--json"]
    assert main(argv) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert isinstance(payload, list)
    assert {row["algorithm"] for row in payload} >= {"blindflow", "dual-bound"}


def test_sweep_plot_writes_figures(tmp_path):
    out = tmp_path / "sweep.csv"
    argv = ["sweep", "--axis", "p", "--values", "1,2", "-n", "2", "-m", "2", "-D", "3",
            "-T", "0.5", "--algorithms", "blindflow", "--plot", "--output", str(out)]
    assert main(argv) == EXIT_OK
    assert out.exists()
    assert (tmp_path / "sweep_objective.png").stat().st_size > 0
    assert (tmp_path / "sweep_ratio.png").stat().st_size > 0


def test_sweep_plot_requires_file_output(capsys):
    argv = ["sweep", "--axis", "p", "--values", "1", "-n", "2", "-m", "2", "-D", "3",
            "-T", "0.5", "--plot"]
    assert main(argv) == EXIT_VALIDATION
    assert "--plot" in capsys.readouterr().err


def test_sweep_bad_values(capsys):
    argv = ["sweep", "--axis", "p", "--values", "1,x", "-n", "2", "-m", "2", "-D", "3", "-T", "0.5"]
    assert main(argv) == EXIT_VALIDATION
    capsys.readouterr()


def test_sweep_axis_n_needs_p_max(capsys):
    argv = ["sweep", "--axis", "n", "--values", "2,3", "-n", "2", "-m", "2", "-D", "3", "-T", "0.5"]
    assert main(argv) == EXIT_VALIDATION
    assert "--p-max" in capsys.readouterr().err
    argv += ["--p-max", "2"]
    assert main(argv + ["--algorithms", "blindflow"]) == EXIT_OK


def test_usage_errors_exit_one(capsys):
    assert main([]) == EXIT_VALIDATION
    assert main(["frobnicate"]) == EXIT_VALIDATION
    assert main(["generate", "-n", "2"]) == EXIT_VALIDATION
    capsys.readouterr()


def test_output_flag_writes_files(tmp_path):
    path = instance_file(tmp_path, single_flow_example())
    out = tmp_path / "result.json"
    assert main(["run", "--instance", path, "--algorithm", "blindflow", "--output", str(out)]) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["weighted_total"] == pytest.approx(2.0)
