import json

import pytest

from main import EXIT_CLAIM_FAILED, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from speclab import experiments
from speclab.experiments import Experiment, at_most


def write_config(tmp_path, **values):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(values), encoding="utf-8")
    return str(path)


def test_dump_bessel(capsys):
    assert main(["--dump-bessel", "0", "2"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["m,k,location", "0,1,2.40482555769577", "0,2,5.52007811028631"]


def test_missing_experiment():
    assert main([]) == EXIT_USAGE


def test_unknown_experiment_exits_through_argparse():
    with pytest.raises(SystemExit) as exc:
        main(["teleport"])
    assert exc.value.code == 2


def test_single_experiment_needs_config():
    assert main(["bessel"]) == EXIT_USAGE


def test_bad_config(tmp_path):
    assert main(["weyl", "--config", write_config(tmp_path, experiment="weyl", lambdas=[])]) == EXIT_USAGE
    assert main(["weyl", "--config", str(tmp_path / "missing.json")]) == EXIT_USAGE


def test_config_for_other_experiment(tmp_path):
    assert main(["weyl", "--config", write_config(tmp_path, experiment="bessel")]) == EXIT_USAGE


def test_all_rejects_config(tmp_path):
    assert main(["all", "--config", write_config(tmp_path, experiment="bessel")]) == EXIT_USAGE


def test_bad_thread_override(tmp_path):
    assert main(["bessel", "--config", write_config(tmp_path, experiment="bessel"), "--threads", "0"]) == EXIT_USAGE


def test_run_writes_reports(tmp_path, capsys):
    config = write_config(tmp_path, experiment="bessel")
    out = tmp_path / "reports"
    assert main(["bessel", "--config", config, "--out", str(out)]) == EXIT_OK
    assert (out / "bessel.json").exists()
    assert (out / "bessel_zeros.csv").exists()
    assert (out / "timings.json").exists()
    assert json.loads((out / "bessel.json").read_text(encoding="utf-8"))["paper_ref"]
    printed = capsys.readouterr().out.splitlines()
    assert printed and all(line.startswith("PASS bessel.") for line in printed)


def test_out_of_range_configuration(tmp_path):
    config = write_config(tmp_path, experiment="growth", families=["disk_radial"], count=5)
    assert main(["growth", "--config", config, "--out", str(tmp_path)]) == EXIT_USAGE


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="utf-8")
    config = write_config(tmp_path, experiment="bessel")
    assert main(["bessel", "--config", config, "--out", str(blocker / "sub")]) == EXIT_IO


def test_failed_claim_exit_code(tmp_path, monkeypatch, capsys):
    def failing(config, report):
        report.claims.append(at_most("impossible", 2.0, 1.0))

    monkeypatch.setitem(experiments.EXPERIMENT_REGISTRY, "bessel", Experiment(failing, "always fails", "nothing", {}))
    config = write_config(tmp_path, experiment="bessel")
    assert main(["bessel", "--config", config, "--out", str(tmp_path / "out")]) == EXIT_CLAIM_FAILED
    assert "FAIL bessel.impossible" in capsys.readouterr().out
