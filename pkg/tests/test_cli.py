import csv
import json
import math

import pytest

from src.cli.io import canonical, dumps, load_json
from src.cli.library import example_names, export_library, get_example, round_trips
from src.cli.main import EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, run
from src.cli.verify import run_suite, worker_count
from src.core.types import ContractViolation, ModelError


@pytest.fixture
def library(tmp_path):
    export_library(tmp_path)
    return tmp_path


def _run_in(monkeypatch, capsys, directory, *argv):
    monkeypatch.chdir(directory)
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestLibrary:

    @pytest.mark.parametrize("name", example_names())
    def test_round_trip(self, name):
        assert round_trips(get_example(name))

    def test_unknown_example(self):
        with pytest.raises(ContractViolation):
            get_example("quantum-supremacy")

    def test_export_writes_canonical_files(self, library):
        example = get_example("classical-interval")
        for file_name, data in example.files.items():
            text = (library / example.name / file_name).read_text(encoding="utf-8")
            assert text == dumps(data)

    def test_list_command(self, capsys):
        assert run(["library", "list"]) == EXIT_OK
        names = [e["name"] for e in json.loads(capsys.readouterr().out)["examples"]]
        assert names == example_names()

    def test_export_needs_directory(self, capsys):
        assert run(["library", "export"]) == EXIT_INPUT
        assert "directory" in capsys.readouterr().err


class TestRobustnessCommand:

    def test_point_mass(self, library, monkeypatch, capsys):
        code, out, _ = _run_in(monkeypatch, capsys, library / "classical-uniform",
                               "robustness", "--kind", "state", "--model", "model.json",
                               "--free", "free.json", "--object", "object.json")
        assert code == EXIT_OK
        assert json.loads(out)["value"] == pytest.approx(2.0, abs=1e-5)

    def test_divergent_standard_robustness(self, library, monkeypatch, capsys):
        code, out, _ = _run_in(monkeypatch, capsys, library / "classical-interval",
                               "robustness", "--kind", "standard", "--model", "model.json",
                               "--free", "divergent.json", "--object", "object.json")
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["value"] == "inf"
        assert report["details"]["divergent"] is True

    def test_output_is_reproducible(self, library, monkeypatch, capsys):
        argv = ["robustness", "--kind", "standard", "--model", "model.json",
                "--free", "free.json", "--object", "object.json"]
        _, first, _ = _run_in(monkeypatch, capsys, library / "classical-interval", *argv)
        _, second, _ = _run_in(monkeypatch, capsys, library / "classical-interval", *argv)
        assert first == second
        assert json.loads(first)["value"] == pytest.approx(1.0, abs=1e-5)

    def test_json_file_matches_stdout(self, library, monkeypatch, capsys):
        code, out, _ = _run_in(monkeypatch, capsys, library / "classical-uniform",
                               "robustness", "--kind", "state", "--model", "model.json",
                               "--free", "free.json", "--object", "object.json", "--json", "report.json")
        assert code == EXIT_OK
        assert (library / "classical-uniform" / "report.json").read_text(encoding="utf-8") == out

    def test_model_embedded_in_object(self, tmp_path, monkeypatch, capsys):
        (tmp_path / "free.json").write_text(json.dumps({"kind": "uniform", "model": {"kind": "classical", "dim": 2}}))
        (tmp_path / "object.json").write_text(json.dumps({"model": {"kind": "classical", "dim": 2},
                                                          "state": [1.0, 0.0]}))
        code, out, _ = _run_in(monkeypatch, capsys, tmp_path, "robustness", "--kind", "state",
                               "--free", "free.json", "--object", "object.json")
        assert code == EXIT_OK
        assert json.loads(out)["value"] == pytest.approx(1.0, abs=1e-5)


class TestAdvantageCommand:

    def test_point_mass_ratio(self, library, monkeypatch, capsys):
        code, out, _ = _run_in(monkeypatch, capsys, library / "classical-uniform",
                               "advantage", "--theorem", "1", "--model", "model.json",
                               "--free", "free.json", "--object", "object.json")
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["ratio"] == pytest.approx(3.0, abs=1e-5)
        assert report["certified"] is True

    def test_sweep_rows(self, library, monkeypatch, capsys):
        code, out, _ = _run_in(monkeypatch, capsys, library / "classical-uniform",
                               "advantage", "--theorem", "1", "--model", "model.json", "--free", "free.json",
                               "--object", "object.json", "--csv", "sweep.csv", "--tasks", "5")
        assert code == EXIT_OK
        assert json.loads(out)["sweep"]["respects_bound"] is True
        with open(library / "classical-uniform" / "sweep.csv", newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["index", "numerator", "denominator", "ratio"]
        assert len(rows) == 6

    def test_standard_gain(self, library, monkeypatch, capsys):
        code, out, _ = _run_in(monkeypatch, capsys, library / "classical-interval",
                               "advantage", "--theorem", "7", "--model", "model.json",
                               "--free", "free.json", "--object", "object.json")
        assert code == EXIT_OK
        assert json.loads(out)["ratio"] == pytest.approx(3.0, abs=1e-5)

    def test_no_sweep_for_standard_gain(self, library, monkeypatch, capsys):
        code, _, err = _run_in(monkeypatch, capsys, library / "classical-interval",
                               "advantage", "--theorem", "7", "--model", "model.json", "--free", "free.json",
                               "--object", "object.json", "--csv", "sweep.csv")
        assert code == EXIT_INPUT
        assert "sweep" in err


class TestConvertCommand:

    def test_majorized_target(self, library, monkeypatch, capsys):
        code, out, _ = _run_in(monkeypatch, capsys, library / "doubly-stochastic",
                               "convert", "--model", "model.json", "--ops", "ops.json",
                               "--from", "sharp.json", "--to", "flat.json")
        assert code == EXIT_OK
        assert json.loads(out)["feasible"] is True

    def test_witness_file(self, library, monkeypatch, capsys):
        directory = library / "doubly-stochastic"
        code, out, _ = _run_in(monkeypatch, capsys, directory,
                               "convert", "--model", "model.json", "--ops", "ops.json",
                               "--from", "flat.json", "--to", "sharp.json", "--witness", "witness.json")
        assert code == EXIT_NEGATIVE
        assert json.loads(out)["feasible"] is False
        witness = load_json(directory / "witness.json")
        assert witness["family"] == "unary"
        assert witness["margin"] == pytest.approx(0.3, abs=1e-4)


class TestOtherCommands:

    def test_discriminate_helstrom(self, tmp_path, monkeypatch, capsys):
        c = math.sqrt(0.5)
        ensemble = {"model": {"kind": "quantum", "dim": 2},
                    "ensemble": {"probs": [0.5, 0.5], "states": [[1.0, 0.0, 0.0, 0.0], [0.5, 0.5, c, 0.0]]}}
        (tmp_path / "ensemble.json").write_text(json.dumps(ensemble))
        code, out, _ = _run_in(monkeypatch, capsys, tmp_path, "discriminate", "--object", "ensemble.json")
        assert code == EXIT_OK
        report = json.loads(out)
        expected = 0.5 * (1.0 + 1.0 / math.sqrt(2.0))
        assert report["p_succ"] == pytest.approx(expected, abs=1e-5)
        assert report["norm_value"] == pytest.approx(expected, abs=1e-5)

    def test_accinfo(self, library, monkeypatch, capsys):
        code, out, _ = _run_in(monkeypatch, capsys, library / "trivial-effect-informativeness",
                               "accinfo", "--model", "model.json", "--measurement", "measurement.json",
                               "--free-effects", "free-effects.json")
        assert code == EXIT_OK
        assert json.loads(out)["gain"] == pytest.approx(math.log2(3.0), abs=1e-4)

    def test_norms(self, library, monkeypatch, capsys):
        code, out, _ = _run_in(monkeypatch, capsys, library / "qubit-coherence",
                               "norms", "--model", "model.json", "--object", "object.json", "--free", "free.json")
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["base_norm"] == pytest.approx(1.0, abs=1e-6)
        assert report["order_unit_norm"] == pytest.approx(1.0, abs=1e-5)
        assert "free_base_norm" in report

    def test_verify_classical(self, capsys):
        assert run(["verify", "--theorem", "1", "--suite", "classical", "--tasks", "5"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["passed"] is True
        assert report["failures"] == []

    def test_verify_missing_suite(self):
        with pytest.raises(ContractViolation):
            run_suite("5", "classical")

    @pytest.mark.slow
    def test_verify_independent_of_workers(self):
        one = run_suite("monotones", "classical", n_tasks=5, workers=1)
        two = run_suite("monotones", "classical", n_tasks=5, workers=2)
        assert dumps(one.to_json()) == dumps(two.to_json())

    def test_worker_count(self, monkeypatch):
        monkeypatch.setenv("RF_THREADS", "3")
        assert worker_count() == 3
        monkeypatch.setenv("RF_THREADS", "many")
        assert worker_count() == 1


class TestInputErrors:

    def test_malformed_json(self, library, monkeypatch, capsys):
        directory = library / "classical-uniform"
        (directory / "bad.json").write_text('{\n  "state": [1.0,, 0.0]\n}\n', encoding="utf-8")
        code, out, err = _run_in(monkeypatch, capsys, directory,
                                 "robustness", "--kind", "state", "--model", "model.json",
                                 "--free", "free.json", "--object", "bad.json")
        assert code == EXIT_INPUT
        assert out == ""
        assert "bad.json:2:" in err

    def test_missing_file(self, tmp_path, monkeypatch, capsys):
        code, _, err = _run_in(monkeypatch, capsys, tmp_path, "robustness", "--kind", "state",
                               "--free", "free.json", "--object", "nowhere.json")
        assert code == EXIT_INPUT
        assert "no such file" in err

    def test_invalid_state(self, library, monkeypatch, capsys):
        directory = library / "classical-uniform"
        (directory / "negative.json").write_text(json.dumps({"state": [1.5, -0.5, 0.0]}), encoding="utf-8")
        code, _, err = _run_in(monkeypatch, capsys, directory,
                               "robustness", "--kind", "state", "--model", "model.json",
                               "--free", "free.json", "--object", "negative.json")
        assert code == EXIT_INPUT
        assert "negative.json" in err

    @pytest.mark.parametrize("argv", [[], ["frobnicate"], ["robustness", "--kind", "state"],
                                      ["verify", "--theorem", "42"]])
    def test_bad_arguments(self, argv, capsys):
        assert run(argv) == EXIT_INPUT

    def test_help(self, capsys):
        assert run(["--help"]) == EXIT_OK
        assert "resource-forge" in capsys.readouterr().out

    def test_model_error_location(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("[1, 2", encoding="utf-8")
        with pytest.raises(ModelError) as info:
            load_json(path)
        assert str(info.value).startswith(f"{path}:1:")

    def test_canonical_numbers(self):
        assert canonical({"x": 1.0 / 3.0, "y": float("inf")}) == {"x": 0.333333333333, "y": "inf"}
