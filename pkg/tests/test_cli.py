import csv
import json

import numpy as np
import pytest

from hhomlp.cli import main, manifest_digest
from hhomlp.data import Dataset, NormStats, load_dataset, save_dataset
from hhomlp.featsel import load_mask
from hhomlp.mlp import MlpTopology
from hhomlp.synthetic import make_kdd_like, make_one_informative, write_csv
from hhomlp.train import TrainedModel, load_model, save_model


@pytest.fixture(scope="module")
def kdd_cache(tmp_path_factory):
    root = tmp_path_factory.mktemp("kdd")
    write_csv(make_kdd_like(1000, seed=0), root / "kdd.csv")
    assert main(["prepare", str(root / "kdd.csv"), "--builtin-schema", "kdd", "--out", str(root / "cache")]) == 0
    return root


def run(*argv):
    return main([str(a) for a in argv])


def test_prepare_split_sizes(kdd_cache):
    assert load_dataset(kdd_cache / "cache" / "train.json").n_rows == 800
    assert load_dataset(kdd_cache / "cache" / "test.json").n_rows == 200
    manifest = json.loads((kdd_cache / "cache" / "prepare.manifest.json").read_text())
    assert manifest["rows"] == {"train": 800, "test": 200}
    assert manifest["config"]["seed"] == 0


def test_prepare_rerun_identical_digests(kdd_cache, tmp_path):
    assert run("prepare", kdd_cache / "kdd.csv", "--builtin-schema", "kdd", "--out", tmp_path) == 0
    a = json.loads((kdd_cache / "cache" / "prepare.manifest.json").read_text())
    b = json.loads((tmp_path / "prepare.manifest.json").read_text())
    assert a["outputs"] == b["outputs"]


def test_prepare_missing_schema_is_usage_error(kdd_cache, tmp_path, capsys):
    code = run("prepare", kdd_cache / "kdd.csv", "--schema", tmp_path / "none.schema", "--out", tmp_path / "o")
    assert code == 1
    assert "schema" in capsys.readouterr().err


def test_prepare_without_schema_is_usage_error(kdd_cache, tmp_path):
    assert run("prepare", kdd_cache / "kdd.csv", "--out", tmp_path) == 1


def test_prepare_bad_row_is_data_error(tmp_path, capsys):
    rows = make_kdd_like(5, seed=1)
    rows[3] = rows[3][:-2]
    write_csv(rows, tmp_path / "bad.csv")
    assert run("prepare", tmp_path / "bad.csv", "--builtin-schema", "kdd", "--out", tmp_path / "o") == 2
    assert ":4:" in capsys.readouterr().err


def test_prepare_missing_input_is_data_error(tmp_path):
    assert run("prepare", tmp_path / "none.csv", "--builtin-schema", "kdd", "--out", tmp_path / "o") == 2


def test_usage_errors_exit_1(capsys):
    assert main([]) == 1
    assert run("train", "--bogus") == 1
    assert run("nonsense") == 1


def test_config_file_precedence(kdd_cache, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"train": {"population": 4, "iterations": 3, "seed": 5}}))
    out = tmp_path / "m.json"
    assert run("train", "--config", cfg, "--data", kdd_cache / "cache", "--out", out, "--seed", 7) == 0
    manifest = json.loads((tmp_path / "m.json.manifest.json").read_text())
    assert manifest["config"]["population"] == 4
    assert manifest["config"]["iterations"] == 3
    assert manifest["config"]["seed"] == 7
    assert manifest["config"]["hidden"] == [5, 5]
    assert len(manifest["history"]) == 3


def test_config_unknown_key(kdd_cache, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"popsize": 3}))
    assert run("train", "--config", cfg, "--data", kdd_cache / "cache", "--out", tmp_path / "m.json") == 1


@pytest.fixture(scope="module")
def fs_cache(tmp_path_factory):
    root = tmp_path_factory.mktemp("fs")
    X, y = make_one_informative(200, 10, seed=0)
    schema = "".join(f"f{j}: numeric\n" for j in range(10)) + "label: label\n"
    (root / "fs.schema").write_text(schema)
    write_csv([[*map(float, row), "smurf" if lab else "normal"] for row, lab in zip(X, y)], root / "fs.csv")
    assert run("prepare", root / "fs.csv", "--schema", root / "fs.schema", "--out", root / "cache") == 0
    return root


def test_select_finds_informative_feature(fs_cache):
    out = fs_cache / "mask.csv"
    assert run("select", "--data", fs_cache / "cache", "--out", out) == 0
    mask = load_mask(out)
    assert mask[0]


def test_select_beta_zero_warns(fs_cache, tmp_path, capsys):
    assert run("select", "--data", fs_cache / "cache", "--out", tmp_path / "m.csv", "--beta-fs", 0,
               "--population", 3, "--iterations", 2) == 0
    assert "unconstrained" in capsys.readouterr().err


def test_select_output_loads_in_train(fs_cache, tmp_path):
    mask = tmp_path / "m.csv"
    assert run("select", "--data", fs_cache / "cache", "--out", mask, "--population", 3, "--iterations", 2) == 0
    assert run("train", "--data", fs_cache / "cache", "--mask", mask, "--out", tmp_path / "model.json",
               "--population", 3, "--iterations", 2) == 0
    assert load_model(tmp_path / "model.json").feature_mask.sum() == load_mask(mask).sum()


def test_train_defaults_write_history(kdd_cache, tmp_path):
    assert run("train", "--data", kdd_cache / "cache", "--out", tmp_path / "m.json") == 0
    manifest = json.loads((tmp_path / "m.json.manifest.json").read_text())
    assert (manifest["config"]["population"], manifest["config"]["iterations"]) == (10, 30)
    assert len(manifest["history"]) == 30
    assert manifest["outputs"]["m.json"] == load_model_digest(tmp_path / "m.json")


def load_model_digest(path):
    import hashlib

    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_train_twice_identical_model(kdd_cache, tmp_path):
    for name in ("a.json", "b.json"):
        assert run("train", "--data", kdd_cache / "cache", "--out", tmp_path / name, "--seed", 3,
                   "--population", 4, "--iterations", 5) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_train_topology_mismatch_before_compute(fs_cache, tmp_path, capsys, monkeypatch):
    import hhomlp.cli as cli

    def fail(*a, **k):
        raise AssertionError("training must not start")

    monkeypatch.setattr(cli, "train", fail)
    (tmp_path / "mask.csv").write_text("feature,selected\n" + "".join(f"f{j},{int(j < 2)}\n" for j in range(10)))
    code = run("train", "--data", fs_cache / "cache", "--mask", tmp_path / "mask.csv",
               "--topology", "10-5-5-1", "--out", tmp_path / "m.json")
    assert code == 1
    assert "does not match" in capsys.readouterr().err
    assert not (tmp_path / "m.json").exists()


def test_train_mask_names_mismatch_is_data_error(kdd_cache, tmp_path):
    (tmp_path / "mask.csv").write_text("feature,selected\nx,1\n")
    assert run("train", "--data", kdd_cache / "cache", "--mask", tmp_path / "mask.csv",
               "--out", tmp_path / "m.json") == 2


@pytest.fixture
def oracle_setup(tmp_path):
    stats = NormStats(np.zeros(2), np.ones(2))
    y = np.array([1, 0, 1, 0, 0, 1])
    X = np.column_stack([y, np.linspace(0, 1, 6)]).astype(float)
    save_dataset(Dataset(X, y, ["a", "b"], norm_stats=stats, fitted_on="train", partition="test"),
                 tmp_path / "test.json")
    topology = MlpTopology(2, (1,), 1)
    flat = np.array([20.0, 0.0, 20.0, -10.0, -10.0])
    save_model(TrainedModel(topology, flat, ("a", "b"), None, stats), tmp_path / "oracle.json")
    return tmp_path


def test_evaluate_perfect_oracle(oracle_setup, capsys):
    code = run("evaluate", "--model", oracle_setup / "oracle.json", "--data", oracle_setup,
               "--csv", oracle_setup / "m.csv", "--json", oracle_setup / "m.json")
    assert code == 0
    assert "accuracy=1.000000" in capsys.readouterr().out
    with open(oracle_setup / "m.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["run", "accuracy", "sensitivity", "specificity", "mse", "rmse"]
    assert len(rows[1]) == 6
    assert float(rows[1][1]) == 1.0
    assert json.loads((oracle_setup / "m.json").read_text())["accuracy"] == 1.0


def test_evaluate_refuses_mismatched_digest(oracle_setup, capsys):
    model = load_model(oracle_setup / "oracle.json")
    other = TrainedModel(model.topology, model.params, model.feature_names, None,
                         NormStats(np.zeros(2), np.full(2, 2.0)))
    save_model(other, oracle_setup / "other.json")
    assert run("evaluate", "--model", oracle_setup / "other.json", "--data", oracle_setup) == 2
    assert "normalization statistics do not match" in capsys.readouterr().err


def test_bench_single_cell(kdd_cache, tmp_path):
    assert run("bench-swarm", "--data", kdd_cache / "cache", "--out", tmp_path, "--sizes", 5, "--seeds", 1,
               "--iterations", 3) == 0
    sweep = (tmp_path / "sweep.csv").read_text().strip().split("\n")
    assert len(sweep) == 2
    plot = (tmp_path / "plot.csv").read_text().strip().split("\n")
    assert plot[0] == "size,median_mse"
    for line in plot[1:]:
        size, value = line.split(",")
        int(size), float(value)


def test_bench_ordering_and_plot(kdd_cache, tmp_path):
    assert run("bench-swarm", "--data", kdd_cache / "cache", "--out", tmp_path, "--sizes", "10,5",
               "--seeds", 2, "--iterations", 3) == 0
    rows = [line.split(",") for line in (tmp_path / "sweep.csv").read_text().strip().split("\n")[1:]]
    assert [(int(r[0]), int(r[1])) for r in rows] == [(5, 0), (5, 1), (10, 0), (10, 1)]
    medians = [float(line.split(",")[1]) for line in (tmp_path / "plot.csv").read_text().strip().split("\n")[1:]]
    assert medians[0] == float(np.median([float(r[2]) for r in rows[:2]]))


def test_bench_rejects_bad_sizes(kdd_cache, tmp_path):
    assert run("bench-swarm", "--data", kdd_cache / "cache", "--out", tmp_path, "--sizes", 1) == 1


def test_manifest_digest_excludes_wall_clock(kdd_cache, tmp_path):
    for name in ("a", "b"):
        assert run("train", "--data", kdd_cache / "cache", "--out", tmp_path / "m.json", "--population", 3,
                   "--iterations", 2) == 0
        (tmp_path / f"{name}.manifest").write_text((tmp_path / "m.json.manifest.json").read_text())
    a = json.loads((tmp_path / "a.manifest").read_text())
    b = json.loads((tmp_path / "b.manifest").read_text())
    assert a["digest"] == b["digest"] == manifest_digest(a)
    a["wall_clock_seconds"] = -1
    assert manifest_digest(a) == a["digest"]


def test_synth_writes_rows(tmp_path):
    assert run("synth", "--out", tmp_path / "s.csv", "--rows", 20, "--mix", "kdd99") == 0
    assert len((tmp_path / "s.csv").read_text().strip().split("\n")) == 20
