import numpy as np
import pandas as pd
import pytest

from cli import main
from utils.io import read_dataset, read_json, sha256_file

FAST = ["--n-e", "10", "--m", "5", "--r", "5", "--max-iter", "40"]


@pytest.fixture
def line_csv(write_csv, rng):
    x = rng.uniform(-1.0, 1.0, 30)
    return write_csv("line.csv", {"x": x, "y": 2.0 * x})


@pytest.fixture
def noisy_csv(write_csv, rng):
    X = rng.standard_normal((80, 3))
    y = 1.0 + X @ np.array([1.0, 0.0, -0.5]) + 0.5 * rng.standard_normal(80)
    return write_csv("noisy.csv", {"a": X[:, 0], "b": X[:, 1], "c": X[:, 2], "y": y})


def test_fit_recovers_exact_line(line_csv, tmp_path):
    out = tmp_path / "fit"
    code = main(["fit", "--data", str(line_csv), "--response", "y", "--scheme", "ridge", "--lam", "1e-11",
                 "--seed", "1", "--output", str(out), *FAST])
    assert code == 0
    coefs = pd.read_csv(out / "coefficients.csv")
    assert list(coefs["name"]) == ["(Intercept)", "x"]
    assert coefs.loc[1, "raw_estimate"] == pytest.approx(2.0, abs=1e-6)
    # intercept is reported on the centered predictor scale
    assert coefs.loc[0, "raw_estimate"] == pytest.approx(pd.read_csv(line_csv)["y"].mean(), abs=1e-6)
    trace = pd.read_csv(out / "trace.csv")
    assert {"t", "loss", "loss_bar", "z", "rel_change", "theta_bar[x]"} <= set(trace.columns)

    manifest = read_json(out / "manifest.json")
    assert manifest["command"] == "fit" and manifest["seed"] == 1
    assert manifest["inputs"]["data"]["sha256"] == sha256_file(line_csv)
    assert set(manifest["outputs"]) == {"coefficients.csv", "trace.csv"}
    assert manifest["settings"]["scheme"] == "ridge"


def test_drawn_seed_is_printed_and_recorded(line_csv, tmp_path, capsys):
    out = tmp_path / "fit"
    assert main(["fit", "-d", str(line_csv), "-y", "y", "-o", str(out), *FAST]) == 0
    err = capsys.readouterr().err
    assert "seed: " in err
    manifest = read_json(out / "manifest.json")
    assert manifest["argv"][-2] == "--seed" and int(manifest["argv"][-1]) == manifest["seed"]
    assert any("drew seed" in w for w in manifest["warnings"])


def test_exit_codes(write_csv, line_csv, tmp_path, capsys):
    out = ["--output", str(tmp_path / "o"), "--seed", "1"]
    assert main(["fit", "--data", str(line_csv), *out]) == 2
    assert main(["fit", "--data", str(tmp_path / "missing.csv"), "--response", "y", *out]) == 3
    assert main(["fit", "--data", str(line_csv), "--response", "y", "--family", "gamma", *out]) == 5
    text = write_csv("text.csv", {"x": ["1", "two", "3"], "y": [1.0, 2.0, 3.0]})
    assert main(["fit", "--data", str(text), "--response", "y", *out]) == 3
    assert main(["frobnicate"]) == 2
    assert main(["fit", "--dat", str(line_csv)]) == 2
    assert "Error: " in capsys.readouterr().err


def test_config_file(line_csv, tmp_path):
    config = tmp_path / "settings.yaml"
    config.write_text(f"data: {line_csv}\nresponse: y\nscheme: lasso\nlam: 0.001\nn-e: 10\nm: 5\nr: 5\n")
    out = tmp_path / "cfg"
    assert main(["fit", "--config", str(config), "--seed", "2", "--output", str(out), "--r", "7"]) == 0
    manifest = read_json(out / "manifest.json")
    assert manifest["settings"]["lam"] == 0.001
    assert manifest["settings"]["r"] == 7
    assert "config" in manifest["inputs"]

    config.write_text("response: y\nlambda_typo: 3\n")
    assert main(["fit", "--config", str(config), "--data", str(line_csv), "--output", str(out)]) == 5


def test_infer_writes_intervals(noisy_csv, tmp_path):
    out = tmp_path / "ci"
    assert main(["infer", "--data", str(noisy_csv), "--response", "y", "--scheme", "lasso", "--lam", "0.01",
                 "--seed", "4", "--output", str(out), "--alpha", "0.1", *FAST]) == 0
    table = pd.read_csv(out / "inference.csv")
    assert list(table["coef"]) == ["(Intercept)", "a", "b", "c"]
    np.testing.assert_allclose(table["upper"] - table["lower"], 2 * 1.644854 * table["se"], rtol=1e-6)
    assert read_json(out / "inference.json")["alpha"] == 0.1


def test_infer_replays_fit_manifest(noisy_csv, tmp_path):
    first = tmp_path / "fit"
    assert main(["fit", "--data", str(noisy_csv), "--response", "y", "--seed", "6",
                 "--output", str(first), *FAST]) == 0
    out = tmp_path / "ci"
    assert main(["infer", "--fit-manifest", str(first / "manifest.json"), "--output", str(out)]) == 0
    assert sha256_file(out / "coefficients.csv") == sha256_file(first / "coefficients.csv")


def test_tune_writes_scores_and_refit(noisy_csv, tmp_path, capsys):
    out = tmp_path / "tune"
    assert main(["tune", "--data", str(noisy_csv), "--response", "y", "--scheme", "lasso",
                 "--lambda-ne", "0.1,10", "--folds", "3", "--seed", "5", "--output", str(out), *FAST]) == 0
    scores = pd.read_csv(out / "tuning_scores.csv")
    assert len(scores) == 2 and scores["score"].notna().all()
    best = read_json(out / "best.json")
    assert best["best_config"]["n_e"] == 10
    assert (out / "coefficients.csv").exists()
    assert "best: candidate" in capsys.readouterr().out

    assert main(["tune", "--data", str(noisy_csv), "--response", "y", "--output", str(out), "--seed", "5"]) == 2


def test_simulate_export_only(tmp_path):
    out = tmp_path / "sim"
    assert main(["simulate", "--beta", "1,0,-1", "--n", "40", "--replicates", "3", "--export-data", "2",
                 "--generate-only", "--seed", "8", "--output", str(out)]) == 0
    assert (out / "replicate_0000.csv").exists() and (out / "replicate_0001.csv").exists()
    assert not (out / "replicate_0002.csv").exists()
    assert not (out / "bench_records.csv").exists()
    data = read_dataset(out / "replicate_0000.csv", "y")
    assert data.n == 40 and data.column_names == ("x1", "x2", "x3")
    assert read_json(out / "design.json")["design"]["beta_true"] == [1.0, 0.0, -1.0]


def test_simulate_is_deterministic(tmp_path):
    args = ["simulate", "--beta", "1,-1", "--n", "50", "--replicates", "2", "--scheme", "lasso",
            "--lam", "0.01", "--seed", "12", *FAST]
    assert main([*args, "--output", str(tmp_path / "one")]) == 0
    assert main([*args, "--output", str(tmp_path / "two")]) == 0
    for name in ("bench_records.csv", "bench_summary.json", "design.json"):
        assert sha256_file(tmp_path / "one" / name) == sha256_file(tmp_path / "two" / name)
    summary = read_json(tmp_path / "one" / "bench_summary.json")
    assert summary["preset"] == "custom" and summary["n_ok"] == 2


def test_simulate_needs_a_design(tmp_path):
    assert main(["simulate", "--n", "40", "--output", str(tmp_path), "--seed", "1"]) == 2


@pytest.mark.slow
def test_simulate_preset_smoke(tmp_path, capsys):
    out = tmp_path / "t4"
    assert main(["simulate", "--preset", "table4", "--preset-scheme", "lasso", "--replicates", "2",
                 "--folds", "2", "--max-iter", "20", "--m", "5", "--r", "5", "--n-e", "20",
                 "--seed", "3", "--output", str(out)]) == 0
    summary = read_json(out / "bench_summary.json")
    assert summary["preset"].startswith("table4-lasso")
    assert summary["config"]["m"] == 5 and summary["config"]["n_e"] == 20
    records = pd.read_csv(out / "bench_records.csv")
    assert len(records) == 2 and "tuned_lambda_ne" in records.columns
    assert "table4-lasso" in capsys.readouterr().out


def test_rerun_reproduces_outputs(noisy_csv, tmp_path, capsys):
    out = tmp_path / "fit"
    assert main(["fit", "--data", str(noisy_csv), "--response", "y", "--output", str(out), *FAST]) == 0
    capsys.readouterr()
    assert main(["rerun", str(out / "manifest.json")]) == 0
    assert "all 2 outputs identical" in capsys.readouterr().out
    assert (tmp_path / "fit-rerun" / "manifest.json").exists()

    assert main(["rerun", str(tmp_path / "nope.json")]) == 3
