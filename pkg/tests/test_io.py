import json

import numpy as np
import pytest

from models import Dataset
from utils.errors import ConfigError, DataError
from utils.io import (
    RunManifest,
    read_config,
    read_dataset,
    read_groups,
    resolve_columns,
    sha256_file,
    write_dataset,
    write_json,
)


def test_read_dataset_defaults_to_all_other_columns(write_csv):
    path = write_csv("d.csv", {"a": [1.0, 2.0], "y": [0.5, 1.5], "b": [3.0, 4.0]})
    data = read_dataset(path, "y")
    assert data.column_names == ("a", "b")
    np.testing.assert_array_equal(data.y, [0.5, 1.5])
    np.testing.assert_array_equal(data.X, [[1.0, 3.0], [2.0, 4.0]])

    only_b = read_dataset(path, "y", ["b"])
    assert only_b.column_names == ("b",) and only_b.p == 1


def test_non_finite_rows_are_reported_by_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,y\n1,2,3\n4,,6\n7,8,inf\n1,1,1\n")
    with pytest.raises(DataError, match="lines 3, 4$"):
        read_dataset(path, "y")


def test_non_numeric_value(tmp_path):
    path = tmp_path / "text.csv"
    path.write_text("a,y\n1,2\nfoo,3\n")
    with pytest.raises(DataError, match="column 'a' is not numeric \\(line 3: 'foo'\\)"):
        read_dataset(path, "y")


def test_missing_columns_and_files(write_csv, tmp_path):
    path = write_csv("d.csv", {"a": [1.0], "y": [2.0]})
    with pytest.raises(DataError, match="response column 'z'"):
        read_dataset(path, "z")
    with pytest.raises(DataError, match="predictor columns \\['c'\\]"):
        read_dataset(path, "y", ["c"])
    with pytest.raises(DataError, match="file not found"):
        read_dataset(tmp_path / "nope.csv", "y")


def test_write_dataset_restores_raw_scale(tmp_path):
    data = Dataset(X=[[1.0, 10.0], [3.0, 20.0]], y=[0.0, 1.0], column_names=("u", "v"))
    path = write_dataset(data.center(), tmp_path / "out.csv")
    back = read_dataset(path, "y")
    np.testing.assert_allclose(back.X, data.X)
    assert back.column_names == ("u", "v")


def test_read_config_normalises_dashes(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("n-e: 50\nscheme: scad\nmax_iter: 300\n")
    assert read_config(path) == {"n_e": 50, "scheme": "scad", "max_iter": 300}

    (tmp_path / "empty.yaml").write_text("")
    assert read_config(tmp_path / "empty.yaml") == {}
    (tmp_path / "list.yaml").write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError, match="mapping"):
        read_config(tmp_path / "list.yaml")


def test_groups_fill_singletons(tmp_path):
    path = tmp_path / "g.yaml"
    path.write_text("first: [a, c]\nsecond: [d]\n")
    assert read_groups(path, ("a", "b", "c", "d", "e")) == ((0, 2), (3,), (1,), (4,))

    path.write_text("first: [a, zz]\n")
    with pytest.raises(DataError, match="unknown columns"):
        read_groups(path, ("a", "b"))


def test_resolve_columns():
    assert resolve_columns(["c", "a"], ("a", "b", "c")) == (2, 0)
    with pytest.raises(DataError):
        resolve_columns(["q"], ("a",))


def test_write_json_is_strict(tmp_path):
    path = write_json({"b": float("nan"), "a": [np.float64(1.5), np.inf], "c": np.int64(3)}, tmp_path / "x.json")
    text = path.read_text()
    assert "NaN" not in text and "Infinity" not in text
    assert json.loads(text) == {"a": [1.5, None], "b": None, "c": 3}
    assert text.index('"a"') < text.index('"b"')


def test_manifest_roundtrip(write_csv, tmp_path):
    data_path = write_csv("d.csv", {"x": [1.0, 2.0], "y": [0.0, 1.0]})
    manifest = RunManifest(command="fit", argv=["--data", str(data_path)], settings={"lam": 0.1}, seed=7)
    manifest.add_input("data", data_path)
    manifest.add_output(data_path)
    path = manifest.write(tmp_path / "manifest.json")

    loaded = RunManifest.load(path)
    assert loaded.command == "fit" and loaded.seed == 7
    assert loaded.inputs["data"]["sha256"] == sha256_file(data_path)
    assert loaded.outputs == {"d.csv": sha256_file(data_path)}
    assert loaded.finished_at is not None

    (tmp_path / "other.json").write_text('{"foo": 1}')
    with pytest.raises(DataError, match="not a run manifest"):
        RunManifest.load(tmp_path / "other.json")
