"""CSV ingestion, YAML config and group files, table/JSON writers and run manifests."""
import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import pandas as pd
import yaml

from config import VERSION
from models import Dataset
from utils.errors import ConfigError, DataError

logger = logging.getLogger(__name__)

# Header is line 1 of the file; the first data row is line 2
HEADER_LINES = 1
MAX_REPORTED_LINES = 10


def _line_list(lines: Sequence[int]) -> str:
    shown = ", ".join(str(ln) for ln in lines[:MAX_REPORTED_LINES])
    more = len(lines) - MAX_REPORTED_LINES
    return shown + (f" (+{more} more)" if more > 0 else "")


def read_table(path: str | Path) -> pd.DataFrame:
    """Read a comma-separated UTF-8 file with a header row.

    Raises:
        DataError: If the file cannot be read or parsed
    """
    path = Path(path)
    try:
        return pd.read_csv(path, sep=",", encoding="utf-8", decimal=".", skipinitialspace=True)
    except FileNotFoundError as e:
        raise DataError(f"cannot read '{path}': file not found") from e
    except pd.errors.EmptyDataError as e:
        raise DataError(f"'{path}' is empty") from e
    except (pd.errors.ParserError, UnicodeDecodeError, OSError) as e:
        raise DataError(f"cannot parse '{path}': {e}") from e


def read_dataset(
    path: str | Path,
    response: str,
    predictors: Sequence[str] | None = None,
) -> Dataset:
    """Load a CSV into a Dataset.

    Args:
        path: CSV file with a header row
        response: Name of the response column
        predictors: Predictor columns (default: every other column)

    Returns:
        Dataset with column names taken from the header

    Raises:
        DataError: Missing columns, non-numeric values, or rows with missing
                   or non-finite entries (reported by line number)
    """
    frame = read_table(path)
    if response not in frame.columns:
        raise DataError(f"response column '{response}' not in {path}. Available: {list(frame.columns)}")
    columns = list(predictors) if predictors else [c for c in frame.columns if c != response]
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise DataError(f"predictor columns {missing} not in {path}. Available: {list(frame.columns)}")
    if not columns:
        raise DataError(f"{path} has no predictor columns besides '{response}'")

    numeric = {}
    for col in [response, *columns]:
        values = pd.to_numeric(frame[col], errors="coerce")
        bad = values.isna() & frame[col].notna()
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise DataError(
                f"column '{col}' is not numeric (line {row + 1 + HEADER_LINES}: '{frame[col].iloc[row]}')"
            )
        numeric[col] = values.to_numpy(dtype=float)

    table = np.column_stack([numeric[c] for c in [response, *columns]])
    bad_rows = np.flatnonzero(~np.all(np.isfinite(table), axis=1))
    if bad_rows.size:
        lines = [int(r) + 1 + HEADER_LINES for r in bad_rows]
        raise DataError(f"{path}: missing or non-finite values at lines {_line_list(lines)}")

    logger.info(f"DATA: {path} | n={table.shape[0]} p={len(columns)} response={response}")
    return Dataset(X=table[:, 1:], y=table[:, 0], column_names=tuple(str(c) for c in columns))


def write_dataset(data: Dataset, path: str | Path, response: str = "y") -> Path:
    """Write raw (uncentered) predictors and the response as CSV."""
    frame = pd.DataFrame(data.X + data.x_means, columns=list(data.column_names))
    frame[response] = data.y
    return write_frame(frame, path)


def load_yaml(path: str | Path) -> Any:
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as fh:
            return yaml.safe_load(fh)
    except FileNotFoundError as e:
        raise DataError(f"cannot read '{path}': file not found") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"'{path}' is not valid YAML: {e}") from e


def read_config(path: str | Path) -> dict:
    """Read a YAML settings file; keys use CLI flag names with dashes or underscores."""
    content = load_yaml(path)
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise ConfigError(f"config file '{path}' must hold a mapping, got {type(content).__name__}")
    return {str(k).replace("-", "_"): v for k, v in content.items()}


def read_groups(path: str | Path, column_names: Sequence[str]) -> tuple[tuple[int, ...], ...]:
    """Read a YAML mapping group_name: [column names] into 0-based index groups.

    Columns not named in any group become singleton groups.
    """
    content = load_yaml(path)
    if not isinstance(content, dict) or not content:
        raise ConfigError(f"group file '{path}' must map group names to lists of columns")
    index = {name: j for j, name in enumerate(column_names)}
    groups, seen = [], set()
    for group_name, members in content.items():
        if isinstance(members, str) or not isinstance(members, (list, tuple)):
            raise ConfigError(f"group '{group_name}' must list column names")
        unknown = [m for m in members if m not in index]
        if unknown:
            raise DataError(f"group '{group_name}' names unknown columns {unknown}")
        groups.append(tuple(index[m] for m in members))
        seen.update(index[m] for m in members)
    leftovers = [j for j in range(len(column_names)) if j not in seen]
    if leftovers:
        logger.info(f"GROUPS: {len(leftovers)} ungrouped columns become singleton groups")
    groups.extend((j,) for j in leftovers)
    return tuple(groups)


def resolve_columns(names: Sequence[str], column_names: Sequence[str]) -> tuple[int, ...]:
    """Map column names to 0-based indices."""
    index = {name: j for j, name in enumerate(column_names)}
    unknown = [n for n in names if n not in index]
    if unknown:
        raise DataError(f"unknown columns {unknown}. Available: {list(column_names)}")
    return tuple(index[n] for n in names)


def write_frame(frame: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def _json_default(value: Any):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return None if not np.isfinite(value) else float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _finite_floats(value: Any) -> Any:
    """Replace NaN and infinities by None so the output is strict JSON."""
    if isinstance(value, float):
        return value if np.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _finite_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite_floats(v) for v in value]
    return value


def write_json(obj: Any, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        json.dump(_finite_floats(obj), fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return path


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as e:
        raise DataError(f"cannot read '{path}': file not found") from e
    except json.JSONDecodeError as e:
        raise DataError(f"'{path}' is not valid JSON: {e}") from e


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    """Everything needed to replay a command: argv, inputs with hashes, settings and seed."""

    command: str
    argv: list[str]
    settings: dict
    seed: int | None
    inputs: dict[str, dict] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    logs: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    version: str = VERSION
    started_at: str = field(default_factory=utc_now)
    finished_at: str | None = None

    def add_input(self, role: str, path: str | Path) -> None:
        self.inputs[role] = {"path": str(path), "sha256": sha256_file(path)}

    def add_output(self, path: str | Path) -> None:
        path = Path(path)
        self.outputs[path.name] = sha256_file(path)

    def to_dict(self) -> dict:
        return asdict(self)

    def write(self, path: str | Path) -> Path:
        self.finished_at = utc_now()
        return write_json(self.to_dict(), path)

    @classmethod
    def load(cls, path: str | Path) -> "RunManifest":
        content = read_json(path)
        try:
            return cls(**content)
        except TypeError as e:
            raise DataError(f"'{path}' is not a run manifest: {e}") from e
