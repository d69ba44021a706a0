"""
Series interchange: one value per CSV line plus an optional JSON sidecar, written atomically
"""
import json
import os
import tempfile
from pathlib import Path
from typing import Optional, Union
import numpy as np
import pandas as pd
from longmemory.errors import DomainError, InputFormatError
from longmemory.simulate import SeriesMeta, TimeSeries
from utils.logger import framework_logger

PathLike = Union[str, Path]

def _stage(target: Path, content: Union[str, bytes]) -> str:
    """Write content to a temporary file in target's directory and return its name"""
    target.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(content, bytes) else "w"
    handle, temp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(handle, mode, **({} if mode == "wb" else {"encoding": "utf-8"})) as f:
            f.write(content)
    except Exception:
        _discard(temp_name)
        raise
    return temp_name

def _discard(*temp_names: str):
    for name in temp_names:
        if os.path.exists(name):
            os.unlink(name)

def atomic_write(path: PathLike, content: Union[str, bytes]) -> Path:
    """Write to a temporary file next to path and rename it into place"""
    target = Path(path)
    temp_name = _stage(target, content)
    try:
        os.replace(temp_name, target)
    except Exception:
        _discard(temp_name)
        raise
    return target

def sidecar_path(path: PathLike) -> Path:
    return Path(path).with_suffix(".json")

def write_series(series: TimeSeries, path: PathLike, sidecar: bool = True) -> Path:
    """
    Write one value per line at full round-trip precision

    Args:
        series: the series to store
        path: CSV destination
        sidecar: also write the metadata next to it as <stem>.json

    Returns:
        Path of the CSV file
    """
    try:
        target = Path(path)
        text = "".join(f"{value!r}\n" for value in series.values.tolist())
        if not sidecar:
            atomic_write(target, text)
        else:
            meta = series.meta.to_dict()
            meta["N"] = len(series)
            # stage both, then rename the sidecar before the CSV
            staged = []
            try:
                staged.append(_stage(target, text))
                staged.append(_stage(sidecar_path(target), json.dumps(meta, indent=2)))
                os.replace(staged[1], sidecar_path(target))
                os.replace(staged[0], target)
            except Exception:
                _discard(*staged)
                raise
        framework_logger.info(f"Series of length {len(series)} written to {target}")
        return target
    except Exception as e:
        framework_logger.error(f"Error writing series to {path}: {str(e)}")
        raise

def read_series(path: PathLike) -> TimeSeries:
    """
    Read a single-column CSV (an optional non-numeric header line and '#' comments are skipped)

    Raises:
        InputFormatError: missing file, extra columns, non-numeric or non-finite values,
            fewer than 2 values, or an unreadable sidecar
    """
    source = Path(path)
    if not source.exists():
        raise InputFormatError(f"series file not found: {source}")
    try:
        frame = pd.read_csv(source, header=None, comment="#", skip_blank_lines=True, dtype=str)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise InputFormatError(f"cannot parse {source}: {e}") from e
    if frame.shape[1] != 1:
        raise InputFormatError(f"{source}: expected one column, found {frame.shape[1]}")

    raw = frame.iloc[:, 0].str.strip()
    values = pd.to_numeric(raw, errors="coerce")
    if len(values) and np.isnan(values.iloc[0]):
        # header line
        raw, values = raw.iloc[1:], values.iloc[1:]
    bad = values.isna()
    if bad.any():
        line = int(bad.idxmax()) + 1
        raise InputFormatError(f"{source}: non-numeric value {raw[bad].iloc[0]!r} near line {line}")

    meta = _read_sidecar(source)
    try:
        # to_numeric is not round-trip exact
        return TimeSeries(raw.to_numpy(dtype=float), meta)
    except DomainError as e:
        raise InputFormatError(f"{source}: {e}") from e

def _read_sidecar(source: Path) -> SeriesMeta:
    path = sidecar_path(source)
    if not path.exists():
        return SeriesMeta(process="file", params={"source": str(source)})
    try:
        return SeriesMeta.from_dict(json.loads(path.read_text(encoding="utf-8")))
    except (ValueError, TypeError, DomainError) as e:
        raise InputFormatError(f"malformed sidecar {path}: {e}") from e

def write_frame(frame: pd.DataFrame, path: PathLike, provenance: Optional[dict] = None, index: bool = False) -> Path:
    """CSV with leading '# key=value' provenance lines, readable back with pandas.read_csv(comment='#')"""
    header = "".join(f"# {key}={value}\n" for key, value in (provenance or {}).items())
    return atomic_write(path, header + frame.to_csv(index=index))
