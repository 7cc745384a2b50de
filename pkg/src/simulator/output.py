"""
Serialization of trajectories, summaries and reports
CSV through pandas with 12 significant digits; JSON with sorted keys.
"""
import json
import logging
from pathlib import Path
from typing import Callable, Dict, Iterable, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .exceptions import ConfigError, EmptySeries, InvalidParameterError, OutputError
from .squeezing import SqueezingRecord
from .utils import ensure_directory, validate_file_exists

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.12g'

# CSV column -> how to read it from a column mapping keyed by record field
_EXTRACTORS: Dict[str, Callable[[Dict[str, np.ndarray]], np.ndarray]] = {
    't': lambda c: c['t'],
    'dA_re': lambda c: np.real(c['d_a']),
    'dA_im': lambda c: np.imag(c['d_a']),
    'dB_re': lambda c: np.real(c['d_b']),
    'dB_im': lambda c: np.imag(c['d_b']),
    'dC_re': lambda c: np.real(c['d_c']),
    'dC_im': lambda c: np.imag(c['d_c']),
    'bath_weight': lambda c: c['bath_weight'],
    'E_Sx': lambda c: c['e_sx'],
    'E_Sy': lambda c: c['e_sy'],
    'V_Sx': lambda c: c['v_sx'],
    'V_Sy': lambda c: c['v_sy'],
    'H_Sx': lambda c: c['h_sx'],
    'H_Sy': lambda c: c['h_sy'],
    'H_Sz': lambda c: c['h_sz'],
    'dSx': lambda c: c['std_sx'],
    'dSy': lambda c: c['std_sy'],
    'Sz_expect': lambda c: c['sz_expect'],
    'entropy_sum': lambda c: c['entropy_sum'],
    'coherence_l1': lambda c: c['coherence'],
}

CSV_COLUMNS = tuple(_EXTRACTORS)

PathLike = Union[str, Path]


def _columns_of(records) -> Dict[str, np.ndarray]:
    if hasattr(records, 'columns') and not isinstance(records, pd.DataFrame):
        return records.columns
    records = list(records)
    if not records:
        return {}
    first: SqueezingRecord = records[0]
    return {
        name: np.array([getattr(r, name) for r in records])
        for name in first.as_dict()
    }


def records_frame(records: Union[Sequence[SqueezingRecord], Iterable[SqueezingRecord]],
                  columns: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """
    Tabulate records in CSV column order

    Args:
        records: A Trajectory or any sequence of SqueezingRecord
        columns: Subset of CSV_COLUMNS; 't' is always kept first

    Raises:
        EmptySeries: If there are no records
    """
    source = _columns_of(records)
    if not source or len(source['t']) == 0:
        raise EmptySeries("record sequence")

    selected = list(CSV_COLUMNS if columns is None else columns)
    unknown = [name for name in selected if name not in _EXTRACTORS]
    if unknown:
        raise InvalidParameterError('columns', unknown, f"Known columns: {', '.join(CSV_COLUMNS)}")
    selected = ['t'] + [name for name in selected if name != 't']
    return pd.DataFrame({name: _EXTRACTORS[name](source) for name in selected}, columns=selected)


def write_csv(records, destination: PathLike, columns: Optional[Sequence[str]] = None) -> Path:
    """
    Write records as CSV, overwriting any existing file

    Raises:
        EmptySeries: If there are no records
        OutputError: If the file cannot be written
    """
    frame = records_frame(records, columns)
    path = Path(destination)
    try:
        ensure_directory(path.parent)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    except OSError as e:
        raise OutputError(str(path), e) from e
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def read_csv(source: PathLike) -> pd.DataFrame:
    """
    Parse a CSV written by write_csv

    Raises:
        OutputError: If the file is missing or unreadable
    """
    path = Path(source)
    try:
        validate_file_exists(path)
        return pd.read_csv(path)
    except (ConfigError, OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise OutputError(str(path), e) from e


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def write_json(document: dict, destination: PathLike) -> Path:
    """
    Write a summary or report as JSON (sorted keys, two-space indent)

    Raises:
        OutputError: If the file cannot be written
    """
    path = Path(destination)
    try:
        ensure_directory(path.parent)
        with open(path, 'w', encoding='utf-8', newline='\n') as handle:
            json.dump(document, handle, sort_keys=True, indent=2, default=_json_default)
            handle.write('\n')
    except OSError as e:
        raise OutputError(str(path), e) from e
    logger.info(f"Wrote {path}")
    return path
