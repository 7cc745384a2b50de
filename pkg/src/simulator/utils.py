"""
Utility functions for numerics, file handling and validation
Provides reusable helpers for the simulator modules
"""
import math
import os
import re
from pathlib import Path
from typing import Optional, Set

import numpy as np

from .exceptions import ConfigError


def validate_file_exists(filepath: Path) -> None:
    """
    Validate that a file exists and is readable

    Args:
        filepath: Path to the file

    Raises:
        ConfigError: If file doesn't exist or isn't readable
    """
    if not filepath.exists():
        raise ConfigError(str(filepath), "File does not exist")

    if not filepath.is_file():
        raise ConfigError(str(filepath), "Path is not a file")

    if not os.access(filepath, os.R_OK):
        raise ConfigError(str(filepath), "File is not readable")


def validate_file_extension(filepath: Path, allowed_extensions: Set[str]) -> None:
    """
    Validate that file has an allowed extension

    Args:
        filepath: Path to the file
        allowed_extensions: Set of allowed extensions (without dot)

    Raises:
        ConfigError: If extension is not allowed
    """
    extension = filepath.suffix.lstrip('.').lower()
    if extension not in allowed_extensions:
        allowed = ', '.join(f'.{ext}' for ext in sorted(allowed_extensions))
        raise ConfigError(
            str(filepath),
            f"Invalid extension '.{extension}'. Allowed: {allowed}"
        )


def sanitize_filename(filename: str, max_length: int = 255) -> str:
    """
    Sanitize a filename by removing or replacing unsafe characters

    Args:
        filename: Original filename
        max_length: Maximum allowed length

    Returns:
        Sanitized filename safe for filesystem
    """
    filename = os.path.basename(filename)
    filename = re.sub(r'[<>:"/\\|?*\s=,]', '_', filename)
    filename = re.sub(r'[\x00-\x1f\x7f]', '', filename)
    filename = re.sub(r'_{2,}', '_', filename)

    if len(filename) > max_length:
        name, ext = os.path.splitext(filename)
        filename = name[:max_length - len(ext)] + ext

    return filename.strip('_')


def ensure_directory(directory: Path) -> None:
    """
    Ensure a directory exists, create if necessary

    Args:
        directory: Path to the directory
    """
    directory.mkdir(parents=True, exist_ok=True)


def get_safe_output_path(stem: str, output_dir: Path, suffix: str = ".csv") -> Path:
    """
    Build an output path from a run label

    Args:
        stem: Run label such as 'fig5_gamma0.1'
        output_dir: Directory for output file
        suffix: File extension including the dot

    Returns:
        Safe output file path
    """
    return output_dir / f"{sanitize_filename(stem)}{suffix}"


def format_value(value: float) -> str:
    """Compact label for a parameter value: 0.1 -> '0.1', 10.0 -> '10'."""
    return f"{value:g}"


def hermitian_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """
    Eigenvalues of 3x3 Hermitian matrices

    Works on a single (3, 3) matrix or a stack (..., 3, 3). Only the lower
    triangle is read, so round-off asymmetry does not leak into the spectrum.

    Args:
        matrix: Hermitian matrix or stack of matrices

    Returns:
        Real eigenvalues in ascending order along the last axis
    """
    return np.linalg.eigvalsh(np.asarray(matrix, dtype=complex))


def first_violation(mask: np.ndarray, times: Optional[np.ndarray]) -> Optional[float]:
    """
    Time stamp of the first True entry of a violation mask

    Args:
        mask: Boolean array (or scalar) marking violations
        times: Matching time stamps, or None when unknown

    Returns:
        The offending time, or None if it cannot be attributed
    """
    flat = np.atleast_1d(mask).ravel()
    hits = np.flatnonzero(flat)
    if hits.size == 0 or times is None:
        return None
    stamps = np.atleast_1d(times).ravel()
    if stamps.size == 1:
        return float(stamps[0])
    return float(stamps[hits[0]])
