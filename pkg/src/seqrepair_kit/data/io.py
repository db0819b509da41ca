"""Dataset files: one sequence per line, task symbols as space-separated integers."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

from ..core.exceptions import DataError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def write_sequences(path: PathLike, sequences: Sequence[Sequence[int]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = "".join(" ".join(str(int(t)) for t in seq) + "\n" for seq in sequences)
    path.write_text(text, encoding="utf-8")
    logger.debug(f"Wrote {len(sequences)} sequences to {path}")
    return path


def read_sequences(path: PathLike) -> List[List[int]]:
    """
    Read a dataset file.

    Raises:
        DataError: If the file is missing, unreadable, empty or holds a non-integer token
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise DataError(f"cannot read dataset: {e.strerror or e}", path=str(path)) from e
    sequences = []
    for number, line in enumerate(lines, start=1):
        try:
            sequences.append([int(token) for token in line.split()])
        except ValueError as e:
            raise DataError("line {n} holds a non-integer token", path=str(path), params={"n": number}) from e
    if not sequences:
        raise DataError("dataset is empty", path=str(path))
    return sequences


def read_pairs(bad_path: PathLike, good_path: PathLike) -> Tuple[List[List[int]], List[List[int]]]:
    """
    Read two line-aligned files as (broken, correct) pairs.

    Raises:
        DataError: If the line counts differ
    """
    bad = read_sequences(bad_path)
    good = read_sequences(good_path)
    if len(bad) != len(good):
        raise DataError(
            "paired files differ in length: {a} vs {b} lines",
            path=f"{bad_path}, {good_path}",
            params={"a": len(bad), "b": len(good)},
        )
    return bad, good


def write_metadata(path: PathLike, metadata: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_metadata(path: PathLike) -> Dict[str, Any]:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise DataError(f"cannot read metadata: {e}", path=str(path)) from e
