"""Binary checkpoint format.

Layout (all integers unsigned 32-bit little-endian)::

    b"RGAN" | version | array count
    per array: name length | UTF-8 name | rank | dims... | float32 LE data
    JSON trailer (UTF-8, sorted keys) until end of file

The trailer carries the configuration snapshot, curriculum state, epoch
counter, optimizer scalars and generator state. Arrays keep their insertion
order, so save -> load -> save reproduces the file byte for byte.
"""

from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Union

import numpy as np

from ..settings import CHECKPOINT_MAGIC, CHECKPOINT_VERSION
from .exceptions import CheckpointError, DataError

logger = logging.getLogger(__name__)

_U32 = struct.Struct("<I")


@dataclass
class Checkpoint:
    """Named float32 arrays plus a JSON-serializable metadata dict."""

    arrays: Dict[str, np.ndarray] = field(default_factory=dict)
    meta: Dict[str, Any] = field(default_factory=dict)

    def section(self, prefix: str) -> Dict[str, np.ndarray]:
        """Arrays under ``prefix/`` with the prefix stripped."""
        head = f"{prefix}/"
        return {name[len(head):]: value for name, value in self.arrays.items() if name.startswith(head)}

    def add_section(self, prefix: str, arrays: Mapping[str, np.ndarray]) -> None:
        for name, value in arrays.items():
            self.arrays[f"{prefix}/{name}"] = value


def encode_checkpoint(checkpoint: Checkpoint) -> bytes:
    parts = [CHECKPOINT_MAGIC, _U32.pack(CHECKPOINT_VERSION), _U32.pack(len(checkpoint.arrays))]
    for name, value in checkpoint.arrays.items():
        raw_name = name.encode("utf-8")
        data = np.ascontiguousarray(value, dtype="<f4")
        parts.append(_U32.pack(len(raw_name)))
        parts.append(raw_name)
        parts.append(_U32.pack(data.ndim))
        parts.extend(_U32.pack(dim) for dim in data.shape)
        parts.append(data.tobytes())
    parts.append(json.dumps(checkpoint.meta, sort_keys=True).encode("utf-8"))
    return b"".join(parts)


def decode_checkpoint(blob: bytes) -> Checkpoint:
    """
    Parse checkpoint bytes.

    Raises:
        CheckpointError: On bad magic, unknown version or truncated content
    """
    if blob[:4] != CHECKPOINT_MAGIC:
        raise CheckpointError("not a checkpoint file (bad magic bytes)")
    try:
        offset = 4
        (version,) = _U32.unpack_from(blob, offset)
        offset += 4
        if version != CHECKPOINT_VERSION:
            raise CheckpointError("unsupported checkpoint version {v}", params={"v": version})
        (count,) = _U32.unpack_from(blob, offset)
        offset += 4
        arrays: Dict[str, np.ndarray] = {}
        for _ in range(count):
            (name_len,) = _U32.unpack_from(blob, offset)
            offset += 4
            name = blob[offset : offset + name_len].decode("utf-8")
            offset += name_len
            (rank,) = _U32.unpack_from(blob, offset)
            offset += 4
            dims = struct.unpack_from(f"<{rank}I", blob, offset)
            offset += 4 * rank
            size = int(np.prod(dims)) if rank else 1
            data = np.frombuffer(blob, dtype="<f4", count=size, offset=offset)
            offset += 4 * size
            arrays[name] = data.astype(np.float32).reshape(dims)
        meta = json.loads(blob[offset:].decode("utf-8"))
    except (struct.error, ValueError, UnicodeDecodeError) as e:
        raise CheckpointError(f"corrupt checkpoint: {e}") from e
    return Checkpoint(arrays=arrays, meta=meta)


def save_checkpoint(checkpoint: Checkpoint, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_checkpoint(checkpoint))
    logger.info(f"Checkpoint written: {path} ({len(checkpoint.arrays)} arrays)")
    return path


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    """
    Read a checkpoint file.

    Raises:
        DataError: If the file cannot be read
        CheckpointError: If the content is malformed
    """
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as e:
        raise DataError(f"cannot read checkpoint: {e}", path=str(path)) from e
    return decode_checkpoint(blob)
