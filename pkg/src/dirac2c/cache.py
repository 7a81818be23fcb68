"""Optional binary cache of evaluated radial stacks.

Container format (little-endian throughout):

    bytes 0..7    magic b"D2CRAD01"
    bytes 8..11   uint32 header length H
    bytes 12..12+H  UTF-8 JSON header: {"dtype": "<f8", "shape": [n_states, n_r],
                     "arrays": ["rg", "rf"], "key": {...}}
    remainder     raw C-order float64 data, rg block then rf block

Cache keys combine the physical charge, kappa, a radial-grid hash and a
basis-config hash, so stale entries can never be confused across runs.
Loads are memory-mapped; the cache is opt-in (pass cache_dir).
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path
from typing import Optional

import numpy as np

_MAGIC = b"D2CRAD01"

__all__ = ["stack_key", "save_stack", "load_stack"]


def _hash_array(arr: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(arr).tobytes()).hexdigest()[:16]


def stack_key(z_effective: float, alpha: float, kappa: int, grid: np.ndarray,
              config_repr: str) -> dict:
    return {
        "z_effective": z_effective,
        "alpha": alpha,
        "kappa": kappa,
        "grid_hash": _hash_array(grid),
        "config_hash": hashlib.sha256(config_repr.encode()).hexdigest()[:16],
    }


def _key_filename(key: dict) -> str:
    blob = json.dumps(key, sort_keys=True)
    return "radial_" + hashlib.sha256(blob.encode()).hexdigest()[:24] + ".d2c"


def save_stack(cache_dir: str | Path, key: dict, rg: np.ndarray, rf: np.ndarray) -> Path:
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    if rg.shape != rf.shape:
        raise ValueError("rg/rf stacks must share a shape")
    header = json.dumps({
        "dtype": "<f8", "shape": list(rg.shape), "arrays": ["rg", "rf"], "key": key,
    }).encode()
    path = cache_dir / _key_filename(key)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(np.ascontiguousarray(rg, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(rf, dtype="<f8").tobytes())
    tmp.replace(path)
    return path


def load_stack(cache_dir: str | Path, key: dict) -> Optional[tuple[np.ndarray, np.ndarray]]:
    path = Path(cache_dir) / _key_filename(key)
    if not path.exists():
        return None
    with open(path, "rb") as fh:
        if fh.read(8) != _MAGIC:
            return None
        (hlen,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(hlen).decode())
        offset = fh.tell()
    if header.get("key") != key:
        return None
    shape = tuple(header["shape"])
    count = int(np.prod(shape))
    rg = np.memmap(path, dtype="<f8", mode="r", offset=offset, shape=shape)
    rf = np.memmap(path, dtype="<f8", mode="r", offset=offset + 8 * count, shape=shape)
    return rg, rf
