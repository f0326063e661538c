"""Checkpoint files: little-endian binary blob + JSON sidecar manifest.

Blob layout: 8 magic bytes, then the raw bytes of each array back to
back. The sidecar (``<path>.json``) records format version, per-array
name/shape/dtype/offset and the total parameter count. Round-trips are
bit-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import CheckpointError

MAGIC = b"FGCK\x00\x01\r\n"
FORMAT_VERSION = 1

_DTYPES = {"f32": "<f4", "f64": "<f8"}
_DTYPE_NAMES = {np.dtype("float32"): "f32", np.dtype("float64"): "f64"}


def save_arrays(path, arrays: dict[str, np.ndarray], meta: dict | None = None):
    """Write named arrays plus a free-form meta dict."""
    path = Path(path)
    entries = []
    offset = len(MAGIC)
    blobs = []
    for name, arr in arrays.items():
        if arr.dtype not in _DTYPE_NAMES:
            raise CheckpointError(f"unsupported dtype {arr.dtype} for '{name}'")
        raw = np.ascontiguousarray(arr).astype(arr.dtype.newbyteorder("<")).tobytes()
        entries.append({
            "name": name,
            "shape": list(arr.shape),
            "dtype": _DTYPE_NAMES[arr.dtype],
            "offset": offset,
            "nbytes": len(raw),
        })
        blobs.append(raw)
        offset += len(raw)
    manifest = {
        "format_version": FORMAT_VERSION,
        "param_count": int(sum(int(np.prod(e["shape"])) for e in entries)),
        "arrays": entries,
        "meta": meta or {},
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(MAGIC)
        for raw in blobs:
            f.write(raw)
    with open(str(path) + ".json", "w") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)
        f.write("\n")


def load_arrays(path) -> tuple[dict[str, np.ndarray], dict]:
    """Read back (arrays, meta). Raises CheckpointError on corruption."""
    path = Path(path)
    sidecar = Path(str(path) + ".json")
    if not path.exists() or not sidecar.exists():
        raise CheckpointError(f"checkpoint missing: {path}")
    try:
        manifest = json.loads(sidecar.read_text())
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"corrupt manifest {sidecar}: {exc}") from exc
    if manifest.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(
            f"format version {manifest.get('format_version')} != {FORMAT_VERSION}"
        )
    blob = path.read_bytes()
    if blob[: len(MAGIC)] != MAGIC:
        raise CheckpointError(f"bad magic bytes in {path}")
    arrays = {}
    count = 0
    for e in manifest["arrays"]:
        lo, hi = e["offset"], e["offset"] + e["nbytes"]
        if hi > len(blob):
            raise CheckpointError(f"truncated blob: '{e['name']}' ends at {hi}, "
                                  f"file has {len(blob)} bytes")
        np_dtype = {"f32": np.float32, "f64": np.float64}[e["dtype"]]
        arr = np.frombuffer(blob[lo:hi], dtype=_DTYPES[e["dtype"]]).reshape(e["shape"])
        arrays[e["name"]] = arr.astype(np_dtype)  # copy into native byte order
        count += arr.size
    if count != manifest["param_count"]:
        raise CheckpointError("manifest param_count does not match arrays")
    return arrays, manifest.get("meta", {})


def save_module(path, module, meta: dict | None = None):
    """Save a Module's named parameter values."""
    arrays = {name: p.value for name, p in module.named_parameters().items()}
    save_arrays(path, arrays, meta)


def load_into_module(path, module) -> dict:
    """Load parameter values into an already-built Module; returns meta."""
    arrays, meta = load_arrays(path)
    named = module.named_parameters()
    missing = set(named) - set(arrays)
    extra = set(arrays) - set(named)
    if missing or extra:
        raise CheckpointError(f"parameter name mismatch: missing={sorted(missing)} "
                              f"extra={sorted(extra)}")
    for name, p in named.items():
        arr = arrays[name]
        if tuple(arr.shape) != tuple(p.value.shape):
            raise CheckpointError(f"shape mismatch for '{name}': "
                                  f"{arr.shape} vs {p.value.shape}")
        p.value[...] = arr.astype(p.value.dtype)
    return meta
