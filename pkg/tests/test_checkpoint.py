import json

import numpy as np
import pytest

from foleygen.errors import CheckpointError
from foleygen.nn import (
    GELU,
    Linear,
    Sequential,
    load_arrays,
    load_into_module,
    save_arrays,
    save_module,
)
from foleygen.rng import RngStream


def make_model(seed=5):
    r = RngStream(seed, "ckpt")
    return Sequential(Linear(4, 8, r.child("a")), GELU(), Linear(8, 2, r.child("b")))


def test_roundtrip_bit_identical(tmp_path):
    m = make_model()
    path = tmp_path / "m.ckpt"
    save_module(path, m)
    m2 = make_model(seed=6)  # different init, same shapes
    load_into_module(path, m2)
    for (n1, p1), (n2, p2) in zip(m.named_parameters().items(),
                                  m2.named_parameters().items()):
        assert n1 == n2
        assert p1.value.tobytes() == p2.value.tobytes()
    x = RngStream(7, "x").normal((3, 4))
    assert np.array_equal(m(x), m2(x))


def test_param_count_matches_layer_sum(tmp_path):
    m = make_model()
    path = tmp_path / "m.ckpt"
    save_module(path, m)
    manifest = json.loads((tmp_path / "m.ckpt.json").read_text())
    assert manifest["param_count"] == m.param_count()
    assert manifest["param_count"] == 4 * 8 + 8 + 8 * 2 + 2


def test_corrupt_magic_raises(tmp_path):
    path = tmp_path / "m.ckpt"
    save_module(path, make_model())
    blob = bytearray(path.read_bytes())
    blob[:4] = b"XXXX"
    path.write_bytes(bytes(blob))
    with pytest.raises(CheckpointError, match="magic"):
        load_arrays(path)


def test_truncated_blob_raises(tmp_path):
    path = tmp_path / "m.ckpt"
    save_module(path, make_model())
    blob = path.read_bytes()
    path.write_bytes(blob[: len(blob) // 2])
    with pytest.raises(CheckpointError, match="truncated"):
        load_arrays(path)


def test_version_mismatch_raises(tmp_path):
    path = tmp_path / "m.ckpt"
    save_module(path, make_model())
    sidecar = tmp_path / "m.ckpt.json"
    manifest = json.loads(sidecar.read_text())
    manifest["format_version"] = 999
    sidecar.write_text(json.dumps(manifest))
    with pytest.raises(CheckpointError, match="version"):
        load_arrays(path)


def test_meta_roundtrip(tmp_path):
    path = tmp_path / "a.ckpt"
    save_arrays(path, {"x": np.arange(6, dtype=np.float32).reshape(2, 3)},
                meta={"kind": "test", "dims": [2, 3]})
    arrays, meta = load_arrays(path)
    assert meta == {"kind": "test", "dims": [2, 3]}
    assert arrays["x"].shape == (2, 3)


def test_shape_mismatch_on_load(tmp_path):
    path = tmp_path / "m.ckpt"
    save_module(path, make_model())
    wrong = Sequential(Linear(4, 9, RngStream(1, "w")))
    with pytest.raises(CheckpointError):
        load_into_module(path, wrong)
