"""Binary model checkpoints.

Layout: magic "CAPI" | version (u32 LE) | header length (u64 LE) |
header JSON (utf-8) | weight arrays as raw little-endian float64, in the
order listed under the header's "arrays" key.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .encoding import Alphabet
from .model import ConvLayerCfg, ConvNetModel

MAGIC = b"CAPI"
VERSION = 1


class CheckpointError(ValueError):
    pass


def save_checkpoint(model: ConvNetModel, path: str | Path) -> None:
    """Write the model atomically (temp file + rename)."""
    params = model.parameters()
    header = {
        "variant": model.variant,
        "l0": model.l0,
        "alphabet": model.alphabet.chars,
        "labels": model.labels,
        "conv": [
            [c.in_features, c.out_features, c.kernel, c.stride, c.pool]
            for c in model.conv_cfgs
        ],
        "fc": model.fc_sizes,
        "init_std": model.init_std,
        "arrays": [{"name": name, "shape": list(arr.shape)} for name, arr in params],
    }
    blob = json.dumps(header, ensure_ascii=True, sort_keys=True).encode("utf-8")
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<I", VERSION))
            fh.write(struct.pack("<Q", len(blob)))
            fh.write(blob)
            for _, arr in params:
                fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_checkpoint(path: str | Path) -> ConvNetModel:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise CheckpointError(f"bad magic {magic!r}")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != VERSION:
            raise CheckpointError(f"unsupported checkpoint version {version}")
        (hlen,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        model = ConvNetModel(
            variant=header["variant"],
            alphabet=Alphabet(header["alphabet"]),
            labels=list(header["labels"]),
            l0=header["l0"],
            conv_cfgs=[ConvLayerCfg(*row) for row in header["conv"]],
            fc_sizes=list(header["fc"]),
            init_std=header["init_std"],
        )
        params = dict(model.parameters())
        for meta in header["arrays"]:
            shape = tuple(meta["shape"])
            count = int(np.prod(shape)) if shape else 1
            raw = fh.read(count * 8)
            if len(raw) != count * 8:
                raise CheckpointError("truncated weight data")
            arr = np.frombuffer(raw, dtype="<f8").reshape(shape)
            target = params.get(meta["name"])
            if target is None or target.shape != arr.shape:
                raise CheckpointError(f"unexpected array {meta['name']}")
            target[...] = arr
    return model
