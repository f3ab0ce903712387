"""Binary model container.

Layout: the magic ``b"NNDM"``, a little-endian uint32 format version, a
uint64 header length, a UTF-8 JSON header, then the raw little-endian bytes
of every array listed in the header, in header order. Parameters come first
(declaration order), followed by Adam moments when an optimizer is saved.
Writing is deterministic, so equal models produce equal files.
"""
import json
import struct

import numpy as np

from .layers import LAYER_TYPES
from .model import Network
from .optim import Adam, AdamConfig

MAGIC = b"NNDM"
FORMAT_VERSION = 1


def _entry(name, a):
    return {"name": name, "dtype": a.dtype.newbyteorder("<").str, "shape": list(a.shape)}


def save_model(path, model, optimizer=None, extra=None):
    arrays = list(model.named_parameters())
    opt = None
    if optimizer is not None:
        opt = {"t": optimizer.t, "config": vars(optimizer.config)}
        for k, a in enumerate(optimizer.state_arrays()):
            arrays.append((f"adam.{k}", a))
    header = {
        "format_version": FORMAT_VERSION,
        "arch": model.arch,
        "meta": model.meta,
        "layers": [{"type": type(l).__name__, "config": l.config()} for l in model.layers],
        "arrays": [_entry(n, a) for n, a in arrays],
        "optimizer": opt,
        "extra": extra or {},
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC + struct.pack("<IQ", FORMAT_VERSION, len(blob)) + blob)
        for _, a in arrays:
            fh.write(np.ascontiguousarray(a, dtype=a.dtype.newbyteorder("<")).tobytes())


def load_model(path):
    """Return ``(model, optimizer_or_None, extra)``."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise ValueError(f"{path}: not a model file")
    version, hlen = struct.unpack_from("<IQ", data, 4)
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format version {version}")
    start = 4 + struct.calcsize("<IQ")
    header = json.loads(data[start:start + hlen].decode("utf-8"))
    offset = start + hlen
    arrays = {}
    for e in header["arrays"]:
        dt = np.dtype(e["dtype"])
        count = int(np.prod(e["shape"], dtype=np.int64))
        a = np.frombuffer(data, dtype=dt, count=count, offset=offset).reshape(e["shape"])
        arrays[e["name"]] = a.astype(dt.newbyteorder("="))
        offset += count * dt.itemsize

    layers = []
    for i, spec in enumerate(header["layers"]):
        layer = LAYER_TYPES[spec["type"]](**spec["config"])
        layer.params = {name: arrays[f"layers.{i}.{name}"] for name in layer.params}
        layers.append(layer)
    model = Network(layers, arch=header["arch"], meta=header["meta"])

    optimizer = None
    if header["optimizer"] is not None:
        optimizer = Adam(AdamConfig(**header["optimizer"]["config"]))
        state = [arrays[k] for k in sorted((k for k in arrays if k.startswith("adam.")),
                                           key=lambda s: int(s.split(".")[1]))]
        optimizer.load_state(header["optimizer"]["t"], state)
    return model, optimizer, header["extra"]
