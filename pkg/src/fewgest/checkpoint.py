"""Binary checkpoint format (RNCK) shared by the relation network and the
reference classifier.

Layout: magic "RNCK" | u16 version (little-endian) | u32 header length |
UTF-8 JSON header | little-endian float32 parameter blob. The blob holds
every parameter array in param_list() order, each row-major. The header
records the architecture sizes, a digest of the training config and the
episode seed, so save -> load -> evaluate reproduces the pre-save
evaluation bit for bit.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from . import nn
from .errors import CheckpointError
from .relation import RelationNetParams

MAGIC = b"RNCK"
VERSION = 1


def _header_for(params, config_digest, episode_seed):
    if isinstance(params, RelationNetParams):
        return {
            "model": "relation",
            "input_size": params.embedding.input_size,
            "hidden_size": params.embedding.hidden_size,
            "relation_sizes": [l.out_size for l in params.relation_layers[:-1]],
            "pool": params.pool,
            "config_digest": config_digest,
            "episode_seed": episode_seed,
            "param_count": params.param_count(),
        }
    # Reference classifier (baseline.SmlParams).
    return {
        "model": "sml",
        "input_size": params.lstm.input_size,
        "hidden_size": params.lstm.hidden_size,
        "ff_size": params.dense1.out_size,
        "n_classes": params.out.out_size,
        "config_digest": config_digest,
        "episode_seed": episode_seed,
        "param_count": params.param_count(),
    }


def save_checkpoint(params, path, config_digest="", episode_seed=0):
    header = json.dumps(
        _header_for(params, config_digest, episode_seed), separators=(",", ":")
    ).encode("utf-8")
    blob = b"".join(np.ascontiguousarray(p, dtype="<f4").tobytes()
                    for p in params.param_list())
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<H", VERSION))
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(blob)


def load_checkpoint(path):
    """Read an RNCK file; returns (params, header dict)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != MAGIC:
        raise CheckpointError(f"{path}: not an RNCK checkpoint")
    (version,) = struct.unpack("<H", raw[4:6])
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported version {version}")
    (hlen,) = struct.unpack("<I", raw[6:10])
    try:
        header = json.loads(raw[10:10 + hlen].decode("utf-8"))
    except ValueError as exc:
        raise CheckpointError(f"{path}: bad header: {exc}") from None
    blob = raw[10 + hlen:]
    vec = np.frombuffer(blob, dtype="<f4")
    if vec.size != header.get("param_count"):
        raise CheckpointError(
            f"{path}: blob holds {vec.size} floats, header says "
            f"{header.get('param_count')}"
        )
    params = _build_params(header)
    shaped = nn.unpack_params(vec.astype(np.float32), params.param_list())
    for dst, src in zip(params.param_list(), shaped):
        dst[...] = src
    return params, header


def _build_params(header):
    from .baseline import init_sml
    from .relation import init_relation_net

    model = header.get("model")
    if model == "relation":
        return init_relation_net(
            input_size=header["input_size"],
            hidden_size=header["hidden_size"],
            relation_sizes=tuple(header["relation_sizes"]),
            pool=header.get("pool", "sum"),
        )
    if model == "sml":
        return init_sml(n_classes=header["n_classes"], seed=0)
    raise CheckpointError(f"unknown model kind {model!r}")
