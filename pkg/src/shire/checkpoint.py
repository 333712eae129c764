"""Binary policy checkpoints.

Layout (documented in docs/file-formats.md):

    bytes 0..8    magic "SHIREPOL1" (ASCII, also the format version)
    bytes 9..24   four little-endian uint32: obs_dim, n_actions, hidden1, hidden2
    remainder     parameter arrays as raw little-endian float64, row-major,
                  in nn.PARAM_KEYS order

Round-trips are bit-exact; any size or magic mismatch is a StorageError.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from . import nn
from .errors import StorageError

MAGIC = b"SHIREPOL1"
_HEADER = struct.Struct("<4I")


def _shapes(obs_dim: int, n_actions: int):
    h = nn.HIDDEN
    return {
        "a_w1": (obs_dim, h), "a_b1": (h,),
        "a_w2": (h, h), "a_b2": (h,),
        "a_w3": (h, n_actions), "a_b3": (n_actions,),
        "c_w1": (obs_dim, h), "c_b1": (h,),
        "c_w2": (h, h), "c_b2": (h,),
        "c_w3": (h, 1), "c_b3": (1,),
    }


def save_checkpoint(params: nn.ActorCriticParams, path) -> None:
    blob = bytearray()
    blob += MAGIC
    blob += _HEADER.pack(params.obs_dim, params.n_actions, nn.HIDDEN, nn.HIDDEN)
    for key in nn.PARAM_KEYS:
        blob += np.ascontiguousarray(params.tensors[key], dtype="<f8").tobytes()
    Path(path).write_bytes(bytes(blob))


def load_checkpoint(path) -> nn.ActorCriticParams:
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise StorageError(f"cannot read checkpoint {path}: {e}") from e
    if len(raw) < len(MAGIC) + _HEADER.size or raw[: len(MAGIC)] != MAGIC:
        raise StorageError(f"{path}: not a {MAGIC.decode()} checkpoint")
    obs_dim, n_actions, h1, h2 = _HEADER.unpack_from(raw, len(MAGIC))
    if h1 != nn.HIDDEN or h2 != nn.HIDDEN:
        raise StorageError(f"{path}: unsupported hidden sizes {h1}x{h2}")
    shapes = _shapes(obs_dim, n_actions)
    offset = len(MAGIC) + _HEADER.size
    tensors = {}
    for key in nn.PARAM_KEYS:
        shape = shapes[key]
        nbytes = int(np.prod(shape)) * 8
        if offset + nbytes > len(raw):
            raise StorageError(f"{path}: truncated checkpoint (at {key})")
        tensors[key] = (
            np.frombuffer(raw, dtype="<f8", count=int(np.prod(shape)), offset=offset)
            .astype(np.float64)
            .reshape(shape)
        )
        offset += nbytes
    if offset != len(raw):
        raise StorageError(f"{path}: {len(raw) - offset} trailing bytes")
    return nn.ActorCriticParams(obs_dim, n_actions, tensors)
