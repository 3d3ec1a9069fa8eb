"""Binary persistence for trained policy parameters.

Layout: magic "FRSPPO1" (7 bytes), then four little-endian uint32 fields
(n_sensors, input_dim, hidden1, hidden2), then all parameters as
little-endian float64 in PARAM_ORDER, each array row-major.
"""

from __future__ import annotations

import struct

import numpy as np

from .net import MlpParams, init_params

MAGIC = b"FRSPPO1"
_HEADER = struct.Struct("<4I")


class ParamsFileError(ValueError):
    pass


def save_params(params: MlpParams, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(params.n_sensors, params.input_dim,
                              params.hidden[0], params.hidden[1]))
        fh.write(params.to_flat().astype("<f8").tobytes())


def load_params(path: str) -> MlpParams:
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise ParamsFileError(f"{path}: bad magic {magic!r}")
        n_sensors, input_dim, h1, h2 = _HEADER.unpack(fh.read(_HEADER.size))
        flat = np.frombuffer(fh.read(), dtype="<f8").astype(np.float64)
    params = init_params(n_sensors, input_dim, (h1, h2),
                         np.random.default_rng(0))
    if flat.size != params.n_params():
        raise ParamsFileError(
            f"{path}: expected {params.n_params()} parameters, found {flat.size}")
    params.set_flat(flat)
    return params
