"""
Binary parameter files.

Layout (little-endian):

    8 bytes   magic b"OODAE01\\0"
    uint32    input_h, input_w, kernel, pool, latent_dim, batch_size, n_channels
    uint32    enc_channels[n_channels]
    float64   leaky_slope, lr
    uint64    seed
    float32   every tensor in declaration order, C order
"""

import struct
from collections import OrderedDict
from pathlib import Path

import numpy as np

from ..errors import DataError
from .autoencoder import AEConfig, AEParams

MAGIC = b"OODAE01\0"
_SIZES = struct.Struct("<7I")
_TAIL = struct.Struct("<ddQ")


def save_params(params: AEParams, path: Path) -> Path:
    cfg = params.config
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(_SIZES.pack(cfg.input_h, cfg.input_w, cfg.kernel, cfg.pool, cfg.latent_dim,
                            cfg.batch_size, len(cfg.enc_channels)))
        f.write(struct.pack(f"<{len(cfg.enc_channels)}I", *cfg.enc_channels))
        f.write(_TAIL.pack(cfg.leaky_slope, cfg.lr, cfg.seed))
        for _, value in params.items():
            f.write(np.ascontiguousarray(value, dtype="<f4").tobytes())
    return path


def load_params(path: Path) -> AEParams:
    """
    Read a parameter file written by save_params.

    Raises:
        DataError: missing file, bad magic, inconsistent sizes or wrong payload length
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"parameter file not found: {path}")
    data = path.read_bytes()
    if data[:len(MAGIC)] != MAGIC:
        raise DataError(f"{path}: not an autoencoder parameter file (bad magic)")

    offset = len(MAGIC)
    try:
        h, w, kernel, pool, latent, batch_size, n_channels = _SIZES.unpack_from(data, offset)
        offset += _SIZES.size
        channels = struct.unpack_from(f"<{n_channels}I", data, offset)
        offset += 4 * n_channels
        slope, lr, seed = _TAIL.unpack_from(data, offset)
        offset += _TAIL.size
    except struct.error:
        raise DataError(f"{path}: truncated header")

    try:
        config = AEConfig(input_h=h, input_w=w, enc_channels=channels, kernel=kernel, pool=pool,
                          latent_dim=latent, leaky_slope=slope, seed=seed,
                          batch_size=batch_size, lr=lr)
    except ValueError as e:
        raise DataError(f"{path}: invalid configuration block ({e})")

    shapes = AEParams.shapes(config)
    expected = 4 * sum(int(np.prod(shape)) for shape in shapes.values())
    if len(data) - offset != expected:
        raise DataError(f"{path}: payload holds {len(data) - offset} bytes, expected {expected}")

    tensors = OrderedDict()
    for name, shape in shapes.items():
        count = int(np.prod(shape))
        raw = np.frombuffer(data, dtype="<f4", count=count, offset=offset)
        tensors[name] = raw.astype(np.float64).reshape(shape)
        offset += 4 * count

    params = AEParams(config=config, tensors=tensors)
    try:
        params.validate()
    except DataError as e:
        raise DataError(f"{path}: {e}")
    return params
