"""
Convolutional autoencoder in numpy.

Encoder: per stage a k×k same-padded convolution, leaky ReLU and 2×2 max pooling, then a
linear fully connected bottleneck to the latent vector. Decoder: a fully connected
expansion with leaky ReLU, then per stage a stride-2 transposed convolution that exactly
doubles height and width, leaky ReLU between stages and a sigmoid at the output.

The bottleneck weight is stored at unit variance and scaled by enc_fc_gain() in the
forward pass, so the effective initialization is still He-uniform while Adam's per-step
movement of the latent no longer grows with the bottleneck's fan-in.

Tensors are float64 in (N, C, H, W) layout. Convolution kernels are stored as
(C_out, C_in, k, k); the decoder's transposed convolutions are computed as a valid
convolution over the zero-dilated, padded input with kernels in that same layout.
"""

import logging
from collections import OrderedDict
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, Iterator, List, Sequence, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..config import DEFAULT_SEED
from ..corpus.images import GrayImage
from ..errors import DataError, UsageError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AEConfig:
    """Architecture and training hyperparameters of one autoencoder"""
    input_h: int
    input_w: int
    enc_channels: Tuple[int, ...] = (1, 16, 32, 64, 128)
    kernel: int = 3
    pool: int = 2
    latent_dim: int = 512
    leaky_slope: float = 0.01
    seed: int = DEFAULT_SEED
    batch_size: int = 8
    lr: float = 0.001

    def __post_init__(self):
        object.__setattr__(self, "enc_channels", tuple(int(c) for c in self.enc_channels))
        if len(self.enc_channels) < 2 or self.enc_channels[0] != 1:
            raise UsageError("enc_channels must start at 1 and name at least one stage")
        if any(c < 1 for c in self.enc_channels):
            raise UsageError("channel counts must be positive")
        if self.kernel < 1 or self.kernel % 2 == 0:
            raise UsageError("kernel size must be a positive odd number")
        if self.pool != 2:
            raise UsageError("only 2x2 pooling is supported (decoder stages double the size)")
        factor = self.pool ** self.num_stages
        if self.input_h < 1 or self.input_w < 1 or self.input_h % factor or self.input_w % factor:
            raise UsageError(
                f"input size {self.input_h}x{self.input_w} must be divisible by {factor}"
            )
        if self.latent_dim < 1:
            raise UsageError("latent_dim must be at least 1")
        if self.batch_size < 1:
            raise UsageError("batch_size must be at least 1")
        if self.lr <= 0:
            raise UsageError("lr must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("seed must fit in an unsigned 64-bit integer")

    @property
    def num_stages(self) -> int:
        return len(self.enc_channels) - 1

    @property
    def bottleneck_shape(self) -> Tuple[int, int, int]:
        factor = self.pool ** self.num_stages
        return self.enc_channels[-1], self.input_h // factor, self.input_w // factor

    @property
    def bottleneck_size(self) -> int:
        c, h, w = self.bottleneck_shape
        return c * h * w

    def to_dict(self) -> dict:
        data = asdict(self)
        data["enc_channels"] = list(self.enc_channels)
        return data

    def with_overrides(self, **overrides) -> "AEConfig":
        if "enc_channels" in overrides:
            overrides["enc_channels"] = tuple(overrides["enc_channels"])
        return replace(self, **overrides)

    @classmethod
    def paper_scale(cls, seed: int = DEFAULT_SEED) -> "AEConfig":
        """64×1024 input, channels 1-16-32-64-128, 512-d latent (about 33.8M parameters)"""
        return cls(input_h=64, input_w=1024, seed=seed)

    @classmethod
    def desk_scale(cls, seed: int = DEFAULT_SEED) -> "AEConfig":
        """32×256 input, channels 1-8-16, 64-d latent"""
        return cls(input_h=32, input_w=256, enc_channels=(1, 8, 16), latent_dim=64, seed=seed)


# ============================================================================
# PARAMETERS
# ============================================================================

@dataclass
class AEParams:
    """Named parameter tensors in declaration order"""
    config: AEConfig
    tensors: "OrderedDict[str, np.ndarray]" = field(default_factory=OrderedDict)

    @staticmethod
    def shapes(config: AEConfig) -> "OrderedDict[str, Tuple[int, ...]]":
        k = config.kernel
        ch = config.enc_channels
        shapes: "OrderedDict[str, Tuple[int, ...]]" = OrderedDict()
        for i in range(config.num_stages):
            shapes[f"enc{i}.weight"] = (ch[i + 1], ch[i], k, k)
            shapes[f"enc{i}.bias"] = (ch[i + 1],)
        shapes["enc_fc.weight"] = (config.latent_dim, config.bottleneck_size)
        shapes["enc_fc.bias"] = (config.latent_dim,)
        shapes["dec_fc.weight"] = (config.bottleneck_size, config.latent_dim)
        shapes["dec_fc.bias"] = (config.bottleneck_size,)
        for i in range(config.num_stages):
            c_in = ch[config.num_stages - i]
            c_out = ch[config.num_stages - i - 1]
            shapes[f"dec{i}.weight"] = (c_out, c_in, k, k)
            shapes[f"dec{i}.bias"] = (c_out,)
        return shapes

    @classmethod
    def initialize(cls, config: AEConfig, rng: np.random.Generator = None) -> "AEParams":
        """
        He-uniform weights drawn from U(-sqrt(6/fan_in), +sqrt(6/fan_in)), zero biases.

        enc_fc.weight is drawn from U(-sqrt(3), +sqrt(3)) instead; times enc_fc_gain()
        that is the same He-uniform range. Weights are drawn in declaration order from
        default_rng(config.seed) unless a generator is passed in.
        """
        rng = np.random.default_rng(config.seed) if rng is None else rng
        tensors = OrderedDict()
        for name, shape in cls.shapes(config).items():
            if name.endswith(".bias"):
                tensors[name] = np.zeros(shape, dtype=np.float64)
            else:
                fan_in = int(np.prod(shape[1:]))
                bound = np.sqrt(3.0) if name == "enc_fc.weight" else np.sqrt(6.0 / fan_in)
                tensors[name] = rng.uniform(-bound, bound, size=shape)
        return cls(config=config, tensors=tensors)

    @classmethod
    def zeros(cls, config: AEConfig) -> "AEParams":
        return cls(config=config, tensors=OrderedDict(
            (name, np.zeros(shape, dtype=np.float64)) for name, shape in cls.shapes(config).items()
        ))

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self.tensors)

    def items(self):
        return self.tensors.items()

    def copy(self) -> "AEParams":
        return AEParams(config=self.config, tensors=OrderedDict(
            (name, value.copy()) for name, value in self.tensors.items()
        ))

    def num_parameters(self) -> int:
        return int(sum(value.size for value in self.tensors.values()))

    def validate(self) -> None:
        """Check shapes against the config and that every value is finite."""
        expected = self.shapes(self.config)
        if list(expected) != list(self.tensors):
            raise DataError("parameter names do not match the configuration")
        for name, shape in expected.items():
            if self.tensors[name].shape != shape:
                raise DataError(f"{name} has shape {self.tensors[name].shape}, expected {shape}")
            if not np.all(np.isfinite(self.tensors[name])):
                raise DataError(f"{name} contains non-finite values")


# ============================================================================
# LAYERS
# ============================================================================

def _conv_valid(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Valid cross-correlation; returns the output and the window view for backward."""
    k = w.shape[-1]
    windows = sliding_window_view(x, (k, k), axis=(2, 3))      # (N, C, H', W', k, k)
    out = np.tensordot(windows, w, axes=([1, 4, 5], [1, 2, 3]))  # (N, H', W', C_out)
    out = out.transpose(0, 3, 1, 2) + b[None, :, None, None]
    return out, windows


def _conv_valid_backward(dout: np.ndarray, windows: np.ndarray,
                         w: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    k = w.shape[-1]
    dw = np.tensordot(dout, windows, axes=([0, 2, 3], [0, 2, 3]))
    db = dout.sum(axis=(0, 2, 3))
    padded = np.pad(dout, ((0, 0), (0, 0), (k - 1, k - 1), (k - 1, k - 1)))
    dwin = sliding_window_view(padded, (k, k), axis=(2, 3))
    dx = np.tensordot(dwin, w[:, :, ::-1, ::-1], axes=([1, 4, 5], [0, 2, 3]))
    return dx.transpose(0, 3, 1, 2), dw, db


def _leaky(x: np.ndarray, slope: float) -> np.ndarray:
    return np.where(x > 0, x, slope * x)


def _leaky_grad(x: np.ndarray, slope: float) -> np.ndarray:
    return np.where(x > 0, 1.0, slope)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return np.exp(-np.logaddexp(0.0, -x))


def _maxpool(x: np.ndarray, s: int) -> Tuple[np.ndarray, np.ndarray]:
    """s×s max pooling; ties go to the first element in row-major order."""
    n, c, h, w = x.shape
    blocks = x.reshape(n, c, h // s, s, w // s, s).transpose(0, 1, 2, 4, 3, 5)
    blocks = blocks.reshape(n, c, h // s, w // s, s * s)
    arg = blocks.argmax(axis=-1)
    return np.take_along_axis(blocks, arg[..., None], axis=-1)[..., 0], arg


def _maxpool_backward(dout: np.ndarray, arg: np.ndarray, s: int) -> np.ndarray:
    n, c, hp, wp = dout.shape
    blocks = np.zeros((n, c, hp, wp, s * s), dtype=dout.dtype)
    np.put_along_axis(blocks, arg[..., None], dout[..., None], axis=-1)
    blocks = blocks.reshape(n, c, hp, wp, s, s).transpose(0, 1, 2, 4, 3, 5)
    return blocks.reshape(n, c, hp * s, wp * s)


def _dilate_pad(x: np.ndarray, k: int) -> np.ndarray:
    """Insert zeros between pixels and pad so a valid k×k conv doubles the size."""
    n, c, h, w = x.shape
    before = (k - 1) // 2
    after = before + 1
    out = np.zeros((n, c, 2 * h - 1 + before + after, 2 * w - 1 + before + after), dtype=x.dtype)
    out[:, :, before:before + 2 * h - 1:2, before:before + 2 * w - 1:2] = x
    return out


def _undilate(dpadded: np.ndarray, h: int, w: int, k: int) -> np.ndarray:
    before = (k - 1) // 2
    return dpadded[:, :, before:before + 2 * h - 1:2, before:before + 2 * w - 1:2]


# ============================================================================
# FORWARD / BACKWARD
# ============================================================================

Batch = Union[np.ndarray, Sequence[GrayImage]]


def enc_fc_gain(config: AEConfig) -> float:
    """Runtime scale of the stored bottleneck weight, sqrt(2 / fan_in)"""
    return float(np.sqrt(2.0 / config.bottleneck_size))


def as_batch(params: AEParams, batch: Batch) -> np.ndarray:
    if isinstance(batch, np.ndarray):
        array = batch.astype(np.float64, copy=False)
    else:
        if not batch:
            raise DataError("empty image batch")
        array = np.stack([np.asarray(img.pixels, dtype=np.float64) for img in batch])
    if array.ndim == 2:
        array = array[None]
    expected = (params.config.input_h, params.config.input_w)
    if array.ndim != 3 or array.shape[1:] != expected:
        raise DataError(f"images must be {expected[0]}x{expected[1]}, got shape {array.shape[1:]}")
    return array


def _forward(params: AEParams, x: np.ndarray) -> Tuple[np.ndarray, List[tuple]]:
    cfg = params.config
    k, pad, slope = cfg.kernel, (cfg.kernel - 1) // 2, cfg.leaky_slope
    cache: List[tuple] = []

    h = x[:, None]
    for i in range(cfg.num_stages):
        padded = np.pad(h, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
        z, windows = _conv_valid(padded, params[f"enc{i}.weight"], params[f"enc{i}.bias"])
        a = _leaky(z, slope)
        h, arg = _maxpool(a, cfg.pool)
        cache.append(("enc", windows, z, arg))

    n = x.shape[0]
    flat = h.reshape(n, -1)
    latent = flat @ (enc_fc_gain(cfg) * params["enc_fc.weight"]).T + params["enc_fc.bias"]
    z_fc = latent @ params["dec_fc.weight"].T + params["dec_fc.bias"]
    h = _leaky(z_fc, slope).reshape((n,) + cfg.bottleneck_shape)
    cache.append(("fc", flat, latent, z_fc))

    for i in range(cfg.num_stages):
        hh, ww = h.shape[2], h.shape[3]
        z, windows = _conv_valid(_dilate_pad(h, k), params[f"dec{i}.weight"], params[f"dec{i}.bias"])
        last = i == cfg.num_stages - 1
        h = _sigmoid(z) if last else _leaky(z, slope)
        cache.append(("dec", windows, z, (hh, ww)))

    return h[:, 0], cache


def reconstruct(params: AEParams, images: np.ndarray) -> np.ndarray:
    """Reconstructions of an (N, H, W) stack"""
    recon, _ = _forward(params, as_batch(params, images))
    return recon


def ae_forward(params: AEParams, batch: Batch):
    """
    Reconstruct a batch.

    Args:
        params: Autoencoder parameters
        batch: List of GrayImage, or an (N, H, W) array

    Returns:
        Same kind as the input: a list of GrayImage or an (N, H, W) array in (0, 1)
    """
    recon = reconstruct(params, batch)
    if isinstance(batch, np.ndarray):
        return recon
    return [GrayImage.from_array(img) for img in recon]


def ae_loss(recon: Batch, target: Batch) -> float:
    """Mean over every pixel of the squared reconstruction error"""
    r = recon if isinstance(recon, np.ndarray) else np.stack([img.pixels for img in recon])
    t = target if isinstance(target, np.ndarray) else np.stack([img.pixels for img in target])
    if r.shape != t.shape:
        raise DataError(f"shape mismatch: {r.shape} vs {t.shape}")
    return float(np.mean((np.asarray(r, dtype=np.float64) - t) ** 2))


def loss_and_grads(params: AEParams, batch: Batch) -> Tuple[float, Dict[str, np.ndarray]]:
    """
    MSE loss of a batch and its exact gradient for every parameter.

    Returns:
        (loss, gradients keyed like params)
    """
    cfg = params.config
    k, pad, slope, s = cfg.kernel, (cfg.kernel - 1) // 2, cfg.leaky_slope, cfg.pool
    x = as_batch(params, batch)
    recon, cache = _forward(params, x)
    loss = float(np.mean((recon - x) ** 2))
    grads: Dict[str, np.ndarray] = {}

    d = (2.0 / recon.size) * (recon - x)[:, None]
    for i in reversed(range(cfg.num_stages)):
        _, windows, z, (hh, ww) = cache[cfg.num_stages + 1 + i]
        if i == cfg.num_stages - 1:
            sig = _sigmoid(z)
            dz = d * sig * (1.0 - sig)
        else:
            dz = d * _leaky_grad(z, slope)
        dpadded, grads[f"dec{i}.weight"], grads[f"dec{i}.bias"] = _conv_valid_backward(
            dz, windows, params[f"dec{i}.weight"]
        )
        d = _undilate(dpadded, hh, ww, k)

    _, flat, latent, z_fc = cache[cfg.num_stages]
    n = x.shape[0]
    dz_fc = d.reshape(n, -1) * _leaky_grad(z_fc, slope)
    grads["dec_fc.weight"] = dz_fc.T @ latent
    grads["dec_fc.bias"] = dz_fc.sum(axis=0)
    dlatent = dz_fc @ params["dec_fc.weight"]
    gain = enc_fc_gain(cfg)
    grads["enc_fc.weight"] = gain * (dlatent.T @ flat)
    grads["enc_fc.bias"] = dlatent.sum(axis=0)
    d = (dlatent @ (gain * params["enc_fc.weight"])).reshape((n,) + cfg.bottleneck_shape)

    for i in reversed(range(cfg.num_stages)):
        _, windows, z, arg = cache[i]
        da = _maxpool_backward(d, arg, s)
        dz = da * _leaky_grad(z, slope)
        dpadded, grads[f"enc{i}.weight"], grads[f"enc{i}.bias"] = _conv_valid_backward(
            dz, windows, params[f"enc{i}.weight"]
        )
        d = dpadded[:, :, pad:dpadded.shape[2] - pad, pad:dpadded.shape[3] - pad]

    ordered = OrderedDict((name, grads[name]) for name in params)
    return loss, ordered


def ae_backward(params: AEParams, batch: Batch) -> Dict[str, np.ndarray]:
    """Gradient of ae_loss(ae_forward(params, batch), batch) for every parameter"""
    return loss_and_grads(params, batch)[1]
