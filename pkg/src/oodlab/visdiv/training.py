"""
Autoencoder training and reconstruction-error visual divergence.

Training keeps the snapshot with the lowest validation MSE seen so far; the
initialization counts as the epoch-0 snapshot, so epochs=0 returns it unchanged.
"""

import logging
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..batch import run_units
from ..errors import DataError, NumericalError
from ..models import EpochRecord
from .autoencoder import AEConfig, AEParams, Batch, as_batch, loss_and_grads, reconstruct
from .optim import AdamState, adam_step

logger = logging.getLogger(__name__)

DEFAULT_EPOCHS = 100


def reconstruction_errors(params: AEParams, images: Batch) -> np.ndarray:
    """Per-image MSE between each image and its reconstruction"""
    stack = as_batch(params, images)
    if len(stack) == 0:
        raise DataError("empty image set")
    step = params.config.batch_size
    errors = np.empty(len(stack), dtype=np.float64)
    for start in range(0, len(stack), step):
        chunk = stack[start:start + step]
        recon = reconstruct(params, chunk)
        errors[start:start + step] = np.mean((recon - chunk) ** 2, axis=(1, 2))
    return errors


def visual_divergence(params_S: AEParams, X_T: Batch) -> float:
    """
    Mean over target images of the per-image reconstruction MSE of a source autoencoder.

    Raises:
        DataError: empty target set or images of the wrong size
    """
    errors = reconstruction_errors(params_S, X_T)
    # sorted summation keeps the value independent of image order
    return float(np.sum(np.sort(errors)) / len(errors))


def train_autoencoder_with_history(config: AEConfig, train: Batch, val: Batch,
                                   epochs: int = DEFAULT_EPOCHS,
                                   show_progress: bool = False,
                                   desc: str = "Training") -> Tuple[AEParams, List[EpochRecord]]:
    """
    Train from a seeded initialization and keep the best-on-validation snapshot.

    Args:
        config: Architecture, seed, batch size and learning rate
        train: Training images (N, H, W) or list of GrayImage
        val: Validation images
        epochs: Number of full passes over the training set
        show_progress: Draw a tqdm bar over epochs

    Returns:
        (best parameters, per-epoch records starting with epoch 0)

    Raises:
        DataError: empty split or wrong image size
        NumericalError: the loss became non-finite
    """
    if epochs < 0:
        raise DataError("epochs must be nonnegative")
    rng = np.random.default_rng(config.seed)
    params = AEParams.initialize(config, rng)
    train_x = as_batch(params, train)
    val_x = as_batch(params, val)
    if len(train_x) == 0 or len(val_x) == 0:
        raise DataError("training needs non-empty train and val splits")

    state = AdamState.for_params(params)
    best = params.copy()
    best_val = visual_divergence(params, val_x)
    history = [EpochRecord(epoch=0, val_mse=best_val, is_best=True)]

    for epoch in tqdm(range(1, epochs + 1), desc=desc, unit="epoch", disable=not show_progress):
        order = rng.permutation(len(train_x))
        weighted = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = train_x[order[start:start + config.batch_size]]
            loss, grads = loss_and_grads(params, batch)
            if not np.isfinite(loss):
                raise NumericalError(f"training loss became non-finite at epoch {epoch}")
            params, state = adam_step(params, grads, state)
            weighted += loss * len(batch)

        val_mse = visual_divergence(params, val_x)
        if not np.isfinite(val_mse):
            raise NumericalError(f"validation loss became non-finite at epoch {epoch}")
        improved = val_mse < best_val
        if improved:
            best, best_val = params.copy(), val_mse
        history.append(EpochRecord(epoch=epoch, train_mse=weighted / len(train_x),
                                   val_mse=val_mse, is_best=improved))
        logger.debug("%s epoch %d: train %.6f val %.6f%s", desc, epoch,
                     weighted / len(train_x), val_mse, " *" if improved else "")

    # only the last improvement is the returned snapshot
    best_epoch = max(record.epoch for record in history if record.is_best)
    for record in history:
        record.is_best = record.epoch == best_epoch
    logger.info("%s: best validation MSE %.6f at epoch %d", desc, best_val, best_epoch)
    return best, history


def train_autoencoder(config: AEConfig, train: Batch, val: Batch,
                      epochs: int = DEFAULT_EPOCHS) -> AEParams:
    """Train and return only the best-on-validation parameters"""
    return train_autoencoder_with_history(config, train, val, epochs)[0]


def visual_divergence_matrix(params_by_source: Mapping[str, AEParams],
                             images_by_target: Mapping[str, np.ndarray],
                             max_workers: int = 1,
                             sources: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """
    Source × target matrix of visual divergences.

    Entry (S, T) is the mean reconstruction MSE of the autoencoder trained on S over
    the images of T.
    """
    sources = list(params_by_source) if sources is None else list(sources)
    targets = list(images_by_target)
    cells = [(s, t) for s in sources for t in targets]
    values = run_units(lambda cell: visual_divergence(params_by_source[cell[0]],
                                                      images_by_target[cell[1]]),
                       cells, max_workers=max_workers, desc="Visual divergence")
    matrix = np.array(values, dtype=np.float64).reshape(len(sources), len(targets))
    return pd.DataFrame(matrix, index=sources, columns=targets)
