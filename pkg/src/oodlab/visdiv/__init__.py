"""Convolutional autoencoder and reconstruction-error visual divergence."""

from .autoencoder import (AEConfig, AEParams, ae_backward, ae_forward, ae_loss, loss_and_grads,
                          reconstruct)
from .optim import AdamState, adam_step
from .params_io import load_params, save_params
from .training import (reconstruction_errors, train_autoencoder, train_autoencoder_with_history,
                       visual_divergence, visual_divergence_matrix)

__all__ = [
    "AEConfig", "AEParams", "ae_forward", "ae_loss", "ae_backward", "loss_and_grads",
    "reconstruct", "AdamState", "adam_step", "save_params", "load_params",
    "train_autoencoder", "train_autoencoder_with_history", "visual_divergence",
    "reconstruction_errors", "visual_divergence_matrix",
]
