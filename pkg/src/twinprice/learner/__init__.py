"""Actor-critic learner for the leader's pricing policy."""

from ._backend import BACKEND, get_kernel
from .network import Adam, PolicyNetwork
from .ppo import (
    Batch,
    PpoHyperparams,
    Transition,
    UpdateStats,
    clip_ratio,
    clipped_objective,
    gae_advantages,
    loss_and_grad,
    ppo_update,
)
from .train import (
    LearningCurve,
    TrainingResult,
    load_checkpoint,
    save_checkpoint,
    train,
)

__all__ = [
    "BACKEND", "get_kernel", "Adam", "PolicyNetwork", "Batch", "PpoHyperparams",
    "Transition", "UpdateStats", "clip_ratio", "clipped_objective", "gae_advantages",
    "loss_and_grad", "ppo_update", "LearningCurve", "TrainingResult", "load_checkpoint",
    "save_checkpoint", "train",
]
