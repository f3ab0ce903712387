"""Minimal numpy neural-network kernel with manual backpropagation."""
from .init import fans, xavier_bound, xavier_init
from .layers import (
    LAYER_TYPES,
    LSTM,
    Conv1D,
    Dense,
    Dropout,
    Layer,
    MaxPool1D,
    ReLU,
    Reshape,
    Sigmoid,
)
from .model import (
    Network,
    TrainStepReport,
    backward_and_step,
    compute_gradients,
    gradient_check,
    mse_grad,
    mse_loss,
)
from .optim import Adam, AdamConfig
from .serialize import FORMAT_VERSION, load_model, save_model

__all__ = [
    "Adam", "AdamConfig", "Conv1D", "Dense", "Dropout", "FORMAT_VERSION", "LAYER_TYPES",
    "LSTM", "Layer", "MaxPool1D", "Network", "ReLU", "Reshape", "Sigmoid",
    "TrainStepReport", "backward_and_step", "compute_gradients", "fans",
    "gradient_check", "load_model", "mse_grad", "mse_loss", "save_model",
    "xavier_bound", "xavier_init",
]
