"""Char-level temporal ConvNet that classifies an API request into an
error-code class or "Right" before the call is executed.

Forward, backward, and momentum-SGD training are implemented directly on
numpy arrays; no autograd framework is involved.
"""

from .encoding import Alphabet, quantize, serialize_request, default_alphabet
from .layers import Conv1d, Dense, Dropout, Flatten, MaxPool1d, ReLU, ShapeError
from .model import (
    ConvLayerCfg,
    ConvNetModel,
    UnknownLabel,
    VARIANTS,
    build_model,
    conv_output_length,
    forward,
    loss_and_backward,
    predict,
)
from .train import InsufficientData, TrainCfg, learning_rate, train
from .checkpoint import load_checkpoint, save_checkpoint
from .metrics import LengthMismatch, PrecisionReport, precision

__all__ = [
    "Alphabet",
    "Conv1d",
    "ConvLayerCfg",
    "ConvNetModel",
    "Dense",
    "Dropout",
    "Flatten",
    "InsufficientData",
    "LengthMismatch",
    "MaxPool1d",
    "PrecisionReport",
    "ReLU",
    "ShapeError",
    "TrainCfg",
    "UnknownLabel",
    "VARIANTS",
    "build_model",
    "conv_output_length",
    "default_alphabet",
    "forward",
    "learning_rate",
    "load_checkpoint",
    "loss_and_backward",
    "precision",
    "predict",
    "quantize",
    "save_checkpoint",
    "serialize_request",
    "train",
]
