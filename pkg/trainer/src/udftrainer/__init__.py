"""Overfit sine-activated MLPs to a shape's unsigned distance field."""

from .bands import BandConfig, TrainingSet, sample_training_set
from .meshdist import MeshDistanceQuery, load_obj, point_triangle_distance
from .model import PositionalEncoding, UdfNet, load_weights, save_weights
from .train import TrainConfig, TrainReport, train

__version__ = "0.1.0"

__all__ = [
    "BandConfig",
    "MeshDistanceQuery",
    "PositionalEncoding",
    "TrainConfig",
    "TrainReport",
    "TrainingSet",
    "UdfNet",
    "load_obj",
    "load_weights",
    "point_triangle_distance",
    "sample_training_set",
    "save_weights",
    "train",
    "__version__",
]
