"""Batch front door: JSON experiment configs in, CSV/JSON/SVG results out."""

from .config import ExperimentConfig, marginal_from_dict, model_from_dict  # noqa: F401
from .main import main  # noqa: F401
