"""
Model Artifacts
===============

JSON envelope shared by every estimator; the ``method`` field selects the
model class on load.
"""

from ..baselines import GdpModel, KdeModel
from ..dlgp import DlgpModel
from ..utils.errors import InvalidParameter
from ..utils.helpers import load_json, save_json

MODEL_TYPES = {
    'dlgp': DlgpModel,
    'dkde': KdeModel,
    'gdp': GdpModel,
}


def save_model(model, filepath: str) -> None:
    """Write a fitted model to JSON."""
    save_json(model.to_dict(), filepath)


def load_model(filepath: str):
    """Read a model written by ``save_model``."""
    payload = load_json(filepath)
    method = payload.get('method')
    if method not in MODEL_TYPES:
        raise InvalidParameter(f"Unknown model method {method!r} in {filepath}")
    return MODEL_TYPES[method].from_dict(payload)


__all__ = ['MODEL_TYPES', 'save_model', 'load_model']
