"""Model configuration documents.

A model config is a JSON object with exactly the keys ``modes`` (positive
integer), ``coeffs`` (list of positive reals, one per frequency) and ``sigma``
(nonnegative real).  Unknown keys are rejected.  The name ``motivating`` is
accepted anywhere a path is, and selects the one-mode preset with weight pi
(kernel cos(y - x)) at sigma = 1.
"""

from __future__ import annotations

import json
from pathlib import Path

from .model import CircleModel, motivating_model

ALLOWED_KEYS = {"modes", "coeffs", "sigma"}

PRESETS = {"motivating": lambda: motivating_model(sigma=1.0)}


class ConfigError(ValueError):
    pass


def model_from_dict(doc: dict) -> CircleModel:
    if not isinstance(doc, dict):
        raise ConfigError("model config must be a JSON object")
    unknown = set(doc) - ALLOWED_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = ALLOWED_KEYS - set(doc)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")
    try:
        return CircleModel(n_modes=int(doc["modes"]),
                           coeffs=tuple(float(a) for a in doc["coeffs"]),
                           sigma=float(doc["sigma"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_model(spec: str) -> CircleModel:
    """Load a model from a preset name or a JSON file path."""
    if spec in PRESETS:
        return PRESETS[spec]()
    path = Path(spec)
    if not path.exists():
        raise ConfigError(f"config file not found: {spec}")
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config does not parse as JSON: {exc}") from exc
    return model_from_dict(doc)


def model_to_dict(model: CircleModel) -> dict:
    return {"modes": model.n_modes, "coeffs": list(model.coeffs), "sigma": model.sigma}
