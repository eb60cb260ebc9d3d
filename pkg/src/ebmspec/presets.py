"""Named model presets for the experiment front end.

The family fixes total relaxation strength h = 1 and rates r_i = 5i with
equal-contribution weights, then varies the term count N in {1, 2, 5, 9}
and the modulus D in {0.5, 1, 5} — one value per regime (fluid-like,
quasi-static-critical, solid-like).  Names look like ``n5-d0.5``.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .model import PronyModel, equal_contribution_weights

__all__ = ["PRESET_TERMS", "PRESET_MODULI", "preset_names", "get_preset"]

PRESET_TERMS = (1, 2, 5, 9)
PRESET_MODULI = (0.5, 1.0, 5.0)


def _name(n: int, d: float) -> str:
    return f"n{n}-d{d:g}"


def preset_names() -> list[str]:
    return [_name(n, d) for n in PRESET_TERMS for d in PRESET_MODULI]


def _build(n: int, d: float) -> PronyModel:
    rates = 5.0 * np.arange(1, n + 1)
    return PronyModel(
        rates=rates, weights=equal_contribution_weights(rates), modulus=d
    )


def get_preset(name: str) -> PronyModel:
    """The preset model for ``name`` (e.g. ``n9-d0.5``)."""
    for n in PRESET_TERMS:
        for d in PRESET_MODULI:
            if _name(n, d) == name:
                return _build(n, d)
    raise ConfigError(
        f"unknown preset {name!r}; available: {', '.join(preset_names())}"
    )
