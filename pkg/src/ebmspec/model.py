"""Prony-series relaxation models and the stretched-exponential targets they fit.

A model is a finite relaxation spectrum: strictly increasing rates ``r_i``,
strictly positive weights ``b_i`` and an instantaneous modulus ``D``.  The
derived amplitudes ``s_i = b_i / r_i`` give the relaxation function

    G(t) = sum_i s_i * exp(-r_i * t),

and the amplitude sum ``h = sum_i s_i = G(0)`` splits parameter space into
the three regimes ``D > h`` / ``D = h`` / ``D < h`` that control the sign of
the leading eigenvalue downstream.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, FitError, ModelValidationError

__all__ = [
    "PronyModel",
    "StretchedExponential",
    "Regime",
    "RegimeLabel",
    "classify_regime",
    "relaxation_value",
    "fit_prony",
    "fit_residual",
    "equal_contribution_weights",
    "load_model",
    "load_document",
    "model_from_document",
    "stretched_from_document",
    "model_to_document",
    "save_model",
]


# --------------------------------------------------------------------------
# core types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class StretchedExponential:
    """Relaxation target exp(-(t/tau)^beta) with 0 < beta < 1."""

    tau: float
    beta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.tau) and self.tau > 0.0):
            raise ModelValidationError(f"tau must be finite and positive, got {self.tau!r}")
        if not (0.0 < self.beta < 1.0):
            raise ModelValidationError(f"beta must lie strictly in (0, 1), got {self.beta!r}")

    def value(self, t):
        """Evaluate the target at t >= 0 (scalar or array)."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0.0):
            raise ModelValidationError("stretched exponential is only evaluated at t >= 0")
        out = np.exp(-((t / self.tau) ** self.beta))
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PronyModel:
    """Validated relaxation spectrum (rates, weights, instantaneous modulus).

    Construction *is* validation: rates must be strictly increasing and
    positive, weights strictly positive and of matching length, the modulus
    strictly positive.  Arrays are copied and frozen.
    """

    rates: np.ndarray
    weights: np.ndarray
    modulus: float

    def __post_init__(self) -> None:
        rates = np.atleast_1d(np.asarray(self.rates, dtype=float)).copy()
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float)).copy()
        if rates.ndim != 1 or weights.ndim != 1:
            raise ModelValidationError("rates and weights must be one-dimensional")
        if rates.size == 0:
            raise ModelValidationError("a model needs at least one relaxation term (N >= 1)")
        if rates.size != weights.size:
            raise ModelValidationError(
                f"rates and weights must have equal length, got {rates.size} and {weights.size}"
            )
        if not np.all(np.isfinite(rates)) or not np.all(np.isfinite(weights)):
            raise ModelValidationError("rates and weights must be finite")
        if not np.all(rates > 0.0):
            raise ModelValidationError("all rates must be strictly positive")
        if not np.all(np.diff(rates) > 0.0):
            raise ModelValidationError("rates must be strictly increasing")
        if not np.all(weights > 0.0):
            raise ModelValidationError("all weights must be strictly positive")
        modulus = float(self.modulus)
        if not (math.isfinite(modulus) and modulus > 0.0):
            raise ModelValidationError(f"modulus must be finite and positive, got {self.modulus!r}")
        rates.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "modulus", modulus)

    @property
    def n_terms(self) -> int:
        return int(self.rates.size)

    @property
    def amplitudes(self) -> np.ndarray:
        """Prony amplitudes s_i = b_i / r_i."""
        return self.weights / self.rates

    @property
    def amplitude_sum(self) -> float:
        """h = sum_i b_i / r_i = G(0), exactly rounded."""
        return math.fsum(self.amplitudes.tolist())

    def relaxation(self, t):
        return relaxation_value(self, t)

    def __repr__(self) -> str:  # keep reprs short for report files
        return (
            f"PronyModel(n={self.n_terms}, modulus={self.modulus!r}, "
            f"rates={self.rates.tolist()!r}, weights={self.weights.tolist()!r})"
        )


class Regime(enum.Enum):
    """Sign of the long-time modulus D - h."""

    OVERDAMPED_SOLID = "overdamped-solid"            # D > h
    QUASI_STATIC_CRITICAL = "quasi-static-critical"  # D = h within tolerance
    SUB_CRITICAL = "sub-critical"                    # D < h


@dataclass(frozen=True)
class RegimeLabel:
    regime: Regime
    tolerance: float
    gap: float  # signed D - h actually measured


# --------------------------------------------------------------------------
# evaluation and classification
# --------------------------------------------------------------------------

def relaxation_value(model: PronyModel, t):
    """Relaxation function G(t) = sum_i s_i exp(-r_i t) for t >= 0.

    Accepts scalars or arrays; raises for any negative time.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ModelValidationError("relaxation function is only defined for t >= 0")
    out = np.exp(-np.multiply.outer(t, model.rates)) @ model.amplitudes
    return float(out) if np.ndim(out) == 0 else out


def classify_regime(model: PronyModel, tol: float = 1e-12) -> RegimeLabel:
    """Classify D vs h with a relative tolerance (default 1e-12)."""
    if not (math.isfinite(tol) and tol >= 0.0):
        raise ModelValidationError(f"tolerance must be a non-negative number, got {tol!r}")
    h = model.amplitude_sum
    gap = model.modulus - h
    if abs(gap) <= tol * max(model.modulus, h):
        regime = Regime.QUASI_STATIC_CRITICAL
    elif gap > 0.0:
        regime = Regime.OVERDAMPED_SOLID
    else:
        regime = Regime.SUB_CRITICAL
    return RegimeLabel(regime=regime, tolerance=tol, gap=gap)


# --------------------------------------------------------------------------
# fitting
# --------------------------------------------------------------------------

def equal_contribution_weights(rates, total_strength: float = 1.0) -> np.ndarray:
    """Weights b_i = h * r_i / N so every term contributes h/N to G(0)."""
    rates = np.atleast_1d(np.asarray(rates, dtype=float))
    if not (math.isfinite(total_strength) and total_strength > 0.0):
        raise ModelValidationError(f"total strength must be positive, got {total_strength!r}")
    return total_strength * rates / rates.size


def _validated_grid(time_grid) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(time_grid, dtype=float))
    if grid.size == 0:
        raise FitError("time grid is empty")
    if not np.all(np.isfinite(grid)) or not np.all(grid > 0.0):
        raise FitError("time grid must contain finite, strictly positive times")
    if not np.all(np.diff(grid) > 0.0):
        raise FitError("time grid must be strictly increasing")
    return grid


def fit_prony(
    target: StretchedExponential,
    n_terms: int,
    time_grid,
    mode: str = "least-squares",
    *,
    rates,
    total_strength: float = 1.0,
    modulus: float | None = None,
) -> PronyModel:
    """Fit a Prony model to a stretched-exponential target on a time grid.

    Parameters
    ----------
    target:
        The relaxation curve to approximate.
    n_terms:
        Number of rungs on the rate ladder.
    time_grid:
        Strictly increasing, strictly positive sample times.
    mode:
        ``"equal-contribution"`` ignores the samples and splits
        ``total_strength`` evenly: b_i = h * r_i / N.  ``"least-squares"``
        solves a non-negative least-squares problem for the amplitudes on the
        fixed ladder and keeps only the active (positive) terms.
    rates:
        The rate ladder (length ``n_terms``, strictly increasing, positive).
    total_strength:
        h for equal-contribution mode (default 1).
    modulus:
        Optional instantaneous modulus; defaults to the fitted h, i.e. the
        quasi-static choice D = h.
    """
    grid = _validated_grid(time_grid)
    rates = np.atleast_1d(np.asarray(rates, dtype=float))
    if rates.size != int(n_terms):
        raise FitError(f"expected {n_terms} rates, got {rates.size}")
    if not np.all(rates > 0.0) or not np.all(np.diff(rates) > 0.0):
        raise FitError("rate ladder must be strictly increasing and positive")

    if mode == "equal-contribution":
        weights = equal_contribution_weights(rates, total_strength)
        d = total_strength if modulus is None else modulus
        return PronyModel(rates=rates, weights=weights, modulus=d)

    if mode == "least-squares":
        from scipy.optimize import nnls

        design = np.exp(-np.multiply.outer(grid, rates))
        samples = target.value(grid)
        amplitudes, _ = nnls(design, samples)
        active = amplitudes > 0.0
        if not np.any(active):
            raise FitError(
                "non-negative least squares left no active terms; "
                "the rate ladder cannot represent the target on this grid"
            )
        kept_rates = rates[active]
        kept_amplitudes = amplitudes[active]
        d = math.fsum(kept_amplitudes.tolist()) if modulus is None else modulus
        return PronyModel(rates=kept_rates, weights=kept_amplitudes * kept_rates, modulus=d)

    raise FitError(f"unknown fit mode {mode!r}; use 'equal-contribution' or 'least-squares'")


def fit_residual(model: PronyModel, target: StretchedExponential, time_grid) -> float:
    """Sum of squared deviations of the model from the target on the grid."""
    grid = _validated_grid(time_grid)
    diff = relaxation_value(model, grid) - target.value(grid)
    return float(np.dot(diff, diff))


# --------------------------------------------------------------------------
# model documents (JSON)
# --------------------------------------------------------------------------

_ALLOWED_KEYS = {"N", "D", "r", "b", "h", "stretched"}


def load_document(path) -> dict:
    """Read and structurally validate a model document (JSON)."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a JSON object at top level")
    unknown = set(doc) - _ALLOWED_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown fields {sorted(unknown)}; allowed: {sorted(_ALLOWED_KEYS)}")
    return doc


def _require(doc: dict, key: str):
    if key not in doc:
        raise ConfigError(f"model document is missing required field {key!r}")
    return doc[key]


def model_from_document(doc: dict) -> PronyModel:
    """Build a validated model from a parsed document.

    Requires N, D, r and exactly one of b (explicit weights) or h
    (equal-contribution split of a total strength).
    """
    n = _require(doc, "N")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ConfigError(f"N must be a positive integer, got {n!r}")
    d = _require(doc, "D")
    rates = np.asarray(_require(doc, "r"), dtype=float)
    if rates.ndim != 1 or rates.size != n:
        raise ConfigError(f"r must be an array of length N={n}, got shape {rates.shape}")
    has_b = "b" in doc
    has_h = "h" in doc
    if has_b == has_h:
        raise ConfigError("exactly one of 'b' (weights) or 'h' (total strength) must be given")
    if has_b:
        weights = np.asarray(doc["b"], dtype=float)
        if weights.ndim != 1 or weights.size != n:
            raise ConfigError(f"b must be an array of length N={n}, got shape {weights.shape}")
    else:
        weights = equal_contribution_weights(rates, float(doc["h"]))
    try:
        return PronyModel(rates=rates, weights=weights, modulus=float(d))
    except ModelValidationError as exc:
        raise ConfigError(f"model document is inadmissible: {exc}") from exc


def stretched_from_document(doc: dict) -> StretchedExponential | None:
    """Extract the optional stretched-exponential block."""
    block = doc.get("stretched")
    if block is None:
        return None
    if not isinstance(block, dict) or set(block) != {"tau", "beta"}:
        raise ConfigError("'stretched' must be an object with exactly the fields 'tau' and 'beta'")
    try:
        return StretchedExponential(tau=float(block["tau"]), beta=float(block["beta"]))
    except ModelValidationError as exc:
        raise ConfigError(f"invalid stretched block: {exc}") from exc


def load_model(path) -> PronyModel:
    return model_from_document(load_document(path))


def model_to_document(model: PronyModel) -> dict:
    """Round-trippable document for a model (explicit weights, no h)."""
    return {
        "N": model.n_terms,
        "D": model.modulus,
        "r": model.rates.tolist(),
        "b": model.weights.tolist(),
    }


def save_model(model: PronyModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_document(model), indent=2, sort_keys=True) + "\n")
