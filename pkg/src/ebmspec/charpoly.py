"""Characteristic polynomials of the relaxation-mode eigenvalue problem.

For a model with N terms and a mode index k (odd wavenumber w = 2k - 1) the
degree-(N+2) characteristic polynomial in product form is

    P_k(x) = (D + x^2 / w^2) * prod_j (x + r_j) - sum_i b_i * prod_{j != i} (x + r_j),

and its k -> infinity limit drops the x^2/w^2 term, leaving the degree-N
limit polynomial.  Away from the poles -r_i both factor through the secular
function  f(x) = D [+ x^2/w^2] - sum_i b_i / (x + r_i).

Everything here evaluates with scalars or numpy arrays, real or complex; a
real input always produces a real result because the arithmetic never leaves
the real axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ModelValidationError, PoleProximityError
from .model import PronyModel

__all__ = [
    "ModeIndex",
    "PolynomialCoeffs",
    "eval_limit_poly",
    "eval_char_poly",
    "eval_secular",
    "eval_derivative",
    "expand_coefficients",
]

# Secular evaluation is rejected inside this relative distance of a pole.
POLE_GUARD = 1e-13


@dataclass(frozen=True)
class ModeIndex:
    """Positive mode index k with its odd wavenumber 2k - 1."""

    k: int

    def __post_init__(self) -> None:
        if not isinstance(self.k, (int, np.integer)) or isinstance(self.k, bool) or self.k < 1:
            raise ModelValidationError(f"mode index must be an integer >= 1, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))

    @property
    def omega(self) -> float:
        return float(2 * self.k - 1)


def as_mode(k) -> ModeIndex:
    return k if isinstance(k, ModeIndex) else ModeIndex(k)


@dataclass(frozen=True)
class PolynomialCoeffs:
    """Real polynomial in ascending coefficient order, nonzero leading term."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=float)).copy()
        if coeffs.ndim != 1 or coeffs.size < 1:
            raise ModelValidationError("coefficients must form a non-empty 1-D array")
        if coeffs[-1] == 0.0:
            raise ModelValidationError("leading coefficient must be nonzero")
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return int(self.coeffs.size - 1)

    @property
    def leading(self) -> float:
        return float(self.coeffs[-1])

    def evaluate(self, x):
        """Horner evaluation; accepts scalars or arrays, real or complex."""
        x = np.asarray(x)
        acc = np.full(x.shape, self.coeffs[-1], dtype=np.result_type(x.dtype, float))
        for c in self.coeffs[-2::-1]:
            acc = acc * x + c
        return acc[()] if acc.ndim == 0 else acc

    def abs_scale(self, x):
        """sum_m |c_m| |x|^m — the natural magnitude for residual scaling."""
        ax = np.abs(np.asarray(x))
        acc = np.full(ax.shape, abs(self.coeffs[-1]))
        for c in self.coeffs[-2::-1]:
            acc = acc * ax + abs(c)
        return acc[()] if acc.ndim == 0 else acc

    def derivative(self) -> "PolynomialCoeffs":
        if self.degree == 0:
            return PolynomialCoeffs(np.zeros(1))
        m = np.arange(1, self.coeffs.size)
        return PolynomialCoeffs(self.coeffs[1:] * m)


# --------------------------------------------------------------------------
# product-form evaluation
# --------------------------------------------------------------------------

def _factor_products(model: PronyModel, x):
    """Products of the linear factors (x + r_j).

    Returns (full, excl) where full = prod_j (x + r_j) and excl[i] is the
    product with factor i left out, computed by prefix/suffix products so no
    division by a vanishing factor ever occurs.
    """
    x = np.asarray(x)
    shape = (model.n_terms,) + x.shape
    t = np.empty(shape, dtype=np.result_type(x.dtype, float))
    for j, rate in enumerate(model.rates):
        t[j] = x + rate
    prefix = np.ones_like(t)
    suffix = np.ones_like(t)
    np.cumprod(t[:-1], axis=0, out=prefix[1:])
    np.cumprod(t[:0:-1], axis=0, out=suffix[-2::-1])
    return t, prefix[-1] * t[-1], prefix * suffix


def _weighted_sum(model: PronyModel, excl):
    return np.tensordot(model.weights, excl, axes=(0, 0))


def eval_limit_poly(model: PronyModel, x):
    """Limit polynomial D * prod(x + r_j) - sum_i b_i prod_{j != i}(x + r_j)."""
    _, full, excl = _factor_products(model, x)
    out = model.modulus * full - _weighted_sum(model, excl)
    return out[()] if np.ndim(out) == 0 else out


def eval_char_poly(model: PronyModel, k, x):
    """Characteristic polynomial of mode k in product form (degree N + 2)."""
    omega = as_mode(k).omega
    x_arr = np.asarray(x)
    _, full, excl = _factor_products(model, x_arr)
    out = (model.modulus + x_arr * x_arr / omega**2) * full - _weighted_sum(model, excl)
    return out[()] if np.ndim(out) == 0 else out


def _char_scale(model: PronyModel, k, x):
    """|term|-sum magnitude of the (limit or mode-k) polynomial at x.

    The polynomial is a difference of two same-scale products, so the sum of
    their absolute values is the conditioning-aware denominator for scaled
    residuals.
    """
    ax = np.abs(np.asarray(x))
    _, full, excl = _factor_products(model, ax)
    lead = model.modulus if k is None else model.modulus + ax * ax / as_mode(k).omega ** 2
    out = lead * full + _weighted_sum(model, excl)
    return out[()] if np.ndim(out) == 0 else out


def _secular_raw(model: PronyModel, x, omega: float | None):
    """Secular form without the pole guard (internal fast path)."""
    x = np.asarray(x)
    acc = np.zeros(x.shape, dtype=np.result_type(x.dtype, float))
    for rate, weight in zip(model.rates, model.weights):
        acc = acc + weight / (x + rate)
    out = model.modulus - acc
    if omega is not None:
        out = out + x * x / omega**2
    return out[()] if np.ndim(out) == 0 else out


def eval_secular(model: PronyModel, x, k=None):
    """Secular function D [+ x^2/(2k-1)^2] - sum_i b_i / (x + r_i).

    Raises :class:`PoleProximityError` whenever any |x + r_i| falls below
    ``POLE_GUARD * r_i``; the product form stays valid there instead.
    """
    x_arr = np.asarray(x)
    for i, rate in enumerate(model.rates):
        dist = np.min(np.abs(x_arr + rate))
        if dist < POLE_GUARD * rate:
            raise PoleProximityError(pole_index=i, distance=float(dist), rate=float(rate))
    omega = None if k is None else as_mode(k).omega
    return _secular_raw(model, x_arr, omega)


def eval_derivative(model: PronyModel, x, k=None):
    """Analytic derivative of the product form (limit or mode-k polynomial)."""
    x_arr = np.asarray(x)
    t, full, excl = _factor_products(model, x_arr)
    dfull = np.sum(excl, axis=0)
    out = model.modulus * dfull
    n = model.n_terms
    for i in range(n):
        if n == 1:
            continue
        # exclusive products of the factor list with entry i removed
        sub = np.concatenate([t[:i], t[i + 1:]], axis=0)
        prefix = np.ones_like(sub)
        suffix = np.ones_like(sub)
        np.cumprod(sub[:-1], axis=0, out=prefix[1:])
        np.cumprod(sub[:0:-1], axis=0, out=suffix[-2::-1])
        out = out - model.weights[i] * np.sum(prefix * suffix, axis=0)
    if k is not None:
        omega = as_mode(k).omega
        out = out + (2.0 * x_arr * full + x_arr * x_arr * dfull) / omega**2
    return out[()] if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# coefficient expansion
# --------------------------------------------------------------------------

def _convolve(a: list[float], b: list[float], compensated: bool) -> list[float]:
    out = []
    for m in range(len(a) + len(b) - 1):
        terms = [a[i] * b[m - i] for i in range(max(0, m - len(b) + 1), min(m + 1, len(a)))]
        out.append(math.fsum(terms) if compensated else sum(terms))
    return out


def expand_coefficients(model: PronyModel, k=None, compensated: bool = False) -> PolynomialCoeffs:
    """Monomial coefficients (ascending) of the limit or mode-k polynomial.

    The limit polynomial has degree N with leading coefficient D; with a mode
    index the degree is N + 2 and the leading coefficient is 1/(2k-1)^2.
    ``compensated=True`` routes every accumulation through exact summation.
    """
    n = model.n_terms
    rates = model.rates.tolist()

    prefix: list[list[float]] = [[1.0]]
    for rate in rates[:-1]:
        prefix.append(_convolve(prefix[-1], [rate, 1.0], compensated))
    suffix: list[list[float]] = [[1.0]]
    for rate in rates[:0:-1]:
        suffix.append(_convolve(suffix[-1], [rate, 1.0], compensated))
    suffix.reverse()
    base = _convolve(prefix[-1], [rates[-1], 1.0], compensated)  # prod_j (x + r_j)

    acc = math.fsum if compensated else sum
    excl = [_convolve(prefix[i], suffix[i], compensated) for i in range(n)]
    limit = []
    for m in range(n + 1):
        terms = [model.modulus * base[m]]
        terms.extend(-model.weights[i] * excl[i][m] for i in range(n) if m < len(excl[i]))
        limit.append(acc(terms))

    if k is None:
        return PolynomialCoeffs(np.array(limit))

    omega2 = as_mode(k).omega ** 2
    coeffs = [0.0] * (n + 3)
    for m in range(n + 1):
        coeffs[m] += limit[m]
    for m in range(n + 1):
        coeffs[m + 2] = acc([coeffs[m + 2], base[m] / omega2])
    return PolynomialCoeffs(np.array(coeffs))
