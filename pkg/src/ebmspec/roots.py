"""Root finding for the characteristic polynomials.

Two independent routes are kept deliberately separate:

* the structured route — bracketed bisection on the secular function inside
  the pole gaps, Newton polish on the product form, then deflation of the
  bracketed roots to expose the remaining quadratic pair;
* an oracle route — simultaneous (Aberth-Ehrlich) iteration on the expanded
  coefficients, used only to cross-check the structured route.

The bracketed route also owns the labeling subtlety at small mode index: the
perturbation x^2/(2k-1)^2 can push *three* roots into a single pole gap (the
"extra pair" turning real).  Every root of the perturbed secular function is
still at most the corresponding limit root, so the largest root per gap is
the cluster root and the two leftovers form the real extra pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .charpoly import (
    ModeIndex,
    PolynomialCoeffs,
    _char_scale,
    _factor_products,
    _secular_raw,
    as_mode,
    eval_char_poly,
    eval_limit_poly,
    expand_coefficients,
)
from .errors import (
    BracketError,
    DeflationError,
    InterlacingError,
    ModelValidationError,
    OracleConvergenceError,
    PoleProximityError,
    ResidualError,
)
from .model import PronyModel

__all__ = [
    "LimitSpectrum",
    "SpectralCluster",
    "ComplexPair",
    "RealPair",
    "limit_roots",
    "cluster_roots",
    "compute_clusters",
    "oracle_roots",
    "matching_distance",
    "reduced_matrix",
    "eigen_vector",
    "eigen_residual",
    "eigen_residuals",
]

BRACKET_INSET = 1e-10        # pole inset, relative to the local gap
BISECT_REL_WIDTH = 1e-14     # bisection stops at this width relative to r_N
NEWTON_STEPS = 5
ROOT_RESIDUAL_TOL = 1e-10    # scaled residual each root must meet
LIMIT_SECULAR_TOL = 1e-12    # |f(a_j)| < tol * D for limit roots
DEFLATION_TOL = 1e-8         # relative reconstruction error of the deflation
BORDERLINE_DISC = 1e-10      # |discriminant| band treated as a touching pair
ORACLE_TOL = 1e-10           # scaled residual bound for the oracle
POLE_GUARD = 1e-13


# --------------------------------------------------------------------------
# result types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LimitSpectrum:
    """The N interlaced roots of the limit polynomial, largest first."""

    roots: np.ndarray
    secular_residuals: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "roots", _frozen(self.roots))
        object.__setattr__(self, "secular_residuals", _frozen(self.secular_residuals))


@dataclass(frozen=True)
class ComplexPair:
    """Conjugate extra roots real_part +/- i*imag_part.

    ``borderline`` marks a discriminant inside the +/-1e-10 band around zero,
    where the pair is classified as complex with the imaginary part clipped.
    """

    real_part: float
    imag_part: float
    borderline: bool = False

    def __post_init__(self) -> None:
        if self.imag_part < 0.0 or (self.imag_part == 0.0 and not self.borderline):
            raise ModelValidationError("complex pair needs imag_part > 0 unless borderline")

    def roots(self) -> np.ndarray:
        z = complex(self.real_part, self.imag_part)
        return np.array([z, z.conjugate()])

    def root_sum(self) -> float:
        return 2.0 * self.real_part

    def root_product(self) -> float:
        return self.real_part**2 + self.imag_part**2


@dataclass(frozen=True)
class RealPair:
    """Extra pair that degenerated to two real roots (small mode index)."""

    values: tuple[float, float]  # ascending

    def roots(self) -> np.ndarray:
        return np.array([complex(v) for v in self.values])

    def root_sum(self) -> float:
        return self.values[0] + self.values[1]

    def root_product(self) -> float:
        return self.values[0] * self.values[1]


@dataclass(frozen=True)
class SpectralCluster:
    """All N+2 roots of the mode-k characteristic polynomial.

    ``real_roots`` are the interlaced roots (largest first, one per pole
    gap); ``extra_pair`` carries the remaining two roots in either complex or
    degenerate-real form.  Residuals are scaled by the |term|-sum magnitude
    of the product form.
    """

    k: ModeIndex
    real_roots: np.ndarray
    extra_pair: ComplexPair | RealPair
    residuals: np.ndarray
    extra_residual: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "real_roots", _frozen(self.real_roots))
        object.__setattr__(self, "residuals", _frozen(self.residuals))

    @property
    def is_complex(self) -> bool:
        return isinstance(self.extra_pair, ComplexPair)

    def all_roots(self) -> np.ndarray:
        """Real roots (largest first) followed by the extra pair."""
        return np.concatenate([self.real_roots.astype(complex), self.extra_pair.roots()])


def _frozen(arr) -> np.ndarray:
    out = np.asarray(arr, dtype=float).copy()
    out.flags.writeable = False
    return out


# --------------------------------------------------------------------------
# brackets and the bracketed solve
# --------------------------------------------------------------------------

def _brackets(model: PronyModel, upper: float) -> tuple[np.ndarray, np.ndarray]:
    """Pole-gap brackets, largest gap first; ``upper`` caps the top bracket."""
    rates = model.rates
    n = model.n_terms
    lo = np.empty(n)
    hi = np.empty(n)
    lo[0] = -rates[0] + BRACKET_INSET * rates[0]
    hi[0] = upper
    if n > 1:
        gaps = np.diff(rates)
        lo[1:] = -rates[1:] + BRACKET_INSET * gaps
        hi[1:] = -rates[:-1] - BRACKET_INSET * gaps
    return lo, hi


def _bisect(f, lo: np.ndarray, hi: np.ndarray, width: float) -> np.ndarray:
    """Vectorized bisection; every bracket must change sign (negative -> positive)."""
    flo = np.asarray(f(lo))
    fhi = np.asarray(f(hi))
    bad = (flo >= 0.0) | (fhi <= 0.0)
    if np.any(bad):
        j = int(np.argmax(bad))
        raise BracketError(
            f"bracket {j + 1} [{lo[j]!r}, {hi[j]!r}] shows no sign change "
            f"(f(lo)={flo[j]!r}, f(hi)={fhi[j]!r})"
        )
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(200):
        if not np.any(hi - lo > width):
            break
        mid = 0.5 * (lo + hi)
        neg = np.asarray(f(mid)) < 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    return 0.5 * (lo + hi)


def _value_and_slope(model: PronyModel, x, omega: float | None):
    """P(x) and P'(x) through the factored form P = G * f.

    Valid away from the poles, which is where Newton ever runs; both factors
    and their derivatives are numerically benign there.
    """
    x = np.asarray(x, dtype=float)
    t, full, excl = _factor_products(model, x)  # rates axis leads: t is (N,) + x.shape
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / t
        f = model.modulus - np.tensordot(model.weights, inv, axes=(0, 0))
        fp = np.tensordot(model.weights, inv * inv, axes=(0, 0))
    if omega is not None:
        f = f + x * x / omega**2
        fp = fp + 2.0 * x / omega**2
    dfull = np.sum(excl, axis=0)
    return full * f, dfull * f + full * fp


def _newton_polish(model: PronyModel, x: np.ndarray, omega: float | None) -> np.ndarray:
    """Up to NEWTON_STEPS damped-free Newton steps, kept only when |P| drops."""
    x = np.atleast_1d(np.asarray(x, dtype=float)).copy()
    value, slope = _value_and_slope(model, x, omega)
    for _ in range(NEWTON_STEPS):
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(slope != 0.0, value / slope, 0.0)
        if np.all(np.abs(step) <= 1e-17 * (1.0 + np.abs(x))):
            break
        candidate = x - step
        cand_value, cand_slope = _value_and_slope(model, candidate, omega)
        better = np.isfinite(cand_value) & (np.abs(cand_value) <= np.abs(value))
        if not np.any(better):
            break
        x = np.where(better, candidate, x)
        value = np.where(better, cand_value, value)
        slope = np.where(better, cand_slope, slope)
    return x


def limit_roots(model: PronyModel) -> LimitSpectrum:
    """The N simple real roots of the limit polynomial, one per pole gap.

    Bracketed bisection on the secular function (strictly increasing between
    poles), then Newton polish on the product form.  Each root must satisfy
    |f(a_j)| < 1e-12 * D.
    """
    upper = max(0.0, model.n_terms * float(np.max(model.weights)) / model.modulus) + 1.0
    lo, hi = _brackets(model, upper)
    width = BISECT_REL_WIDTH * float(model.rates[-1])
    roots = _bisect(lambda x: _secular_raw(model, x, None), lo, hi, width)
    roots = _newton_polish(model, roots, None)
    residuals = np.abs(np.atleast_1d(_secular_raw(model, roots, None)))
    if np.any(residuals >= LIMIT_SECULAR_TOL * model.modulus):
        j = int(np.argmax(residuals))
        raise ResidualError(
            f"limit root {j + 1} at {roots[j]!r} has secular residual {residuals[j]:.3e} "
            f">= {LIMIT_SECULAR_TOL * model.modulus:.3e}"
        )
    return LimitSpectrum(roots=roots, secular_residuals=residuals)


# --------------------------------------------------------------------------
# deflation of the bracketed roots
# --------------------------------------------------------------------------

def _deflate_to_quadratic(coeffs: PolynomialCoeffs, roots: np.ndarray):
    """Synthetic division by every bracketed root, smallest magnitude first.

    Returns the residual quadratic (ascending) plus the relative
    reconstruction error of quadratic * prod (x - root) against the original
    coefficients.
    """
    desc = coeffs.coeffs[::-1].tolist()
    for root in sorted(roots.tolist(), key=abs):
        quotient = [desc[0]]
        for c in desc[1:-1]:
            quotient.append(c + root * quotient[-1])
        desc = quotient
    if len(desc) != 3:
        raise DeflationError(f"expected a quadratic remainder, got degree {len(desc) - 1}")
    c2, c1, c0 = desc

    recon = [c0, c1, c2]
    for root in sorted(roots.tolist(), key=abs):
        nxt = [0.0] * (len(recon) + 1)
        for m, c in enumerate(recon):
            nxt[m] += -root * c
            nxt[m + 1] += c
        recon = nxt
    orig = coeffs.coeffs
    rel = float(np.max(np.abs(np.asarray(recon) - orig)) / np.max(np.abs(orig)))
    if rel > DEFLATION_TOL:
        raise DeflationError(
            f"deflation reconstruction error {rel:.3e} exceeds {DEFLATION_TOL:.1e}; "
            f"bracketed roots {np.sort(roots)!r} are inconsistent with the coefficients"
        )
    return (c0, c1, c2), rel


def _solve_extra_quadratic(c0: float, c1: float, c2: float) -> ComplexPair | RealPair:
    """Stable closed-form roots of the residual quadratic (c2 > 0)."""
    disc = c1 * c1 - 4.0 * c0 * c2
    if abs(disc) <= BORDERLINE_DISC:
        return ComplexPair(
            real_part=-c1 / (2.0 * c2),
            imag_part=math.sqrt(max(-disc, 0.0)) / (2.0 * c2),
            borderline=True,
        )
    if disc < 0.0:
        return ComplexPair(real_part=-c1 / (2.0 * c2), imag_part=math.sqrt(-disc) / (2.0 * c2))
    sq = math.sqrt(disc)
    qt = -0.5 * (c1 + math.copysign(sq, c1 if c1 != 0.0 else 1.0))
    x1 = qt / c2
    x2 = c0 / qt  # qt != 0 here: disc > BORDERLINE_DISC >= 0 forces |c1| or sq positive
    return RealPair(values=(min(x1, x2), max(x1, x2)))


# --------------------------------------------------------------------------
# cluster roots
# --------------------------------------------------------------------------

def _relabel_with_real_extras(
    model: PronyModel, bracketed: np.ndarray, pair: RealPair
) -> tuple[np.ndarray, RealPair]:
    """Reassign roots when the extra pair is real.

    All N+2 roots are real; the cluster root of a gap is the largest root it
    contains (every root of the perturbed secular function sits at or below
    the limit root of its gap), and the two leftovers are the extra pair.
    """
    rates = model.rates
    n = model.n_terms
    pool = sorted(bracketed.tolist() + list(pair.values), reverse=True)
    uppers = np.concatenate([[math.inf], -rates[:-1]])  # gap j is (-r_j, upper_j)
    lowers = -rates
    labeled = []
    for j in range(n):
        members = [x for x in pool if lowers[j] < x < uppers[j]]
        if not members:
            raise InterlacingError(
                f"no root found in gap {j + 1} ({lowers[j]!r}, {uppers[j]!r}) after relabeling"
            )
        top = members[0]
        labeled.append(top)
        pool.remove(top)
    if len(pool) != 2:
        raise InterlacingError(f"expected 2 leftover roots, got {len(pool)}")
    a1 = labeled[0]
    if not all(-rates[-1] < x < a1 for x in pool):
        raise InterlacingError(
            f"real extra pair {pool!r} falls outside (-r_N, a_1^k) = ({-rates[-1]!r}, {a1!r})"
        )
    return np.asarray(labeled), RealPair(values=(min(pool), max(pool)))


def _polish_complex_pair(model: PronyModel, omega: float, pair: ComplexPair) -> ComplexPair:
    """A few safeguarded complex Newton steps on the product form."""
    if pair.imag_part == 0.0:
        return pair
    z = complex(pair.real_part, pair.imag_part)
    k = ModeIndex((int(omega) + 1) // 2)
    value = complex(eval_char_poly(model, k, z))
    for _ in range(3):
        # derivative from the factored form, fine away from the real poles
        t, full, excl = _factor_products(model, np.asarray(z))
        winv = model.weights / t  # scalar z: both are plain (N,) vectors
        f = model.modulus + z * z / omega**2 - np.sum(winv, axis=0)
        fp = np.sum(winv / t, axis=0) + 2.0 * z / omega**2
        slope = complex(np.sum(excl, axis=0) * f + full * fp)
        if slope == 0:
            break
        candidate = z - value / slope
        cand_value = complex(eval_char_poly(model, k, candidate))
        if abs(cand_value) > abs(value):
            break
        z, value = candidate, cand_value
    return ComplexPair(real_part=z.real, imag_part=abs(z.imag), borderline=pair.borderline)


def cluster_roots(model: PronyModel, k, limits: LimitSpectrum | None = None) -> SpectralCluster:
    """All N+2 roots of the mode-k characteristic polynomial.

    The N interlaced roots come from bracketed bisection + Newton inside the
    pole gaps (upper bracket for the top root is the limit root, which the
    perturbed root never exceeds); the remaining pair comes from deflation
    and the closed-form quadratic.  Scaled residuals above 1e-10 raise.
    """
    mode = as_mode(k)
    omega = mode.omega
    if limits is None:
        limits = limit_roots(model)
    a1 = float(limits.roots[0])
    upper = a1 + 1e-8 * max(1.0, abs(a1))
    lo, hi = _brackets(model, upper)
    width = BISECT_REL_WIDTH * float(model.rates[-1])
    bracketed = _bisect(lambda x: _secular_raw(model, x, omega), lo, hi, width)
    bracketed = _newton_polish(model, bracketed, omega)

    coeffs = expand_coefficients(model, mode)
    quad, _ = _deflate_to_quadratic(coeffs, bracketed)
    extra = _solve_extra_quadratic(*quad)

    if isinstance(extra, RealPair):
        bracketed, extra = _relabel_with_real_extras(model, bracketed, extra)
        bracketed = _newton_polish(model, bracketed, omega)
        polished = _newton_polish(model, np.asarray(extra.values), omega)
        extra = RealPair(values=(float(np.min(polished)), float(np.max(polished))))
    else:
        extra = _polish_complex_pair(model, omega, extra)

    _check_interlacing(model, bracketed, a1)

    residuals = _scaled_residuals(model, mode, bracketed)
    extra_residual = float(np.max(_scaled_residuals(model, mode, extra.roots())))
    worst = max(float(np.max(residuals)), extra_residual)
    if worst >= ROOT_RESIDUAL_TOL:
        raise ResidualError(
            f"mode k={mode.k}: worst scaled root residual {worst:.3e} >= {ROOT_RESIDUAL_TOL:.1e}"
        )
    return SpectralCluster(
        k=mode,
        real_roots=bracketed,
        extra_pair=extra,
        residuals=residuals,
        extra_residual=extra_residual,
    )


def _check_interlacing(model: PronyModel, roots: np.ndarray, a1: float) -> None:
    rates = model.rates
    uppers = np.concatenate([[math.inf], -rates[:-1]])
    if not np.all(np.diff(roots) < 0.0):
        raise InterlacingError(f"cluster roots are not strictly decreasing: {roots!r}")
    inside = (roots > -rates) & (roots < uppers)
    if not np.all(inside):
        j = int(np.argmax(~inside))
        raise InterlacingError(
            f"cluster root {j + 1} at {roots[j]!r} left its gap ({-rates[j]!r}, {uppers[j]!r})"
        )


def _scaled_residuals(model: PronyModel, mode: ModeIndex, points) -> np.ndarray:
    points = np.atleast_1d(np.asarray(points))
    value = np.abs(eval_char_poly(model, mode, points))
    scale = _char_scale(model, mode, points)
    return value / scale


def compute_clusters(
    model: PronyModel, ks, limits: LimitSpectrum | None = None
) -> list[SpectralCluster]:
    """cluster_roots for every k in ``ks`` (shared limit spectrum)."""
    if limits is None:
        limits = limit_roots(model)
    return [cluster_roots(model, k, limits=limits) for k in ks]


# --------------------------------------------------------------------------
# oracle: simultaneous iteration on the expanded coefficients
# --------------------------------------------------------------------------

def _horner_pair(coeffs: np.ndarray, z: np.ndarray):
    p = np.full(z.shape, coeffs[-1], dtype=complex)
    dp = np.zeros(z.shape, dtype=complex)
    for c in coeffs[-2::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _horner_abs(abs_coeffs: np.ndarray, abs_z: np.ndarray) -> np.ndarray:
    out = np.full(np.shape(abs_z), abs_coeffs[-1], dtype=float)
    for c in abs_coeffs[-2::-1]:
        out = out * abs_z + c
    return out


def _initial_circle(coeffs: np.ndarray) -> np.ndarray:
    """Perturbed-circle starting points sized by the Fujiwara root bound."""
    n = coeffs.size - 1
    lead = coeffs[-1]
    radius = 0.0
    for m in range(1, n + 1):
        val = abs(coeffs[n - m] / lead) ** (1.0 / m)
        radius = max(radius, val)
    radius = 2.0 * radius if radius > 0.0 else 1.0
    center = -coeffs[n - 1] / (n * lead)
    angles = 2.0 * np.pi * (np.arange(n) + 0.25) / n + 0.5 / n
    return center + radius * np.exp(1j * angles)


def _symmetrize_conjugates(z: np.ndarray) -> np.ndarray:
    """Enforce conjugate closure on roots of a real polynomial."""
    snap = 1e-9 * (1.0 + np.abs(z))
    real_mask = np.abs(z.imag) <= snap
    out = [complex(x.real, 0.0) for x in z[real_mask]]
    ups = sorted(z[~real_mask & (z.imag > 0)], key=lambda w: (w.real, w.imag))
    downs = list(z[~real_mask & (z.imag < 0)])
    if len(ups) != len(downs):
        raise OracleConvergenceError(
            f"conjugate pairing failed: {len(ups)} upper vs {len(downs)} lower roots"
        )
    for up in ups:
        j = int(np.argmin([abs(up - d.conjugate()) for d in downs]))
        partner = downs.pop(j)
        w = 0.5 * (up + partner.conjugate())
        out.extend([w, w.conjugate()])
    order = np.lexsort((np.imag(out), np.real(out)))
    return np.asarray(out)[order]


def oracle_roots(coeffs: PolynomialCoeffs, max_iterations: int = 500) -> np.ndarray:
    """All roots by simultaneous (Aberth-Ehrlich) iteration.

    Independent of the bracketed route: consumes only the expanded
    coefficients.  A root is accepted once |P(z)| falls below a few ulps of
    the |coefficient|-sum magnitude S(|z|) (the root-neighborhood test:
    double precision cannot distinguish it from an exact root), and frozen
    so the remaining iteration stays deterministic.

    The final residual check uses |P(z)| / max(|lead| * max(1,|z|)^degree,
    S(|z|)) < 1e-10; the second scale matters for wide coefficient ranges
    (large N), where the plain leading-coefficient scale is unreachable in
    double precision even at a correctly rounded root.  Real-coefficient
    inputs get conjugate closure enforced.
    """
    c = coeffs.coeffs
    n = coeffs.degree
    if n < 1:
        raise ModelValidationError("root oracle needs degree >= 1")
    if n == 1:
        roots = np.array([complex(-c[0] / c[1])])
    else:
        abs_c = np.abs(c)
        z = _initial_circle(c)
        frozen = np.zeros(n, dtype=bool)
        for _ in range(max_iterations):
            p, dp = _horner_pair(c, z)
            scale = _horner_abs(abs_c, np.abs(z))
            frozen |= np.abs(p) <= 4.0 * np.finfo(float).eps * scale
            if np.all(frozen):
                break
            with np.errstate(divide="ignore", invalid="ignore"):
                w = np.where(dp != 0, p / dp, 0.1 + 0.1j)
                diff = z[:, None] - z[None, :]
                np.fill_diagonal(diff, 1.0)
                s = np.sum(1.0 / diff, axis=1) - 1.0  # subtract the diagonal fill
                denom = 1.0 - w * s
                corr = np.where(denom != 0, w / denom, w)
            corr = np.where(frozen, 0.0, corr)
            z = z - corr
            if np.all(frozen | (np.abs(corr) <= 1e-14 * (1.0 + np.abs(z)))):
                break
        else:
            raise OracleConvergenceError(
                f"simultaneous iteration did not converge within {max_iterations} iterations"
            )
        roots = _symmetrize_conjugates(z)
    scale = np.maximum(
        abs(coeffs.leading) * np.maximum(1.0, np.abs(roots)) ** n,
        _horner_abs(np.abs(c), np.abs(roots)),
    )
    residual = np.abs(coeffs.evaluate(roots)) / scale
    worst = float(np.max(residual))
    if worst >= ORACLE_TOL:
        raise OracleConvergenceError(
            f"oracle root residual {worst:.3e} exceeds {ORACLE_TOL:.1e}"
        )
    return roots


def matching_distance(a, b) -> float:
    """Optimal-assignment multiset distance (max matched |difference|)."""
    from scipy.optimize import linear_sum_assignment

    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    if a.size != b.size:
        raise ModelValidationError(f"multisets differ in size: {a.size} vs {b.size}")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


# --------------------------------------------------------------------------
# reduced first-order system
# --------------------------------------------------------------------------

def reduced_matrix(model: PronyModel, k) -> np.ndarray:
    """Dense (N+2)x(N+2) matrix of the reduced first-order mode-k system.

    Ordering (position, velocity, N memory variables); its characteristic
    polynomial is proportional to the mode-k characteristic polynomial.
    """
    omega2 = as_mode(k).omega ** 2
    n = model.n_terms
    mat = np.zeros((n + 2, n + 2))
    mat[0, 1] = 1.0
    mat[1, 0] = -model.modulus * omega2
    mat[1, 2:] = -model.weights
    mat[2:, 0] = -omega2
    mat[2:, 2:] = -np.diag(model.rates)
    return mat


def eigen_vector(model: PronyModel, k, lam) -> np.ndarray:
    """Closed-form eigenvector candidate (1, lam, -w^2/(lam+r_1), ...)."""
    omega2 = as_mode(k).omega ** 2
    lam = complex(lam)
    for i, rate in enumerate(model.rates):
        if abs(lam + rate) < POLE_GUARD * rate:
            raise PoleProximityError(pole_index=i, distance=abs(lam + rate), rate=float(rate))
    memory = -omega2 / (lam + model.rates)
    vec = np.concatenate([[1.0, lam], memory])
    return vec.real if lam.imag == 0.0 else vec


def eigen_residual(model: PronyModel, k, lam) -> float:
    """inf-norm residual |A u - lam u| / |u| for the closed-form eigenvector.

    Vanishes (to rounding) exactly when lam is a root of the mode-k
    characteristic polynomial.
    """
    mat = reduced_matrix(model, k)
    vec = eigen_vector(model, k, lam)
    resid = mat @ vec - complex(lam) * vec
    return float(np.max(np.abs(resid)) / np.max(np.abs(vec)))


def eigen_residuals(model: PronyModel, k, lams) -> np.ndarray:
    """eigen_residual for many candidate roots at once (one matrix product)."""
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    mat = reduced_matrix(model, k)
    omega2 = as_mode(k).omega ** 2
    shifted = lams[None, :] + model.rates[:, None]
    if np.any(np.abs(shifted) < POLE_GUARD * model.rates[:, None]):
        i, j = np.unravel_index(
            int(np.argmin(np.abs(shifted) / model.rates[:, None])), shifted.shape
        )
        raise PoleProximityError(
            pole_index=int(i), distance=float(abs(shifted[i, j])), rate=float(model.rates[i])
        )
    vecs = np.vstack([np.ones_like(lams), lams, -omega2 / shifted])
    resid = mat @ vecs - lams[None, :] * vecs
    return np.max(np.abs(resid), axis=0) / np.max(np.abs(vecs), axis=0)
