"""Recovery of the relaxation parameters from two observed root clusters.

Two clusters at different mode indices determine the model: the scaled
difference of their characteristic polynomials is exactly
lambda^2 * prod(lambda + r_j), which hands over the rates; evaluating either
polynomial at -r_i isolates b_i, and the value at 0 plus the recovered
weights pins down the modulus.

The constructive steps are numerically honest but lose digits through the
difference polynomial's root extraction when N is large, so by default the
closed-form estimate is polished by a few deterministic Gauss-Newton steps
on the secular residuals of the observed roots (the observations stay
fixed; only the parameters move).  Everything consumes canonically sorted
root multisets, so input ordering is irrelevant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .charpoly import ModeIndex, PolynomialCoeffs, as_mode, expand_coefficients
from .errors import (
    ConfigError,
    ConjugateClosureError,
    EbmspecError,
    RecoveryError,
)
from .model import PronyModel, model_to_document
from .roots import (
    SpectralCluster,
    cluster_roots,
    limit_roots,
    matching_distance,
    oracle_roots,
)

__all__ = [
    "ClusterObservation",
    "RecoveredModel",
    "TrialResult",
    "PerturbationStudy",
    "poly_from_roots",
    "recover_model",
    "perturbation_study",
]

CLOSURE_TOL = 1e-12       # conjugate-closure tolerance, relative to max(1, |z|)
COEFF_IMAG_TOL = 1e-12    # allowed imaginary residue when combining pairs
LAMBDA2_TOL = 1e-9        # relative size of the two lowest difference coeffs
REFINE_STEPS = 5


# --------------------------------------------------------------------------
# observations
# --------------------------------------------------------------------------

def _closure_defect(roots: np.ndarray) -> float:
    """Largest distance from any root's conjugate to the multiset (relative)."""
    conj = roots.conj()
    dist = np.min(np.abs(roots[None, :] - conj[:, None]), axis=1)
    return float(np.max(dist / np.maximum(1.0, np.abs(roots))))


@dataclass(frozen=True)
class ClusterObservation:
    """An unordered multiset of N+2 observed roots for one mode index.

    Roots are canonicalized (sorted by real part, then imaginary part) on
    construction, which is what makes the downstream recovery independent
    of input ordering.  Non-real roots must come in conjugate pairs.
    """

    k: ModeIndex
    roots: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", as_mode(self.k))
        roots = np.asarray(self.roots, dtype=complex)
        if roots.ndim != 1 or roots.size < 3:
            raise ConfigError("an observation needs a 1-D list of at least 3 roots")
        if not np.all(np.isfinite(roots)):
            raise ConfigError("observed roots must be finite")
        defect = _closure_defect(roots)
        if defect > CLOSURE_TOL:
            raise ConjugateClosureError(
                f"observed roots are not conjugate-closed (defect {defect:.3e} > {CLOSURE_TOL:.1e})"
            )
        order = np.lexsort((roots.imag, roots.real))
        roots = roots[order].copy()
        roots.flags.writeable = False
        object.__setattr__(self, "roots", roots)

    @property
    def n_terms(self) -> int:
        return self.roots.size - 2

    @classmethod
    def from_cluster(cls, cluster: SpectralCluster) -> "ClusterObservation":
        return cls(k=cluster.k, roots=cluster.all_roots())

    @classmethod
    def from_document(cls, doc: dict) -> "ClusterObservation":
        if not isinstance(doc, dict):
            raise ConfigError("observation document must be a JSON object")
        unknown = set(doc) - {"k", "roots"}
        if unknown:
            raise ConfigError(f"unknown observation keys: {sorted(unknown)}")
        if "k" not in doc or "roots" not in doc:
            raise ConfigError("observation document needs 'k' and 'roots'")
        try:
            roots = np.array([complex(re, im) for re, im in doc["roots"]])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"'roots' must be an array of [re, im] pairs: {exc}") from None
        return cls(k=doc["k"], roots=roots)

    def to_document(self) -> dict:
        return {
            "k": self.k.k,
            "roots": [[float(z.real), float(z.imag)] for z in self.roots],
        }

    @classmethod
    def load(cls, path) -> "ClusterObservation":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_document(doc)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_document(), indent=2, sort_keys=True) + "\n")


def _partition_roots(roots: np.ndarray):
    """Split a conjugate-closed multiset into reals and upper/lower pairs."""
    atol = CLOSURE_TOL * np.maximum(1.0, np.abs(roots))
    real_mask = np.abs(roots.imag) <= atol
    reals = sorted(roots[real_mask].real.tolist())
    ups = sorted(roots[~real_mask & (roots.imag > 0)], key=lambda z: (z.real, z.imag))
    downs = list(roots[~real_mask & (roots.imag < 0)])
    if len(ups) != len(downs):
        raise ConjugateClosureError(
            f"cannot pair non-real roots: {len(ups)} upper vs {len(downs)} lower"
        )
    pairs = []
    for up in ups:
        j = int(np.argmin([abs(up - d.conjugate()) for d in downs]))
        pairs.append((up, downs.pop(j)))
    return reals, pairs


def poly_from_roots(roots, leading: float) -> PolynomialCoeffs:
    """Real-coefficient polynomial with the given roots and leading coefficient.

    Conjugate pairs are combined into real quadratic factors before any
    expansion; the imaginary residue of each combined coefficient must stay
    below 1e-12 of its scale and is then discarded.  The factor order is
    canonical, so any permutation of ``roots`` yields identical bits.
    """
    roots = np.atleast_1d(np.asarray(roots, dtype=complex))
    if roots.size == 0:
        raise ConfigError("need at least one root")
    reals, pairs = _partition_roots(roots)
    factors: list[list[float]] = [[-x, 1.0] for x in reals]
    for up, down in pairs:
        total = up + down                    # 2p, ideally real
        product = up * down                  # p^2 + q^2, ideally real
        for value in (total, product):
            if abs(value.imag) > COEFF_IMAG_TOL * max(1.0, abs(value)):
                raise ConjugateClosureError(
                    f"pair combination left imaginary residue {value.imag:.3e} in {value!r}"
                )
        factors.append([product.real, -total.real, 1.0])
    coeffs = [1.0]
    for factor in factors:
        out = [0.0] * (len(coeffs) + len(factor) - 1)
        for i, a in enumerate(coeffs):
            for j, b in enumerate(factor):
                out[i + j] += a * b
        coeffs = out
    return PolynomialCoeffs(np.asarray(coeffs) * float(leading))


# --------------------------------------------------------------------------
# recovery
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RecoveredModel:
    """A recovered model plus the diagnostics of the recovery itself."""

    model: PronyModel
    diagnostics: dict

    @property
    def modulus(self) -> float:
        return self.model.modulus

    def to_document(self) -> dict:
        return {"model": model_to_document(self.model), "diagnostics": self.diagnostics}


def _eval_observed(obs: ClusterObservation, x) -> complex:
    """The observed characteristic polynomial at x, in product form."""
    return (1.0 / obs.k.omega**2) * complex(np.prod(x - obs.roots))


def _refinement_points(obs: ClusterObservation):
    reals, pairs = _partition_roots(obs.roots)
    return [complex(x) for x in reals], [up for up, _ in pairs]


def _secular_rows(theta: np.ndarray, n: int, observations) -> np.ndarray:
    d = theta[0]
    weights = theta[1 : n + 1]
    rates = theta[n + 1 :]
    rows = []
    for obs, (reals, ups) in observations:
        omega2 = obs.k.omega**2
        for z in reals + ups:
            value = d + z * z / omega2 - np.sum(weights / (z + rates))
            rows.append(value.real)
            if z.imag != 0.0:
                rows.append(value.imag)
    return np.asarray(rows)


def _secular_jacobian(theta: np.ndarray, n: int, observations) -> np.ndarray:
    weights = theta[1 : n + 1]
    rates = theta[n + 1 :]
    rows = []
    for obs, (reals, ups) in observations:
        for z in reals + ups:
            shifted = z + rates
            row = np.concatenate([[1.0 + 0.0j], -1.0 / shifted, weights / shifted**2])
            rows.append(row.real)
            if z.imag != 0.0:
                rows.append(row.imag)
    return np.asarray(rows)


def _feasible(theta: np.ndarray, n: int) -> bool:
    if theta[0] <= 0.0 or np.any(theta[1 : n + 1] <= 0.0):
        return False
    rates = theta[n + 1 :]
    return rates[0] > 0.0 and bool(np.all(np.diff(rates) > 0.0))


def _refine_parameters(rates, weights, modulus, obs_pair):
    """Damped Gauss-Newton on the secular residuals of the observed roots.

    Deterministic, at most REFINE_STEPS steps, each kept only if it stays in
    the feasible cone and reduces the residual norm.
    """
    n = rates.size
    observations = [(obs, _refinement_points(obs)) for obs in obs_pair]
    theta = np.concatenate([[modulus], weights, rates])
    initial = float(np.linalg.norm(_secular_rows(theta, n, observations)))
    norm = initial
    iterations = 0
    for _ in range(REFINE_STEPS):
        residual = _secular_rows(theta, n, observations)
        jacobian = _secular_jacobian(theta, n, observations)
        step, *_ = np.linalg.lstsq(jacobian, residual, rcond=None)
        if not np.all(np.isfinite(step)):
            break
        scale = 1.0
        accepted = False
        for _ in range(4):
            candidate = theta - scale * step
            if _feasible(candidate, n):
                cand_norm = float(np.linalg.norm(_secular_rows(candidate, n, observations)))
                if cand_norm < norm:
                    theta, norm = candidate, cand_norm
                    accepted = True
                    break
            scale *= 0.5
        if not accepted:
            break
        iterations += 1
        if np.max(np.abs(scale * step)) <= 1e-15 * np.max(np.abs(theta)):
            break
    return theta[n + 1 :], theta[1 : n + 1], float(theta[0]), initial, norm, iterations


def recover_model(
    obs1: ClusterObservation, obs2: ClusterObservation, *, refine: bool = True
) -> RecoveredModel:
    """Recover rates, weights, and modulus from two clusters at distinct modes.

    Steps: scaled polynomial difference -> divide out lambda^2 -> rate
    polynomial roots -> per-rate weight evaluation -> modulus at 0; then an
    optional (default) Gauss-Newton polish against the observed roots.
    Raises RecoveryError on degenerate or inconsistent inputs.
    """
    if obs1.k.k == obs2.k.k:
        raise RecoveryError(
            "both observations have the same mode index; the polynomial difference degenerates"
        )
    if obs1.roots.size != obs2.roots.size:
        raise RecoveryError(
            f"cluster sizes differ: {obs1.roots.size} vs {obs2.roots.size}"
        )
    if obs1.k.k > obs2.k.k:
        obs1, obs2 = obs2, obs1
    n = obs1.n_terms

    poly1 = poly_from_roots(obs1.roots, 1.0 / obs1.k.omega**2)
    poly2 = poly_from_roots(obs2.roots, 1.0 / obs2.k.omega**2)
    prefactor = 1.0 / (1.0 / obs1.k.omega**2 - 1.0 / obs2.k.omega**2)
    diff = (poly1.coeffs - poly2.coeffs) * prefactor

    scale = float(np.max(np.abs(diff)))
    lambda2_residual = float(max(abs(diff[0]), abs(diff[1])) / scale)
    if lambda2_residual > LAMBDA2_TOL:
        raise RecoveryError(
            f"lambda^2 division residual {lambda2_residual:.3e} exceeds {LAMBDA2_TOL:.1e}; "
            "the two clusters are mutually inconsistent"
        )
    quotient = diff[2:] / diff[-1]  # monic: prod(lambda + r_j)
    rate_poly = PolynomialCoeffs(quotient)
    negated = oracle_roots(rate_poly)
    imag_defect = float(
        np.max(np.abs(negated.imag) / np.maximum(1.0, np.abs(negated)))
    )
    if imag_defect > 1e-9:
        raise RecoveryError(
            f"rate polynomial has a non-real root (imaginary defect {imag_defect:.3e})"
        )
    rates = np.sort(-negated.real)
    if rates[0] <= 0.0 or np.any(np.diff(rates) <= 0.0):
        raise RecoveryError(f"recovered rates are not positive and strictly increasing: {rates!r}")
    rate_residuals = [
        float(abs(rate_poly.evaluate(-r)) / rate_poly.abs_scale(-r)) for r in rates
    ]

    weights = np.empty(n)
    cross = np.empty(n)
    for i, rate in enumerate(rates):
        denom = float(np.prod(np.delete(rates, i) - rate))
        weights[i] = -_eval_observed(obs2, -rate).real / denom
        cross[i] = -_eval_observed(obs1, -rate).real / denom
    if np.any(weights <= 0.0):
        raise RecoveryError(f"recovered weights are not positive: {weights!r}")
    weight_cross_check = float(np.max(np.abs(cross - weights) / weights))

    rate_product = float(np.prod(rates))
    modulus = _eval_observed(obs2, 0.0).real / rate_product + math.fsum(weights / rates)
    modulus_alt = _eval_observed(obs1, 0.0).real / rate_product + math.fsum(weights / rates)
    if modulus <= 0.0:
        raise RecoveryError(f"recovered modulus is not positive: {modulus!r}")
    modulus_cross_check = abs(modulus_alt - modulus) / modulus

    refined = refine
    refine_iterations = 0
    residual_initial = residual_final = None
    if refine:
        rates, weights, modulus, residual_initial, residual_final, refine_iterations = (
            _refine_parameters(rates, weights, modulus, (obs1, obs2))
        )
        order = np.argsort(rates)
        rates = np.asarray(rates)[order]
        weights = np.asarray(weights)[order]

    try:
        model = PronyModel(rates=rates, weights=weights, modulus=modulus)
    except EbmspecError as exc:
        raise RecoveryError(f"refined parameters form no valid model: {exc}") from None

    # forward re-computation diagnostics
    limits = limit_roots(model)
    cluster_match = {}
    charpoly_errors = {}
    for obs in (obs1, obs2):
        forward = cluster_roots(model, obs.k, limits=limits)
        dist = matching_distance(forward.all_roots(), obs.roots)
        cluster_match[obs.k.k] = float(dist / max(1.0, float(rates[-1])))
        observed_poly = poly_from_roots(obs.roots, 1.0 / obs.k.omega**2)
        rebuilt = expand_coefficients(model, obs.k)
        charpoly_errors[obs.k.k] = float(
            np.max(np.abs(rebuilt.coeffs - observed_poly.coeffs))
            / np.max(np.abs(observed_poly.coeffs))
        )

    diagnostics = {
        "k_pair": [obs1.k.k, obs2.k.k],
        "lambda2_residual": lambda2_residual,
        "rate_imag_defect": imag_defect,
        "rate_residuals": rate_residuals,
        "weight_cross_check": weight_cross_check,
        "modulus_cross_check": modulus_cross_check,
        "cluster_match_distances": cluster_match,
        "charpoly_reconstruction_errors": charpoly_errors,
        "refined": refined,
        "refine_iterations": refine_iterations,
        "refine_residual_initial": residual_initial,
        "refine_residual_final": residual_final,
    }
    return RecoveredModel(model=model, diagnostics=diagnostics)


# --------------------------------------------------------------------------
# perturbation study
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TrialResult:
    trial: int
    ok: bool
    rate_error: float
    weight_error: float
    modulus_error: float
    message: str = ""


@dataclass(frozen=True)
class PerturbationStudy:
    """Recovery errors under seeded relative perturbation of the observed roots."""

    noise_level: float
    trials: int
    seed: int
    k_pair: tuple[int, int]
    failures: int
    results: tuple[TrialResult, ...]
    max_rate_error: float
    max_weight_error: float
    max_modulus_error: float

    def to_document(self) -> dict:
        return {
            "noise_level": self.noise_level,
            "trials": self.trials,
            "seed": self.seed,
            "k_pair": list(self.k_pair),
            "failures": self.failures,
            "max_rate_error": self.max_rate_error,
            "max_weight_error": self.max_weight_error,
            "max_modulus_error": self.max_modulus_error,
            "results": [
                {
                    "trial": r.trial,
                    "ok": r.ok,
                    "rate_error": r.rate_error,
                    "weight_error": r.weight_error,
                    "modulus_error": r.modulus_error,
                    "message": r.message,
                }
                for r in self.results
            ],
        }


def _perturbed_observation(cluster: SpectralCluster, noise: float, rng) -> ClusterObservation:
    """Relative noise per root; a conjugate pair is perturbed jointly (p and q)."""
    n = cluster.real_roots.size
    reals = cluster.real_roots * (1.0 + noise * rng.uniform(-1.0, 1.0, size=n))
    u1, u2 = rng.uniform(-1.0, 1.0, size=2)
    pair = cluster.extra_pair
    if cluster.is_complex:
        p = pair.real_part * (1.0 + noise * u1)
        q = pair.imag_part * (1.0 + noise * u2)
        extra = [complex(p, q), complex(p, -q)]
    else:
        extra = [
            complex(pair.values[0] * (1.0 + noise * u1)),
            complex(pair.values[1] * (1.0 + noise * u2)),
        ]
    return ClusterObservation(
        k=cluster.k, roots=np.concatenate([reals.astype(complex), extra])
    )


def perturbation_study(
    model: PronyModel,
    k1: int,
    k2: int,
    noise_level: float,
    trials: int,
    seed: int = 0,
) -> PerturbationStudy:
    """Recovery error table under uniform relative noise on the observed roots.

    Reproducible: trial t draws from default_rng([seed, t]).  Failed
    recoveries are counted, never raised.
    """
    if noise_level < 0.0:
        raise ConfigError("noise level must be >= 0")
    if trials < 1:
        raise ConfigError("need at least one trial")
    mode1, mode2 = as_mode(k1), as_mode(k2)
    if mode1.k == mode2.k:
        raise ConfigError("perturbation study needs two distinct mode indices")
    limits = limit_roots(model)
    base = [cluster_roots(model, m, limits=limits) for m in (mode1, mode2)]

    results = []
    failures = 0
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        try:
            obs = [_perturbed_observation(c, noise_level, rng) for c in base]
            recovered = recover_model(obs[0], obs[1])
        except EbmspecError as exc:
            failures += 1
            results.append(
                TrialResult(
                    trial=trial,
                    ok=False,
                    rate_error=math.nan,
                    weight_error=math.nan,
                    modulus_error=math.nan,
                    message=str(exc),
                )
            )
            continue
        got = recovered.model
        if got.n_terms != model.n_terms:
            failures += 1
            results.append(
                TrialResult(
                    trial=trial,
                    ok=False,
                    rate_error=math.nan,
                    weight_error=math.nan,
                    modulus_error=math.nan,
                    message=f"recovered {got.n_terms} terms, expected {model.n_terms}",
                )
            )
            continue
        results.append(
            TrialResult(
                trial=trial,
                ok=True,
                rate_error=float(np.max(np.abs(got.rates - model.rates) / model.rates)),
                weight_error=float(np.max(np.abs(got.weights - model.weights) / model.weights)),
                modulus_error=abs(got.modulus - model.modulus) / model.modulus,
            )
        )
    ok_results = [r for r in results if r.ok]
    return PerturbationStudy(
        noise_level=noise_level,
        trials=trials,
        seed=seed,
        k_pair=(mode1.k, mode2.k),
        failures=failures,
        results=tuple(results),
        max_rate_error=max((r.rate_error for r in ok_results), default=0.0),
        max_weight_error=max((r.weight_error for r in ok_results), default=0.0),
        max_modulus_error=max((r.modulus_error for r in ok_results), default=0.0),
    )
