"""Convergence quantification, identity checks, and the explicit mode threshold.

Everything here consumes the rootfinder's output and reduces it to numbers a
report (or a test) can assert on:

* convergence_table — per-root errors against the limit spectrum, with the
  empirical rate constants (k^-2 for the real roots and the pair's real
  part, k^-1 for the imaginary part);
* explicit_k0 — the closed-form certificate constants guaranteeing that far
  enough up the mode ladder the extra pair is complex and every real root is
  simple and localized;
* verify_bounds — measured slack for each structural inequality over a k
  range.

The rate constants in the convergence guarantees are existential, so the
report carries empirical suprema over the computed range, never claimed
bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .charpoly import eval_limit_poly
from .errors import ConfigError, ModelValidationError
from .model import PronyModel
from .roots import (
    ComplexPair,
    LimitSpectrum,
    SpectralCluster,
    cluster_roots,
    compute_clusters,
    limit_roots,
)

__all__ = [
    "RealRootRow",
    "PairRow",
    "ConvergenceReport",
    "K0Certificate",
    "BoundCheck",
    "BoundReport",
    "convergence_table",
    "explicit_k0",
    "verify_bounds",
    "trace_gap",
    "coefficient_identity_gap",
    "rep_d_value",
    "first_complex_k",
]


# --------------------------------------------------------------------------
# convergence report
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RealRootRow:
    """One (root index, mode) entry: error against the limit root and its k^2 scaling."""

    j: int
    k: int
    limit_root: float
    root: float
    error: float      # a_j - a_j^k  (one-sided: >= 0 up to rounding)
    k2_error: float   # k^2 * error


@dataclass(frozen=True)
class PairRow:
    """One mode's extra complex pair against its large-k asymptotics."""

    k: int
    real_part: float
    imag_part: float
    real_error: float          # |p^k - p_limit|
    imag_error_scaled: float   # (2k-1) * |q^k - (2k-1) sqrt(D)|


@dataclass(frozen=True)
class ConvergenceReport:
    """Errors of every cluster root against its limit, over a ladder of modes.

    m1/m2/m3 are the empirical rate constants: suprema of k^2*(a_j - a_j^k),
    k^2*|p^k - p_limit| and (2k-1)*|q^k - (2k-1)*sqrt(D)| over the range.
    Modes whose extra pair degenerated to two real roots are listed in
    skipped_pair_modes and excluded from the pair columns.
    """

    ks: tuple[int, ...]
    real_rows: tuple[RealRootRow, ...]
    pair_rows: tuple[PairRow, ...]
    skipped_pair_modes: tuple[int, ...]
    p_limit: float
    q_slope: float
    m1: float
    m2: float
    m3: float

    def rows_for(self, j: int) -> tuple[RealRootRow, ...]:
        return tuple(row for row in self.real_rows if row.j == j)


def _validated_k_list(k_list) -> list[int]:
    ks = [int(k) for k in k_list]
    if not ks:
        raise ConfigError("mode list must be nonempty")
    if any(k < 1 for k in ks):
        raise ConfigError("mode indices must be >= 1")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ConfigError("mode list must be strictly ascending")
    return ks


def convergence_table(
    model: PronyModel,
    k_list: Iterable[int],
    *,
    limits: LimitSpectrum | None = None,
    clusters: Iterable[SpectralCluster] | None = None,
) -> ConvergenceReport:
    """Per-root convergence errors for every mode in ``k_list``.

    ``clusters`` may be supplied (matching k_list) to reuse cached roots.
    """
    ks = _validated_k_list(k_list)
    if limits is None:
        limits = limit_roots(model)
    if clusters is None:
        clusters = compute_clusters(model, ks, limits=limits)
    else:
        clusters = list(clusters)
        if [c.k.k for c in clusters] != ks:
            raise ConfigError("supplied clusters do not match the mode list")

    p_limit = -math.fsum(model.weights) / (2.0 * model.modulus)
    q_slope = math.sqrt(model.modulus)

    real_rows: list[RealRootRow] = []
    pair_rows: list[PairRow] = []
    skipped: list[int] = []
    for k, cluster in zip(ks, clusters):
        for j in range(model.n_terms):
            a = float(limits.roots[j])
            ak = float(cluster.real_roots[j])
            err = a - ak
            real_rows.append(
                RealRootRow(j=j + 1, k=k, limit_root=a, root=ak, error=err, k2_error=k * k * err)
            )
        pair = cluster.extra_pair
        if isinstance(pair, ComplexPair):
            omega = cluster.k.omega
            pair_rows.append(
                PairRow(
                    k=k,
                    real_part=pair.real_part,
                    imag_part=pair.imag_part,
                    real_error=abs(pair.real_part - p_limit),
                    imag_error_scaled=omega * abs(pair.imag_part - omega * q_slope),
                )
            )
        else:
            skipped.append(k)

    m1 = max((row.k2_error for row in real_rows), default=0.0)
    m2 = max((row.k * row.k * row.real_error for row in pair_rows), default=0.0)
    m3 = max((row.imag_error_scaled for row in pair_rows), default=0.0)
    return ConvergenceReport(
        ks=tuple(ks),
        real_rows=tuple(real_rows),
        pair_rows=tuple(pair_rows),
        skipped_pair_modes=tuple(skipped),
        p_limit=p_limit,
        q_slope=q_slope,
        m1=m1,
        m2=m2,
        m3=m3,
    )


# --------------------------------------------------------------------------
# explicit mode threshold
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class K0Certificate:
    """Closed-form constants certifying the spectral structure for k >= k0.

    mu is a pole-separation radius, radius_bound an outer bound on all
    roots, delta a localization radius, epsilon a slope floor, m_floor a
    polynomial magnitude floor; k0 is the resulting (very conservative)
    threshold.
    """

    b_max: float
    b_min: float
    r_gap: float
    mu: float
    radius_bound: float
    delta: float
    epsilon: float
    m_floor: float
    k0_raw: float
    k0: int


def explicit_k0(model: PronyModel) -> K0Certificate:
    """Evaluate the certificate constants for a model with N >= 2 terms.

    The defining formulas involve the minimum adjacent rate gap raised to
    N-2, which has no sane reading for a single term; N=1 is rejected.
    """
    n = model.n_terms
    if n < 2:
        raise ModelValidationError(
            "the explicit mode threshold needs at least two relaxation terms"
        )
    rates = model.rates
    d = model.modulus
    b_max = float(np.max(model.weights))
    b_min = float(np.min(model.weights))
    r_gap = float(np.min(np.diff(rates)))
    r_top = float(rates[-1])
    mu = min(
        b_min
        * r_gap ** (n - 1)
        / (4.0 * d * (2.0 * r_top) ** (n - 1) + 4.0 * n * b_max * (2.0 * r_top) ** (n - 2) + 1.0),
        r_gap / 4.0,
        float(rates[0]) / 4.0,
    )
    radius_bound = 2.0 * r_top + n * b_max / d + 1.0
    delta = r_gap ** (n - 2) / (2.0 * n * radius_bound ** (n - 2)) * mu
    epsilon = d * mu * r_gap ** (n - 2) / 4.0
    m_floor = d * mu * delta * r_gap ** (n - 2) / 2.0
    k0_raw = (
        radius_bound ** ((n + 2) / 2.0) / math.sqrt(m_floor)
        + radius_bound ** ((n + 1) / 2.0) / math.sqrt(epsilon)
        + 1.0
    )
    return K0Certificate(
        b_max=b_max,
        b_min=b_min,
        r_gap=r_gap,
        mu=mu,
        radius_bound=radius_bound,
        delta=delta,
        epsilon=epsilon,
        m_floor=m_floor,
        k0_raw=k0_raw,
        k0=int(math.ceil(k0_raw)),
    )


# --------------------------------------------------------------------------
# identity helpers (shared by tests, bound report, CLI)
# --------------------------------------------------------------------------

def trace_gap(model: PronyModel, cluster: SpectralCluster) -> float:
    """Relative defect of the trace identity sum(roots) = -sum(r_j)."""
    total = math.fsum(cluster.real_roots) + cluster.extra_pair.root_sum()
    target = -math.fsum(model.rates)
    return abs(total - target) / max(1.0, abs(target))


def coefficient_identity_gap(model: PronyModel, cluster: SpectralCluster) -> float:
    """Relative defect of the lambda^N coefficient identity.

    Comparing the degree-N coefficient of the product and structural forms:
    e2(r) + D*(2k-1)^2 = e2(a^k) + (pair product) + (pair sum)*sum(a^k),
    where e2 is the sum over unordered pairs.
    """
    rates = model.rates
    roots = cluster.real_roots
    e2_rates = 0.5 * (math.fsum(rates) ** 2 - math.fsum(rates * rates))
    e2_roots = 0.5 * (math.fsum(roots) ** 2 - math.fsum(roots * roots))
    lhs = e2_rates + model.modulus * cluster.k.omega ** 2
    rhs = (
        e2_roots
        + cluster.extra_pair.root_product()
        + cluster.extra_pair.root_sum() * math.fsum(roots)
    )
    return abs(lhs - rhs) / max(1.0, abs(lhs))


def rep_d_value(model: PronyModel, limits: LimitSpectrum | None = None) -> float:
    """The modulus reconstructed from the limit roots: sum(b) / sum(a_j + r_j)."""
    if limits is None:
        limits = limit_roots(model)
    return math.fsum(model.weights) / math.fsum(limits.roots + model.rates)


def first_complex_k(model: PronyModel, k_max: int = 50) -> int | None:
    """Smallest mode index whose extra pair is complex (None if none up to k_max)."""
    limits = limit_roots(model)
    for k in range(1, k_max + 1):
        if cluster_roots(model, k, limits=limits).is_complex:
            return k
    return None


# --------------------------------------------------------------------------
# bound verification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundCheck:
    """Outcome of one structural inequality with its measured slack."""

    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str
    violations: tuple = ()


@dataclass(frozen=True)
class BoundReport:
    """Measured slack for every verified inequality over a mode range."""

    checks: tuple[BoundCheck, ...]
    skipped: tuple[str, ...] = ()

    def __getitem__(self, name: str) -> BoundCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)


def verify_bounds(model: PronyModel, k_range: Iterable[int]) -> BoundReport:
    """Measure every structural inequality over ``k_range``.

    Violations land in the report (never exceptions).  Checks that need the
    certificate constants (pole-neighborhood floor, limit-root separation)
    are skipped for N=1, where the certificate is undefined.
    """
    ks = _validated_k_list(k_range)
    n = model.n_terms
    rates = model.rates
    limits = limit_roots(model)
    clusters = compute_clusters(model, ks, limits=limits)
    checks: list[BoundCheck] = []
    skipped: list[str] = []
    slop = 1e-10 * float(rates[-1])

    # interlacing: every cluster root strictly inside its pole gap
    margin = math.inf
    violations = []
    uppers = np.concatenate([[math.inf], -rates[:-1]])
    for k, cluster in zip(ks, clusters):
        lo_margin = np.min(cluster.real_roots + rates)
        hi_margin = np.min(np.minimum(uppers - cluster.real_roots, math.inf)[1:], initial=math.inf)
        local = float(min(lo_margin, hi_margin))
        if local < margin:
            margin = local
        if local <= 0.0:
            violations.append(k)
    checks.append(
        BoundCheck(
            name="interlacing",
            passed=not violations,
            measured=margin,
            threshold=0.0,
            detail="min distance of any cluster root to its enclosing poles",
            violations=tuple(violations),
        )
    )

    # trace identity
    worst_trace = 0.0
    violations = []
    for k, cluster in zip(ks, clusters):
        gap = trace_gap(model, cluster)
        worst_trace = max(worst_trace, gap)
        if gap > 1e-9:
            violations.append(k)
    checks.append(
        BoundCheck(
            name="trace-identity",
            passed=not violations,
            measured=worst_trace,
            threshold=1e-9,
            detail="max relative defect of sum(roots) = -sum(rates)",
            violations=tuple(violations),
        )
    )

    # extra-pair location
    slack = math.inf
    violations = []
    for k, cluster in zip(ks, clusters):
        a1k = float(cluster.real_roots[0])
        pair = cluster.extra_pair
        if isinstance(pair, ComplexPair):
            if n == 1:
                # the strip degenerates: 2p = -r_1 - a_1^k exactly
                local = slop - abs(2.0 * pair.real_part + rates[0] + a1k)
            else:
                lo = 0.5 * (-rates[-1] - a1k)
                hi = 0.5 * (-rates[0] - a1k)
                local = min(pair.real_part - lo, hi - pair.real_part)
        else:
            local = min(
                min(pair.values) + rates[-1], a1k - max(pair.values)
            )
        slack = min(slack, float(local))
        if local <= -slop:
            violations.append(k)
    checks.append(
        BoundCheck(
            name="extra-pair-location",
            passed=not violations,
            measured=slack,
            threshold=0.0,
            detail="min slack of the pair inside its trace-implied strip "
            "(complex) or inside (-r_N, a_1^k) (real)",
            violations=tuple(violations),
        )
    )

    # top limit root bound a_1 <= N*B/D
    bound = n * float(np.max(model.weights)) / model.modulus
    a1 = float(limits.roots[0])
    checks.append(
        BoundCheck(
            name="top-root-bound",
            passed=a1 <= bound + slop,
            measured=bound - a1,
            threshold=0.0,
            detail="slack of a_1 <= N*max(b)/D",
        )
    )

    if n >= 2:
        cert = explicit_k0(model)
        floor = cert.b_min * cert.r_gap ** (n - 1) / 2.0

        # |limit polynomial| floor on the mu-neighborhood of each pole
        min_val = math.inf
        violations = []
        for i, rate in enumerate(rates):
            grid = np.linspace(-rate - cert.mu, -rate + cert.mu, 10_000)
            local = float(np.min(np.abs(eval_limit_poly(model, grid))))
            min_val = min(min_val, local)
            if local < floor:
                violations.append(i + 1)
        checks.append(
            BoundCheck(
                name="pole-neighborhood-floor",
                passed=not violations,
                measured=min_val,
                threshold=floor,
                detail="min |P_N| over 10^4-point grids on [-r_i - mu, -r_i + mu]",
                violations=tuple(violations),
            )
        )

        # limit-root separation
        sep = float(np.min(np.abs(np.diff(limits.roots))))
        checks.append(
            BoundCheck(
                name="limit-root-separation",
                passed=sep >= 2.0 * cert.mu,
                measured=sep,
                threshold=2.0 * cert.mu,
                detail="min |a_i - a_j| against 2*mu",
            )
        )
    else:
        skipped.extend(["pole-neighborhood-floor", "limit-root-separation"])

    # adjacent-cluster gaps against the empirical rate constant
    errors = {
        (k, j): float(limits.roots[j] - cluster.real_roots[j])
        for k, cluster in zip(ks, clusters)
        for j in range(n)
    }
    m1_hat = max((k * k * e for (k, _), e in errors.items()), default=0.0)
    consecutive = [
        (k1, i1, i2)
        for i1, k1 in enumerate(ks)
        for i2, k2 in enumerate(ks)
        if k2 == k1 + 1
    ]
    if consecutive:
        worst_ratio = 0.0
        violations = []
        tol = max(2.0 * m1_hat, 1e-12)
        for k, i1, i2 in consecutive:
            gaps = np.abs(clusters[i2].real_roots - clusters[i1].real_roots)
            ratio = float(np.max(gaps) * k * k)
            worst_ratio = max(worst_ratio, ratio)
            if ratio > tol:
                violations.append(k)
        checks.append(
            BoundCheck(
                name="adjacent-cluster-gap",
                passed=not violations,
                measured=worst_ratio,
                threshold=tol,
                detail="max k^2 * |a_j^(k+1) - a_j^k| against twice the empirical "
                f"rate constant (m1_hat = {m1_hat:.6g})",
                violations=tuple(violations),
            )
        )
    else:
        skipped.append("adjacent-cluster-gap")

    return BoundReport(checks=tuple(checks), skipped=tuple(skipped))
