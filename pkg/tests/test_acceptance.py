"""Acceptance gate: the nine headline guarantees, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; each test asserts the criterion at its stated tolerance over the full
preset grid (N in {1,2,5,9} x D in {0.5,1,5}, h=1, r_i=5i, equal
contributions).
"""

import csv
import io
import math

import numpy as np
import pytest
from click.testing import CliRunner

from ebmspec import (
    ClusterObservation,
    eigen_residuals,
    expand_coefficients,
    explicit_k0,
    get_preset,
    matching_distance,
    oracle_roots,
    recover_model,
    rep_d_value,
    trace_gap,
)
from ebmspec.analysis import coefficient_identity_gap
from ebmspec.cli import main as cli_main

CRITICAL_PRESETS = ("n1-d1", "n2-d1", "n5-d1", "n9-d1")


def _verdict(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"criterion {num}: {detail}"


# --------------------------------------------------------------------------
# 1. interlacing & count
# --------------------------------------------------------------------------

def test_criterion_1_interlacing_and_count(preset_sweeps):
    worst_residual = 0.0
    min_margin = math.inf
    count_ok = True
    for name, (model, _, clusters) in preset_sweeps.items():
        fences_hi = np.concatenate([[math.inf], -model.rates[:-1]])
        fences_lo = -model.rates
        for cluster in clusters:
            roots = cluster.real_roots
            count_ok &= roots.size == model.n_terms
            margin = min(
                float(np.min(roots - fences_lo)),
                float(np.min((fences_hi - roots)[1:], initial=math.inf)),
            )
            min_margin = min(min_margin, margin)
            worst_residual = max(worst_residual, float(np.max(cluster.residuals)))
    ok = count_ok and min_margin > 0.0 and worst_residual < 1e-10
    _verdict(
        1,
        ok,
        f"N roots per cluster over k=1..200, min bracket margin {min_margin:.3e}, "
        f"max scaled residual {worst_residual:.3e} (< 1e-10)",
    )


# --------------------------------------------------------------------------
# 2. oracle equivalence
# --------------------------------------------------------------------------

def test_criterion_2_oracle_equivalence(preset_sweeps):
    worst = 0.0
    for name, (model, _, clusters) in preset_sweeps.items():
        tol_scale = max(1.0, float(model.rates[-1]))
        for cluster in clusters[:50]:
            coeffs = expand_coefficients(model, cluster.k)
            distance = matching_distance(cluster.all_roots(), oracle_roots(coeffs))
            worst = max(worst, distance / tol_scale)
    _verdict(
        2,
        worst < 1e-9,
        f"max scaled multiset distance to the simultaneous-iteration oracle "
        f"{worst:.3e} over all presets, k=1..50 (< 1e-9)",
    )


# --------------------------------------------------------------------------
# 3. algebraic identities
# --------------------------------------------------------------------------

def test_criterion_3_algebraic_identities(preset_sweeps):
    worst_trace = worst_coeff = worst_secular = worst_rep = 0.0
    for name, (model, limits, clusters) in preset_sweeps.items():
        rates, weights, d = model.rates, model.weights, model.modulus

        worst_rep = max(worst_rep, abs(rep_d_value(model, limits) - d) / d)

        # secular identity at the limit roots: sum_i b_i/(a_j + r_i) = D
        terms = weights / (limits.roots[:, None] + rates)
        defect = np.abs(terms.sum(axis=1) - d) / np.maximum(1.0, np.abs(terms).sum(axis=1))
        worst_secular = max(worst_secular, float(np.max(defect)))

        for cluster in clusters:
            worst_trace = max(worst_trace, trace_gap(model, cluster))
            worst_coeff = max(worst_coeff, coefficient_identity_gap(model, cluster))
            # perturbed secular identity at each cluster root
            roots = cluster.real_roots
            terms = weights / (roots[:, None] + rates)
            target = d + roots**2 / cluster.k.omega**2
            defect = np.abs(terms.sum(axis=1) - target) / np.maximum(
                1.0, np.abs(terms).sum(axis=1)
            )
            worst_secular = max(worst_secular, float(np.max(defect)))
    ok = (
        worst_trace < 1e-9
        and worst_rep < 1e-10
        and worst_secular < 1e-10
        and worst_coeff < 1e-8
    )
    _verdict(
        3,
        ok,
        f"trace {worst_trace:.3e} (<1e-9), modulus-from-roots {worst_rep:.3e} (<1e-10), "
        f"secular {worst_secular:.3e} (<1e-10), degree-N coefficient {worst_coeff:.3e} (<1e-8)",
    )


# --------------------------------------------------------------------------
# 4. convergence rates
# --------------------------------------------------------------------------

def _decile_ratio(values: np.ndarray, floor: float = 1e-8) -> float:
    width = max(1, values.size // 10)
    head = max(float(np.max(values[:width])), floor)
    tail = max(float(np.max(values[-width:])), floor)
    return tail / head


def test_criterion_4_convergence_rates(preset_sweeps):
    worst_ratio = 0.0
    one_sided_floor = 0.0
    for name, (model, limits, clusters) in preset_sweeps.items():
        errors = np.array([limits.roots - c.real_roots for c in clusters])  # (200, N)
        one_sided_floor = min(one_sided_floor, float(np.min(errors)))

        window = [c for c in clusters if c.k.k >= 20]
        ks = np.array([c.k.k for c in window], dtype=float)
        win_errors = np.array([limits.roots - c.real_roots for c in window])
        for j in range(model.n_terms):
            worst_ratio = max(worst_ratio, _decile_ratio(ks**2 * win_errors[:, j]))

        pairs = [c for c in window if c.is_complex]
        assert len(pairs) == len(window), f"{name}: real extras above k=20"
        p_limit = -math.fsum(model.weights) / (2.0 * model.modulus)
        sqrt_d = math.sqrt(model.modulus)
        omegas = np.array([c.k.omega for c in pairs])
        p_err = np.array([abs(c.extra_pair.real_part - p_limit) for c in pairs])
        q_err = np.array(
            [abs(c.extra_pair.imag_part - c.k.omega * sqrt_d) for c in pairs]
        )
        worst_ratio = max(worst_ratio, _decile_ratio(ks**2 * p_err))
        worst_ratio = max(worst_ratio, _decile_ratio(omegas * q_err))
    ok = worst_ratio <= 4.0 and one_sided_floor >= -1e-12
    _verdict(
        4,
        ok,
        f"max last/first-decile ratio of the scaled error sequences {worst_ratio:.3f} "
        f"(<= 4) over k=20..200; one-sidedness floor {one_sided_floor:.3e} (>= -1e-12)",
    )


# --------------------------------------------------------------------------
# 5. quasi-static mode
# --------------------------------------------------------------------------

def test_criterion_5_quasi_static_mode(preset_sweeps):
    worst = 0.0
    for name in CRITICAL_PRESETS:
        _, limits, clusters = preset_sweeps[name]
        worst = max(worst, abs(float(limits.roots[0])))
        worst = max(worst, max(abs(float(c.real_roots[0])) for c in clusters))
    _verdict(
        5,
        worst < 1e-12,
        f"quasi-static root magnitude {worst:.3e} across D=h presets, "
        f"limit and every k=1..200 (< 1e-12)",
    )


# --------------------------------------------------------------------------
# 6. eigen residual
# --------------------------------------------------------------------------

def test_criterion_6_eigen_residual(preset_sweeps):
    worst = 0.0
    for name, (model, _, clusters) in preset_sweeps.items():
        for cluster in clusters:
            res = eigen_residuals(model, cluster.k, cluster.all_roots())
            worst = max(worst, float(np.max(res)))
    _verdict(
        6,
        worst < 1e-8,
        f"max reduced-matrix eigenpair residual {worst:.3e} over every root (< 1e-8)",
    )


# --------------------------------------------------------------------------
# 7. inverse round trip
# --------------------------------------------------------------------------

def test_criterion_7_inverse_round_trip(preset_sweeps):
    worst_param = 0.0
    worst_lambda2 = 0.0
    permutation_ok = True
    rng = np.random.default_rng(2024)
    for name, (model, _, clusters) in preset_sweeps.items():
        for k1, k2 in ((1, 2), (3, 7), (1, 10)):
            obs1 = ClusterObservation.from_cluster(clusters[k1 - 1])
            obs2 = ClusterObservation.from_cluster(clusters[k2 - 1])
            recovered = recover_model(obs1, obs2)
            m = recovered.model
            worst_param = max(
                worst_param,
                float(np.max(np.abs(m.rates - model.rates) / model.rates)),
                float(np.max(np.abs(m.weights - model.weights) / model.weights)),
                abs(m.modulus - model.modulus) / model.modulus,
            )
            worst_lambda2 = max(worst_lambda2, recovered.diagnostics["lambda2_residual"])

            shuffled = recover_model(
                ClusterObservation(k1, rng.permutation(obs1.roots)),
                ClusterObservation(k2, rng.permutation(obs2.roots)),
            )
            permutation_ok &= np.array_equal(shuffled.model.rates, m.rates)
            permutation_ok &= np.array_equal(shuffled.model.weights, m.weights)
            permutation_ok &= shuffled.model.modulus == m.modulus
    ok = worst_param < 1e-8 and worst_lambda2 < 1e-9 and permutation_ok
    _verdict(
        7,
        ok,
        f"max relative parameter error {worst_param:.3e} (<1e-8), max lambda^2 "
        f"division residual {worst_lambda2:.3e} (<1e-9), permutation-invariant: "
        f"{permutation_ok}, over all presets and pairs (1,2),(3,7),(1,10)",
    )


# --------------------------------------------------------------------------
# 8. explicit mode threshold
# --------------------------------------------------------------------------

def test_criterion_8_threshold_certificate():
    cert = explicit_k0(get_preset("n2-d1"))
    exact_ok = cert.mu == 12.5 / 121.0 and cert.radius_bound == 31.0
    hand_value = 27386.40143342415  # independent hand evaluation of the formula
    within = abs(cert.k0_raw - hand_value) <= 0.01 * hand_value

    invariants_ok = True
    for n in (2, 5, 9):
        for d in (0.5, 1.0, 5.0):
            model = get_preset(f"n{n}-d{d:g}")
            c = explicit_k0(model)
            r_gap = float(np.min(np.diff(model.rates)))
            invariants_ok &= 0.0 < c.mu <= min(r_gap, float(model.rates[0])) / 4.0
            invariants_ok &= c.radius_bound == 2.0 * model.rates[-1] + n * c.b_max / d + 1.0
            invariants_ok &= c.delta == r_gap ** (n - 2) / (2.0 * n * c.radius_bound ** (n - 2)) * c.mu
            invariants_ok &= c.epsilon == d * c.mu * r_gap ** (n - 2) / 4.0
            invariants_ok &= c.m_floor == d * c.mu * c.delta * r_gap ** (n - 2) / 2.0
            invariants_ok &= c.k0 == math.ceil(c.k0_raw) and c.k0 >= 1
    ok = exact_ok and within and invariants_ok
    _verdict(
        8,
        ok,
        f"worked example mu = 12.5/121 and radius 31 exact: {exact_ok}; k0_raw "
        f"{cert.k0_raw:.1f} within 1% of hand value {hand_value:.1f}: {within}; "
        f"formula invariants on all N>=2 presets: {invariants_ok}",
    )


# --------------------------------------------------------------------------
# 9. figure reproduction
# --------------------------------------------------------------------------

def _read_rows(path):
    return list(csv.DictReader(io.StringIO(path.read_text())))


def test_criterion_9_figure_reproduction(tmp_path):
    runner = CliRunner()
    dirs = (tmp_path / "first", tmp_path / "second")
    for out_dir in dirs:
        result = runner.invoke(
            cli_main, ["reproduce-figures", "--out-dir", str(out_dir)]
        )
        assert result.exit_code == 0, result.stderr

    out = dirs[0]
    spectrum_files = sorted(out.glob("spectrum-*.csv"))
    converge_real = sorted(out.glob("converge-*-real.csv"))
    counts_ok = len(spectrum_files) == 6 and len(converge_real) == 3

    structure_ok = True
    for path in spectrum_files:
        name = path.stem.replace("spectrum-", "")
        model = get_preset(name)
        rows = _read_rows(path)
        structure_ok &= len(rows) == 100 * (model.n_terms + 2)
        for row in rows:
            if row["kind"] == "real" and int(row["index"]) <= model.n_terms:
                j = int(row["index"])
                re = float(row["re"])
                lo = -model.rates[j - 1]
                hi = -model.rates[j - 2] if j > 1 else math.inf
                structure_ok &= lo < re < hi

    monotone_ok = True
    growth_ok = True
    for path in converge_real:
        name = path.stem.replace("converge-", "").replace("-real", "")
        model = get_preset(name)
        rows = _read_rows(path)
        for j in range(1, model.n_terms + 1):
            col = [float(r["root"]) for r in rows if int(r["j"]) == j]
            monotone_ok &= all(b - a >= -1e-12 for a, b in zip(col, col[1:]))
        pair_rows = _read_rows(path.with_name(path.name.replace("-real", "-pair")))
        sqrt_d = math.sqrt(model.modulus)
        tail = pair_rows[-1]
        omega = 2.0 * int(tail["k"]) - 1.0
        # |q - omega*sqrt(D)| stays O(1/omega), so the ratio lands within 1%
        growth_ok &= abs(float(tail["imag_part"]) / (omega * sqrt_d) - 1.0) < 1e-2
        qs = [float(r["imag_part"]) for r in pair_rows]
        growth_ok &= all(b > a for a, b in zip(qs, qs[1:]))

    identical = True
    names_a = sorted(p.name for p in dirs[0].iterdir())
    names_b = sorted(p.name for p in dirs[1].iterdir())
    identical &= names_a == names_b
    for file_name in names_a:
        identical &= (dirs[0] / file_name).read_bytes() == (dirs[1] / file_name).read_bytes()

    ok = counts_ok and structure_ok and monotone_ok and growth_ok and identical
    _verdict(
        9,
        ok,
        f"6 spectrum + 3 convergence datasets: {counts_ok}; per-mode counts and "
        f"interlacing: {structure_ok}; monotone root columns: {monotone_ok}; "
        f"pair imaginary part grows like (2k-1)*sqrt(D): {growth_ok}; "
        f"re-run byte-identical ({len(names_a)} files): {identical}",
    )
