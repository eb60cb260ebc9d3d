"""Convergence tables, the explicit mode threshold, and bound verification."""

import math

import numpy as np
import pytest

from ebmspec import (
    PronyModel,
    cluster_roots,
    convergence_table,
    explicit_k0,
    first_complex_k,
    get_preset,
    limit_roots,
    rep_d_value,
    trace_gap,
    verify_bounds,
)
from ebmspec.analysis import coefficient_identity_gap
from ebmspec.errors import ConfigError, ModelValidationError

TOY = PronyModel(rates=(1.0,), weights=(1.0,), modulus=2.0)
WORKED = PronyModel(rates=(5.0, 10.0), weights=(2.5, 5.0), modulus=1.0)


# --------------------------------------------------------------------------
# convergence tables
# --------------------------------------------------------------------------

def test_critical_model_keeps_first_column_zero():
    report = convergence_table(get_preset("n2-d1"), range(1, 31))
    first = [r for r in report.real_rows if r.j == 1]
    assert len(first) == 30
    assert max(abs(r.error) for r in first) < 1e-13


def test_toy_real_root_rate_settles():
    report = convergence_table(TOY, range(1, 51))
    rows = report.rows_for(1)
    scaled = [r.k2_error for r in rows]
    assert all(s > 0.0 for s in scaled)
    # bounded and settling: the tail changes by less than a factor 2 vs entry 10
    assert 0.5 < scaled[-1] / scaled[9] < 2.0


def test_toy_pair_imaginary_part_approaches_scaled_sqrt_modulus():
    report = convergence_table(TOY, range(1, 51))
    assert report.q_slope == math.sqrt(2.0)
    last = report.pair_rows[-1]
    omega = 2.0 * last.k - 1.0
    assert last.imag_part / omega == pytest.approx(math.sqrt(2.0), abs=1e-4)
    assert report.m3 < 1.0  # (2k-1)-scaled error stays bounded
    assert max(r.imag_error_scaled for r in report.pair_rows) == report.m3


def test_pair_real_part_limit_value():
    report = convergence_table(TOY, range(1, 31))
    assert report.p_limit == -1.0 / 4.0  # -sum(b) / (2 D)
    assert report.pair_rows[-1].real_part == pytest.approx(report.p_limit, abs=1e-3)
    assert report.m2 == max(r.k * r.k * r.real_error for r in report.pair_rows)


def test_small_k_real_pairs_are_skipped_not_tabulated():
    model = get_preset("n1-d0.5")
    report = convergence_table(model, range(1, 6))
    assert 1 in report.skipped_pair_modes
    tabulated = {r.k for r in report.pair_rows}
    assert tabulated.isdisjoint(report.skipped_pair_modes)
    assert tabulated | set(report.skipped_pair_modes) == set(range(1, 6))


def test_convergence_table_validates_mode_list():
    with pytest.raises(ConfigError):
        convergence_table(TOY, [])
    with pytest.raises(ConfigError):
        convergence_table(TOY, [3, 2])
    with pytest.raises(ConfigError):
        convergence_table(TOY, [0, 1])


def test_convergence_table_rejects_mismatched_cluster_cache():
    clusters = [cluster_roots(TOY, k) for k in (1, 2)]
    with pytest.raises(ConfigError):
        convergence_table(TOY, [1, 2, 3], clusters=clusters)


def test_one_sided_convergence_from_below():
    report = convergence_table(get_preset("n5-d5"), range(1, 41))
    assert min(r.error for r in report.real_rows) >= -1e-12


# --------------------------------------------------------------------------
# explicit mode threshold
# --------------------------------------------------------------------------

def test_certificate_worked_example_exact_constants():
    cert = explicit_k0(WORKED)
    assert cert.b_max == 5.0
    assert cert.b_min == 2.5
    assert cert.r_gap == 5.0
    assert cert.mu == 12.5 / 121.0          # exact: both sides are short rational expressions
    assert cert.radius_bound == 31.0
    assert cert.delta == cert.mu / 4.0
    assert cert.epsilon == cert.mu / 4.0
    assert cert.m_floor == cert.mu * cert.delta / 2.0


def test_certificate_worked_example_threshold_value():
    cert = explicit_k0(WORKED)
    # hand-derived: 31^2/sqrt(mu*delta/2) + 31^(3/2)/sqrt(mu/4) + 1
    hand = 27386.40143342415
    assert abs(cert.k0_raw - hand) <= 0.01 * hand
    assert cert.k0 == 27387
    assert cert.k0 >= cert.k0_raw


def test_certificate_rejects_single_term():
    with pytest.raises(ModelValidationError):
        explicit_k0(TOY)


@pytest.mark.parametrize("name", ["n2-d0.5", "n2-d5", "n5-d1", "n9-d0.5"])
def test_certificate_generic_invariants(name):
    model = get_preset(name)
    cert = explicit_k0(model)
    assert cert.mu <= model.rates[0] / 4.0
    assert cert.mu > 0.0
    assert cert.k0 >= 1
    assert cert.delta > 0.0 and cert.epsilon > 0.0 and cert.m_floor > 0.0
    assert cert.radius_bound > 2.0 * model.rates[-1]


# --------------------------------------------------------------------------
# identities
# --------------------------------------------------------------------------

def test_trace_and_coefficient_identities_on_presets():
    for name in ("n2-d0.5", "n5-d1", "n9-d5"):
        model = get_preset(name)
        for k in (1, 7, 40):
            cluster = cluster_roots(model, k)
            assert trace_gap(model, cluster) < 1e-12
            assert coefficient_identity_gap(model, cluster) < 1e-10


def test_modulus_reconstruction_from_limit_roots():
    for name in ("n1-d5", "n2-d1", "n9-d0.5"):
        model = get_preset(name)
        value = rep_d_value(model)
        assert value == pytest.approx(model.modulus, rel=1e-10)


def test_first_complex_mode_for_fluid_toy():
    model = get_preset("n1-d0.5")
    assert first_complex_k(model) == 2
    assert not cluster_roots(model, 1).is_complex
    assert cluster_roots(model, 2).is_complex


def test_first_complex_mode_can_be_missing_in_range():
    # scanning a window of nothing but real extras reports None
    model = get_preset("n1-d0.5")
    assert first_complex_k(model, k_max=1) is None


# --------------------------------------------------------------------------
# bound report
# --------------------------------------------------------------------------

def test_bound_report_worked_example():
    report = verify_bounds(WORKED, range(1, 31))
    assert report.all_passed
    sep = report["limit-root-separation"]
    assert sep.measured == pytest.approx(7.5, rel=1e-12)
    assert sep.threshold == 2.0 * (12.5 / 121.0)
    assert sep.measured - sep.threshold == pytest.approx(7.5 - 25.0 / 121.0, rel=1e-12)
    floor = report["pole-neighborhood-floor"]
    assert floor.threshold == 2.5 * 5.0 / 2.0
    assert floor.measured >= floor.threshold


def test_bound_report_strip_membership():
    report = verify_bounds(get_preset("n5-d5"), range(1, 21))
    pair = report["extra-pair-location"]
    assert pair.passed
    assert pair.violations == ()


def test_bound_report_skips_certificate_checks_for_single_term():
    report = verify_bounds(TOY, range(1, 11))
    assert "pole-neighborhood-floor" in report.skipped
    assert "limit-root-separation" in report.skipped
    with pytest.raises(KeyError):
        report["pole-neighborhood-floor"]
    assert report.all_passed


def test_bound_report_adjacent_gap_uses_empirical_constant():
    report = verify_bounds(get_preset("n2-d5"), range(1, 41))
    gap = report["adjacent-cluster-gap"]
    assert gap.passed
    assert gap.measured <= gap.threshold
