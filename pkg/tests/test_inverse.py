"""Two-cluster parameter recovery and its perturbation study."""

import numpy as np
import pytest

from ebmspec import (
    ClusterObservation,
    PronyModel,
    cluster_roots,
    get_preset,
    perturbation_study,
    poly_from_roots,
    recover_model,
)
from ebmspec.errors import ConfigError, ConjugateClosureError, RecoveryError

TOY = PronyModel(rates=(1.0,), weights=(1.0,), modulus=2.0)
WORKED = PronyModel(rates=(5.0, 10.0), weights=(2.5, 5.0), modulus=1.0)


def observe(model, k):
    return ClusterObservation.from_cluster(cluster_roots(model, k))


# --------------------------------------------------------------------------
# polynomial reconstruction from roots
# --------------------------------------------------------------------------

def test_poly_from_single_real_root():
    coeffs = poly_from_roots([-1.0], 1.0)
    assert np.array_equal(coeffs.coeffs, [1.0, 1.0])


def test_poly_from_imaginary_pair():
    coeffs = poly_from_roots([1j, -1j], 1.0)
    assert np.array_equal(coeffs.coeffs, [1.0, 0.0, 1.0])


def test_poly_from_toy_cubic_roots():
    roots = cluster_roots(TOY, 1).all_roots()
    coeffs = poly_from_roots(roots, 1.0)
    assert np.max(np.abs(coeffs.coeffs - [1.0, 2.0, 1.0, 1.0])) < 1e-12


def test_poly_from_roots_is_permutation_invariant_bitwise():
    roots = cluster_roots(get_preset("n5-d5"), 4).all_roots()
    rng = np.random.default_rng(3)
    baseline = poly_from_roots(roots, 0.25).coeffs
    for _ in range(5):
        shuffled = rng.permutation(roots)
        assert np.array_equal(poly_from_roots(shuffled, 0.25).coeffs, baseline)


def test_poly_from_roots_requires_conjugate_closure():
    with pytest.raises(ConjugateClosureError):
        poly_from_roots([1j, -0.5j], 1.0)
    with pytest.raises(ConjugateClosureError):
        poly_from_roots([1.0 + 1j], 1.0)


# --------------------------------------------------------------------------
# observations
# --------------------------------------------------------------------------

def test_observation_document_round_trip(tmp_path):
    obs = observe(WORKED, 3)
    path = tmp_path / "obs.json"
    obs.save(path)
    back = ClusterObservation.load(path)
    assert back.k.k == 3
    assert np.array_equal(back.roots, obs.roots)


def test_observation_canonicalizes_ordering():
    cluster = cluster_roots(WORKED, 2)
    roots = cluster.all_roots()
    a = ClusterObservation(2, roots)
    b = ClusterObservation(2, roots[::-1])
    assert np.array_equal(a.roots, b.roots)


def test_observation_rejects_open_conjugates():
    with pytest.raises(ConjugateClosureError):
        ClusterObservation(1, np.array([-1.0, -2.0 + 1.0j, -2.0 - 0.5j]))


def test_observation_rejects_unknown_document_keys():
    with pytest.raises(ConfigError):
        ClusterObservation.from_document({"k": 1, "roots": [[-1.0, 0.0]], "junk": 1})


# --------------------------------------------------------------------------
# recovery
# --------------------------------------------------------------------------

def test_round_trip_worked_example():
    recovered = recover_model(observe(WORKED, 1), observe(WORKED, 2))
    m = recovered.model
    assert np.max(np.abs(m.rates - WORKED.rates) / WORKED.rates) < 1e-8
    assert np.max(np.abs(m.weights - WORKED.weights) / WORKED.weights) < 1e-8
    assert abs(m.modulus - 1.0) < 1e-8
    assert recovered.diagnostics["lambda2_residual"] < 1e-9


def test_round_trip_toy():
    recovered = recover_model(observe(TOY, 1), observe(TOY, 3))
    m = recovered.model
    assert m.rates[0] == pytest.approx(1.0, rel=1e-10)
    assert m.weights[0] == pytest.approx(1.0, rel=1e-10)
    assert m.modulus == pytest.approx(2.0, rel=1e-10)


def test_recovery_order_of_observations_does_not_matter():
    a = recover_model(observe(WORKED, 2), observe(WORKED, 1))
    b = recover_model(observe(WORKED, 1), observe(WORKED, 2))
    assert np.array_equal(a.model.rates, b.model.rates)
    assert a.diagnostics["k_pair"] == b.diagnostics["k_pair"] == [1, 2]


def test_recovery_is_root_permutation_invariant_bitwise():
    cluster1 = cluster_roots(WORKED, 1).all_roots()
    cluster2 = cluster_roots(WORKED, 2).all_roots()
    rng = np.random.default_rng(17)
    baseline = recover_model(
        ClusterObservation(1, cluster1), ClusterObservation(2, cluster2)
    )
    for _ in range(3):
        shuffled = recover_model(
            ClusterObservation(1, rng.permutation(cluster1)),
            ClusterObservation(2, rng.permutation(cluster2)),
        )
        assert np.array_equal(shuffled.model.rates, baseline.model.rates)
        assert np.array_equal(shuffled.model.weights, baseline.model.weights)
        assert shuffled.model.modulus == baseline.model.modulus


def test_recovery_rejects_equal_mode_indices():
    with pytest.raises(RecoveryError):
        recover_model(observe(WORKED, 2), observe(WORKED, 2))


def test_recovery_rejects_mismatched_cluster_sizes():
    with pytest.raises(RecoveryError):
        recover_model(observe(WORKED, 1), observe(TOY, 2))


def test_recovery_flags_inconsistent_clusters():
    good = observe(WORKED, 1)
    tampered = ClusterObservation(5, observe(WORKED, 2).roots)  # wrong k label
    with pytest.raises(RecoveryError):
        recover_model(good, tampered)


def test_critical_modulus_survives_recovery():
    model = get_preset("n2-d1")  # D = h = 1
    recovered = recover_model(observe(model, 1), observe(model, 2))
    assert abs(recovered.modulus - recovered.model.amplitude_sum) < 1e-8


def test_recovery_without_refinement_still_close():
    recovered = recover_model(observe(WORKED, 1), observe(WORKED, 2), refine=False)
    assert recovered.diagnostics["refined"] is False
    m = recovered.model
    assert np.max(np.abs(m.rates - WORKED.rates) / WORKED.rates) < 1e-8


def test_recovery_diagnostics_reconstruct_forward_clusters():
    recovered = recover_model(observe(WORKED, 3), observe(WORKED, 7))
    matches = recovered.diagnostics["cluster_match_distances"]
    assert set(matches) == {3, 7}
    assert max(matches.values()) < 1e-9


# --------------------------------------------------------------------------
# perturbation study
# --------------------------------------------------------------------------

def test_study_noise_free_reduces_to_round_trip():
    study = perturbation_study(WORKED, 1, 2, noise_level=0.0, trials=4)
    assert study.failures == 0
    assert study.max_rate_error < 1e-8
    assert study.max_weight_error < 1e-8
    assert study.max_modulus_error < 1e-8


def test_study_is_deterministic():
    a = perturbation_study(WORKED, 1, 2, noise_level=1e-10, trials=6, seed=42)
    b = perturbation_study(WORKED, 1, 2, noise_level=1e-10, trials=6, seed=42)
    assert a.to_document() == b.to_document()


def test_study_seed_changes_draws():
    a = perturbation_study(WORKED, 1, 2, noise_level=1e-11, trials=3, seed=1)
    b = perturbation_study(WORKED, 1, 2, noise_level=1e-11, trials=3, seed=2)
    errs_a = [t.rate_error for t in a.results if t.ok]
    errs_b = [t.rate_error for t in b.results if t.ok]
    assert errs_a and errs_b and errs_a != errs_b


def test_study_counts_failures_instead_of_raising():
    study = perturbation_study(get_preset("n9-d1"), 1, 2, noise_level=1e-2, trials=5)
    assert len(study.results) == 5
    assert study.failures == sum(1 for t in study.results if not t.ok)
    failed = [t for t in study.results if not t.ok]
    for t in failed:
        assert t.message
        assert np.isnan(t.rate_error)
