"""Shared fixtures: one session-wide root sweep reused by the acceptance tests."""

import pytest

from ebmspec import compute_clusters, get_preset, limit_roots, preset_names

SWEEP_K_MAX = 200


@pytest.fixture(scope="session")
def preset_sweeps():
    """{name: (model, limit spectrum, clusters for k = 1..200)} for every preset."""
    sweeps = {}
    for name in preset_names():
        model = get_preset(name)
        limits = limit_roots(model)
        clusters = compute_clusters(model, range(1, SWEEP_K_MAX + 1), limits=limits)
        sweeps[name] = (model, limits, clusters)
    return sweeps
