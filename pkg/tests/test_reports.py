"""Report serialization: frozen headers, round-trip floats, determinism."""

import csv
import io
import json

from ebmspec import cluster_roots, compute_clusters, get_preset, limit_roots
from ebmspec.reports import (
    limit_csv,
    spectrum_csv,
    spectrum_json,
    spectrum_rows,
)

MODEL = get_preset("n2-d0.5")


def test_spectrum_rows_cover_every_root():
    clusters = compute_clusters(MODEL, range(1, 4))
    rows = spectrum_rows(clusters)
    assert len(rows) == 3 * 4
    assert [r["index"] for r in rows[:4]] == [1, 2, 3, 4]


def test_csv_floats_round_trip_exactly():
    cluster = cluster_roots(MODEL, 5)
    text = spectrum_csv([cluster])
    parsed = list(csv.DictReader(io.StringIO(text)))
    reals = [float(r["re"]) for r in parsed if r["kind"] == "real"][: MODEL.n_terms]
    assert reals == cluster.real_roots.tolist()


def test_limit_csv_header_and_values():
    spectrum = limit_roots(MODEL)
    lines = limit_csv(spectrum).splitlines()
    assert lines[0] == "index,root,secular_residual"
    assert len(lines) == 1 + MODEL.n_terms
    assert float(lines[1].split(",")[1]) == spectrum.roots[0]


def test_report_builders_are_deterministic():
    clusters = compute_clusters(MODEL, range(1, 3))
    assert spectrum_csv(clusters) == spectrum_csv(clusters)
    a, b = spectrum_json(clusters), spectrum_json(clusters)
    assert a == b
    assert json.loads(a)["schema"] == "spectrum"
    assert a.endswith("\n")
