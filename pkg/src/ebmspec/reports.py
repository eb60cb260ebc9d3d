"""Report rendering: frozen CSV schemas and their JSON twins.

All renderers return strings; writing is the caller's business.  Column
orders and header names are frozen (documented in the README) because the
golden tests depend on them.  Floats are serialized with repr (shortest
round-trip), so identical inputs give identical bytes.

Schemas:

* spectrum:       k,kind,index,re,im,residual       (one row per root per k)
* limit:          index,root,secular_residual
* converge-real:  j,k,limit_root,root,error,k2_error
* converge-pair:  k,real_part,imag_part,real_error,imag_error_scaled
"""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable

from .analysis import BoundReport, ConvergenceReport, K0Certificate
from .inverse import PerturbationStudy, RecoveredModel
from .roots import LimitSpectrum, SpectralCluster

__all__ = [
    "spectrum_rows",
    "spectrum_csv",
    "spectrum_json",
    "limit_csv",
    "limit_json",
    "converge_real_csv",
    "converge_pair_csv",
    "converge_json",
    "k0_json",
    "k0_csv",
    "bounds_json",
    "recovery_json",
    "study_json",
    "study_csv",
    "manifest_json",
]

SPECTRUM_HEADER = ["k", "kind", "index", "re", "im", "residual"]
LIMIT_HEADER = ["index", "root", "secular_residual"]
CONVERGE_REAL_HEADER = ["j", "k", "limit_root", "root", "error", "k2_error"]
CONVERGE_PAIR_HEADER = ["k", "real_part", "imag_part", "real_error", "imag_error_scaled"]


def _csv_text(header: list[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# spectrum
# --------------------------------------------------------------------------

def spectrum_rows(clusters: Iterable[SpectralCluster]) -> list[dict]:
    """One dict per root per mode: the N bracketed roots, then the extra pair."""
    rows = []
    for cluster in clusters:
        k = cluster.k.k
        n = cluster.real_roots.size
        for j in range(n):
            rows.append(
                {
                    "k": k,
                    "kind": "real",
                    "index": j + 1,
                    "re": float(cluster.real_roots[j]),
                    "im": 0.0,
                    "residual": float(cluster.residuals[j]),
                }
            )
        for offset, z in enumerate(cluster.extra_pair.roots()):
            rows.append(
                {
                    "k": k,
                    "kind": "complex" if cluster.is_complex else "real",
                    "index": n + 1 + offset,
                    "re": float(z.real),
                    "im": float(z.imag),
                    "residual": float(cluster.extra_residual),
                }
            )
    return rows


def spectrum_csv(clusters: Iterable[SpectralCluster]) -> str:
    rows = spectrum_rows(clusters)
    return _csv_text(
        SPECTRUM_HEADER,
        ([r[name] for name in SPECTRUM_HEADER] for r in rows),
    )


def spectrum_json(clusters: Iterable[SpectralCluster]) -> str:
    return _json_text({"schema": "spectrum", "rows": spectrum_rows(clusters)})


# --------------------------------------------------------------------------
# limit spectrum
# --------------------------------------------------------------------------

def _limit_rows(spectrum: LimitSpectrum) -> list[dict]:
    return [
        {
            "index": j + 1,
            "root": float(spectrum.roots[j]),
            "secular_residual": float(spectrum.secular_residuals[j]),
        }
        for j in range(spectrum.roots.size)
    ]


def limit_csv(spectrum: LimitSpectrum) -> str:
    return _csv_text(
        LIMIT_HEADER,
        ([r[name] for name in LIMIT_HEADER] for r in _limit_rows(spectrum)),
    )


def limit_json(spectrum: LimitSpectrum) -> str:
    return _json_text({"schema": "limit", "rows": _limit_rows(spectrum)})


# --------------------------------------------------------------------------
# convergence report
# --------------------------------------------------------------------------

def converge_real_csv(report: ConvergenceReport) -> str:
    return _csv_text(
        CONVERGE_REAL_HEADER,
        (
            [row.j, row.k, row.limit_root, row.root, row.error, row.k2_error]
            for row in report.real_rows
        ),
    )


def converge_pair_csv(report: ConvergenceReport) -> str:
    return _csv_text(
        CONVERGE_PAIR_HEADER,
        (
            [row.k, row.real_part, row.imag_part, row.real_error, row.imag_error_scaled]
            for row in report.pair_rows
        ),
    )


def converge_json(report: ConvergenceReport) -> str:
    return _json_text(
        {
            "schema": "converge",
            "real_rows": [
                {
                    "j": r.j,
                    "k": r.k,
                    "limit_root": r.limit_root,
                    "root": r.root,
                    "error": r.error,
                    "k2_error": r.k2_error,
                }
                for r in report.real_rows
            ],
            "pair_rows": [
                {
                    "k": r.k,
                    "real_part": r.real_part,
                    "imag_part": r.imag_part,
                    "real_error": r.real_error,
                    "imag_error_scaled": r.imag_error_scaled,
                }
                for r in report.pair_rows
            ],
            "skipped_pair_modes": list(report.skipped_pair_modes),
            "p_limit": report.p_limit,
            "q_slope": report.q_slope,
            "m1": report.m1,
            "m2": report.m2,
            "m3": report.m3,
        }
    )


# --------------------------------------------------------------------------
# certificate, bounds, recovery, study
# --------------------------------------------------------------------------

def _k0_dict(cert: K0Certificate, observed_first_complex_k: int | None) -> dict:
    return {
        "b_max": cert.b_max,
        "b_min": cert.b_min,
        "r_gap": cert.r_gap,
        "mu": cert.mu,
        "radius_bound": cert.radius_bound,
        "delta": cert.delta,
        "epsilon": cert.epsilon,
        "m_floor": cert.m_floor,
        "k0_raw": cert.k0_raw,
        "k0": cert.k0,
        "observed_first_complex_k": observed_first_complex_k,
    }


def k0_json(cert: K0Certificate, observed_first_complex_k: int | None = None) -> str:
    return _json_text({"schema": "k0", **_k0_dict(cert, observed_first_complex_k)})


def k0_csv(cert: K0Certificate, observed_first_complex_k: int | None = None) -> str:
    data = _k0_dict(cert, observed_first_complex_k)
    names = list(data)
    return _csv_text(names, [[data[name] for name in names]])


def bounds_json(report: BoundReport) -> str:
    return _json_text(
        {
            "schema": "bounds",
            "all_passed": report.all_passed,
            "skipped": list(report.skipped),
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "measured": c.measured,
                    "threshold": c.threshold,
                    "detail": c.detail,
                    "violations": list(c.violations),
                }
                for c in report.checks
            ],
        }
    )


def recovery_json(recovered: RecoveredModel) -> str:
    return _json_text({"schema": "recovery", **recovered.to_document()})


def study_json(study: PerturbationStudy) -> str:
    return _json_text({"schema": "perturbation-study", **study.to_document()})


def study_csv(study: PerturbationStudy) -> str:
    header = ["trial", "ok", "rate_error", "weight_error", "modulus_error", "message"]
    return _csv_text(
        header,
        (
            [r.trial, r.ok, r.rate_error, r.weight_error, r.modulus_error, r.message]
            for r in study.results
        ),
    )


def manifest_json(entries: list[dict], meta: dict) -> str:
    return _json_text({"schema": "manifest", **meta, "files": entries})
