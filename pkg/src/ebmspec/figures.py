"""Figure rendering for the report path (Agg backend, file output only).

Figures are deterministic: fixed size, fixed dpi, and PNG metadata stripped
of the library version (``metadata={"Software": None}``) so re-running a
report produces byte-identical image files.
"""

from __future__ import annotations

from typing import Iterable

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .analysis import ConvergenceReport  # noqa: E402
from .model import PronyModel  # noqa: E402
from .roots import SpectralCluster  # noqa: E402

__all__ = ["spectrum_figure", "convergence_figure"]

_DPI = 120
_SAVE_KWARGS = {"dpi": _DPI, "metadata": {"Software": None}}


def _new_figure(width: float, height: float):
    return plt.figure(figsize=(width, height), dpi=_DPI)


def spectrum_figure(model: PronyModel, clusters: Iterable[SpectralCluster], path: str) -> None:
    """Complex-plane scatter of every cluster root, with the poles marked."""
    clusters = list(clusters)
    real_pts: list[tuple[float, float]] = []
    extra_pts: list[tuple[float, float]] = []
    for cluster in clusters:
        real_pts.extend((float(a), 0.0) for a in cluster.real_roots)
        extra_pts.extend((float(z.real), float(z.imag)) for z in cluster.extra_pair.roots())

    fig = _new_figure(7.0, 5.0)
    try:
        ax = fig.add_subplot(111)
        if real_pts:
            xs, ys = zip(*real_pts)
            ax.scatter(xs, ys, s=8, color="tab:blue", label="interlaced real roots")
        if extra_pts:
            xs, ys = zip(*extra_pts)
            ax.scatter(xs, ys, s=8, color="tab:orange", label="extra pair")
        ax.scatter(
            -model.rates,
            np.zeros(model.n_terms),
            marker="x",
            s=60,
            color="black",
            label="poles -r_i",
        )
        ks = [c.k.k for c in clusters]
        ax.set_xlabel("Re λ")
        ax.set_ylabel("Im λ")
        ax.set_title(
            f"Cluster roots, N={model.n_terms}, D={model.modulus:g}, "
            f"k={min(ks)}..{max(ks)}"
        )
        ax.axhline(0.0, color="0.8", lw=0.6, zorder=0)
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        fig.savefig(path, **_SAVE_KWARGS)
    finally:
        plt.close(fig)


def _positive_series(ks: list[int], values: list[float]):
    """Drop nonpositive entries (log axes); returns None when nothing is left."""
    pts = [(k, v) for k, v in zip(ks, values) if v > 0.0]
    if not pts:
        return None
    xs, ys = zip(*pts)
    return np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)


def convergence_figure(model: PronyModel, report: ConvergenceReport, path: str) -> None:
    """Log-log error decay: real roots (left, ~k^-2) and the extra pair (right)."""
    fig = _new_figure(9.5, 4.2)
    try:
        ax_real = fig.add_subplot(121)
        ax_pair = fig.add_subplot(122)

        drawn_real = False
        for j in range(1, model.n_terms + 1):
            rows = report.rows_for(j)
            series = _positive_series([r.k for r in rows], [r.error for r in rows])
            if series is None:
                continue
            ks, errs = series
            ax_real.loglog(ks, errs, marker=".", ms=3, lw=0.8, label=f"root {j}")
            drawn_real = True
        if drawn_real and report.m1 > 0.0:
            ref_k = np.asarray(sorted({r.k for r in report.real_rows}), dtype=float)
            ax_real.loglog(ref_k, report.m1 / ref_k**2, "k--", lw=0.8, label="k^-2 reference")
        ax_real.set_xlabel("mode index k")
        ax_real.set_ylabel("a_j - a_j^k")
        ax_real.set_title("real-root convergence")
        if drawn_real:
            ax_real.legend(fontsize=7)

        pair_ks = [r.k for r in report.pair_rows]
        p_series = _positive_series(pair_ks, [r.real_error for r in report.pair_rows])
        q_series = _positive_series(
            pair_ks,
            [r.imag_error_scaled / (2 * r.k - 1) for r in report.pair_rows],
        )
        if p_series is not None:
            ax_pair.loglog(*p_series, marker=".", ms=3, lw=0.8, label="|p^k - p_inf|")
        if q_series is not None:
            ax_pair.loglog(*q_series, marker=".", ms=3, lw=0.8, label="|q^k - (2k-1)sqrt(D)|")
        if p_series is not None and report.m2 > 0.0:
            ref_k = p_series[0]
            ax_pair.loglog(ref_k, report.m2 / ref_k**2, "k--", lw=0.8, label="k^-2 reference")
        ax_pair.set_xlabel("mode index k")
        ax_pair.set_ylabel("error")
        ax_pair.set_title("extra-pair convergence")
        if p_series is not None or q_series is not None:
            ax_pair.legend(fontsize=7)

        fig.suptitle(f"N={model.n_terms}, D={model.modulus:g}", fontsize=10)
        fig.tight_layout()
        fig.savefig(path, **_SAVE_KWARGS)
    finally:
        plt.close(fig)
