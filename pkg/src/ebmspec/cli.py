"""Command-line front end.

Every subcommand loads a model (``--model`` file or ``--preset`` name),
runs one computation, and writes a CSV or JSON report to ``--out`` (``-``
for stdout).  Failures — bad config, tolerance violations, IO — exit
nonzero with a one-line machine-readable JSON object on stderr.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import reports
from .analysis import convergence_table, explicit_k0, first_complex_k
from .errors import ConfigError, EbmspecError
from .inverse import ClusterObservation, perturbation_study, recover_model
from .model import (
    StretchedExponential,
    fit_prony,
    load_document,
    model_from_document,
    model_to_document,
    stretched_from_document,
)
from .presets import get_preset, preset_names
from .roots import compute_clusters, limit_roots

FIGURE_PRESETS = ("n5-d0.5", "n5-d1", "n5-d5", "n9-d0.5", "n9-d1", "n9-d5")
CONVERGE_PRESETS = ("n5-d0.5", "n5-d1", "n5-d5")


def _guarded(fn):
    """Convert library/IO failures into an error JSON on stderr + exit 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (EbmspecError, OSError) as exc:
            payload = {"error": type(exc).__name__, "message": str(exc)}
            click.echo(json.dumps(payload, sort_keys=True), err=True)
            sys.exit(1)

    return wrapper


def _model_options(fn):
    fn = click.option(
        "--preset",
        default=None,
        help="Named preset, e.g. 'n5-d1' (see README for the full set).",
    )(fn)
    fn = click.option(
        "--model",
        "model_path",
        type=click.Path(path_type=Path),
        default=None,
        help="Model config JSON file.",
    )(fn)
    return fn


def _resolve_model(model_path, preset):
    if (model_path is None) == (preset is None):
        raise ConfigError("exactly one of --model and --preset is required")
    if preset is not None:
        return get_preset(preset)
    return model_from_document(load_document(model_path))


def _k_range(k_min: int, k_max: int) -> range:
    if k_min < 1 or k_max < k_min:
        raise ConfigError(f"need 1 <= k-min <= k-max, got {k_min}..{k_max}")
    return range(k_min, k_max + 1)


def _write(text: str, out: str) -> None:
    if out == "-":
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


def _format_option(fn):
    return click.option(
        "--format",
        "fmt",
        type=click.Choice(["csv", "json"]),
        default="csv",
        show_default=True,
    )(fn)


def _out_option(fn):
    return click.option("--out", default="-", show_default=True, help="Output path ('-' = stdout).")(fn)


@click.group()
def main() -> None:
    """Spectral analysis of extended-Burgers relaxation models."""


@main.command()
@_model_options
@click.option("--k-min", type=int, default=1, show_default=True)
@click.option("--k-max", type=int, default=40, show_default=True)
@_format_option
@_out_option
@_guarded
def spectrum(model_path, preset, k_min, k_max, fmt, out) -> None:
    """All N+2 cluster roots for each mode index in the k range."""
    model = _resolve_model(model_path, preset)
    clusters = compute_clusters(model, _k_range(k_min, k_max))
    text = reports.spectrum_csv(clusters) if fmt == "csv" else reports.spectrum_json(clusters)
    _write(text, out)


@main.command()
@_model_options
@_format_option
@_out_option
@_guarded
def limit(model_path, preset, fmt, out) -> None:
    """The N limit roots (k -> infinity) with secular residuals."""
    model = _resolve_model(model_path, preset)
    result = limit_roots(model)
    text = reports.limit_csv(result) if fmt == "csv" else reports.limit_json(result)
    _write(text, out)


def _converge_stem(out: str) -> tuple[str, str]:
    path = Path(out)
    stem = path.with_suffix("") if path.suffix else path
    suffix = path.suffix or ".csv"
    return str(stem) + "-real" + suffix, str(stem) + "-pair" + suffix


@main.command()
@_model_options
@click.option("--k-min", type=int, default=1, show_default=True)
@click.option("--k-max", type=int, default=100, show_default=True)
@_format_option
@_out_option
@_guarded
def converge(model_path, preset, k_min, k_max, fmt, out) -> None:
    """Convergence of every cluster root to its large-k limit.

    CSV output is two tables (real roots, extra pair).  With a file --out
    they land in '<stem>-real.csv' and '<stem>-pair.csv'; on stdout they
    are separated by a blank line.  JSON output is a single document.
    """
    model = _resolve_model(model_path, preset)
    report = convergence_table(model, _k_range(k_min, k_max))
    if fmt == "json":
        _write(reports.converge_json(report), out)
        return
    real_text = reports.converge_real_csv(report)
    pair_text = reports.converge_pair_csv(report)
    if out == "-":
        _write(real_text + "\n" + pair_text, out)
    else:
        real_path, pair_path = _converge_stem(out)
        _write(real_text, real_path)
        _write(pair_text, pair_path)


@main.command()
@_model_options
@click.option(
    "--k-max",
    type=int,
    default=50,
    show_default=True,
    help="Scan ceiling for the observed first all-complex mode.",
)
@_format_option
@_out_option
@_guarded
def k0(model_path, preset, k_max, fmt, out) -> None:
    """Closed-form mode threshold certificate (needs N >= 2)."""
    model = _resolve_model(model_path, preset)
    cert = explicit_k0(model)
    observed = first_complex_k(model, k_max=k_max)
    text = reports.k0_csv(cert, observed) if fmt == "csv" else reports.k0_json(cert, observed)
    _write(text, out)


@main.command()
@click.argument("obs1", type=click.Path(path_type=Path))
@click.argument("obs2", type=click.Path(path_type=Path))
@click.option("--refine/--no-refine", default=True, show_default=True,
              help="Gauss-Newton polish of the recovered parameters.")
@_out_option
@_guarded
def invert(obs1, obs2, refine, out) -> None:
    """Recover (r_i, b_i, D) from two observed cluster files (JSON)."""
    first = ClusterObservation.load(obs1)
    second = ClusterObservation.load(obs2)
    recovered = recover_model(first, second, refine=refine)
    _write(reports.recovery_json(recovered), out)


@main.command()
@click.option("--model", "model_path", type=click.Path(path_type=Path), default=None,
              help="Config JSON with a 'stretched' block; reuses its r ladder.")
@click.option("--tau", type=float, default=None, help="Relaxation time of the target.")
@click.option("--beta", type=float, default=None, help="Stretching exponent in (0,1).")
@click.option("--n-terms", type=int, default=None, help="Ladder length (default ladder r_i = 5i).")
@click.option("--rates", default=None, help="Comma-separated rate ladder, e.g. '5,10,15'.")
@click.option("--mode", type=click.Choice(["least-squares", "equal-contribution"]),
              default="least-squares", show_default=True)
@click.option("--strength", type=float, default=1.0, show_default=True,
              help="Total strength h (equal-contribution mode).")
@click.option("--modulus", type=float, default=None,
              help="Instantaneous modulus D; defaults to the fitted h.")
@click.option("--t-min", type=float, default=0.1, show_default=True)
@click.option("--t-max", type=float, default=10.0, show_default=True)
@click.option("--points", type=int, default=200, show_default=True)
@_out_option
@_guarded
def fit(model_path, tau, beta, n_terms, rates, mode, strength, modulus,
        t_min, t_max, points, out) -> None:
    """Fit a Prony ladder to a stretched-exponential target.

    The output is a model config document (reusable via --model) with the
    target recorded in its 'stretched' block.
    """
    if model_path is not None:
        doc = load_document(model_path)
        target = stretched_from_document(doc)
        if target is None:
            raise ConfigError(f"{model_path}: config has no 'stretched' block to fit against")
        ladder = np.asarray(doc.get("r", []), dtype=float)
        if ladder.size == 0:
            raise ConfigError(f"{model_path}: config must carry the rate ladder 'r'")
    else:
        if tau is None or beta is None:
            raise ConfigError("--tau and --beta are required (or use --model with a 'stretched' block)")
        target = StretchedExponential(tau=tau, beta=beta)
        if rates is not None:
            ladder = np.asarray([float(tok) for tok in rates.split(",")], dtype=float)
        elif n_terms is not None:
            ladder = 5.0 * np.arange(1, n_terms + 1)
        else:
            raise ConfigError("one of --rates or --n-terms is required")
    if points < 2 or not t_min < t_max:
        raise ConfigError("need --points >= 2 and --t-min < --t-max")
    grid = np.geomspace(t_min, t_max, points)
    fitted = fit_prony(target, ladder.size, grid, mode,
                       rates=ladder, total_strength=strength, modulus=modulus)
    doc = model_to_document(fitted)
    doc["stretched"] = {"tau": target.tau, "beta": target.beta}
    _write(json.dumps(doc, indent=2, sort_keys=True) + "\n", out)


@main.command()
@_model_options
@click.option("--k1", type=int, default=1, show_default=True)
@click.option("--k2", type=int, default=2, show_default=True)
@click.option("--noise", type=float, required=True, help="Relative perturbation level.")
@click.option("--trials", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_format_option
@_out_option
@_guarded
def perturb(model_path, preset, k1, k2, noise, trials, seed, fmt, out) -> None:
    """Inverse-recovery sensitivity under relative root perturbations."""
    model = _resolve_model(model_path, preset)
    study = perturbation_study(model, k1, k2, noise_level=noise, trials=trials, seed=seed)
    text = reports.study_csv(study) if fmt == "csv" else reports.study_json(study)
    _write(text, out)


@main.command("reproduce-figures")
@click.option("--out-dir", type=click.Path(path_type=Path), required=True)
@click.option("--k-max", type=int, default=100, show_default=True)
@click.option("--figures/--no-figures", default=True, show_default=True,
              help="Also render PNG figures next to the CSV data.")
@_guarded
def reproduce_figures(out_dir, k_max, figures) -> None:
    """Full experiment sweep: spectrum data for N in {5,9} x D in {0.5,1,5},
    convergence data for the N=5 presets, optional figures, and a manifest."""
    ks = _k_range(1, k_max)
    out_dir.mkdir(parents=True, exist_ok=True)
    if figures:
        from . import figures as figmod

    entries: list[dict] = []

    def emit(name: str, text: str, preset: str, kind: str) -> None:
        (out_dir / name).write_text(text)
        entries.append({"file": name, "preset": preset, "kind": kind})

    for name in FIGURE_PRESETS:
        model = get_preset(name)
        clusters = compute_clusters(model, ks)
        emit(f"spectrum-{name}.csv", reports.spectrum_csv(clusters), name, "spectrum-csv")
        if figures:
            fig_name = f"spectrum-{name}.png"
            figmod.spectrum_figure(model, clusters, str(out_dir / fig_name))
            entries.append({"file": fig_name, "preset": name, "kind": "spectrum-figure"})
        if name in CONVERGE_PRESETS:
            report = convergence_table(model, ks, clusters=clusters)
            emit(f"converge-{name}-real.csv", reports.converge_real_csv(report),
                 name, "converge-real-csv")
            emit(f"converge-{name}-pair.csv", reports.converge_pair_csv(report),
                 name, "converge-pair-csv")
            if figures:
                fig_name = f"converge-{name}.png"
                figmod.convergence_figure(model, report, str(out_dir / fig_name))
                entries.append({"file": fig_name, "preset": name, "kind": "converge-figure"})

    meta = {"k_min": 1, "k_max": k_max, "figures": figures, "presets": list(FIGURE_PRESETS)}
    (out_dir / "manifest.json").write_text(reports.manifest_json(entries, meta))
    click.echo(f"wrote {len(entries) + 1} files to {out_dir}")


@main.command()
@_guarded
def presets() -> None:
    """List the named presets."""
    for name in preset_names():
        click.echo(name)


if __name__ == "__main__":
    main()
