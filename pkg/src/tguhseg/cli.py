"""Command-line front end: segment, simulate, evaluate, roc.

Report-producing commands write tab-separated tables and, unless disabled,
matplotlib figures next to them.  Exit codes: 0 success, 1 input error,
2 contract violation.
"""

from __future__ import annotations

import functools
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from . import __version__
from .errors import ContractError, InputError
from .evaluation import roc_curve, run_scenario
from .io import (
    SegmentRecord,
    classify_call,
    format_exact,
    format_ratio,
    read_ratio_file,
    write_table,
)
from .reconstruction import Segmentation, segment as run_segmentation
from .simulate import (
    generate_replicate,
    load_scenario,
    with_sigma,
)
from .thresholding import ThresholdConfig
from .transform import Series

logger = logging.getLogger(__name__)

SCENARIO_ENVVAR = "TGUHSEG_SCENARIO"


def _handle_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except InputError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except ContractError as exc:
            click.echo(f"contract violation: {exc}", err=True)
            sys.exit(2)

    return wrapper


@click.group()
@click.version_option(version=__version__)
def main():
    """Tail-greedy unbalanced Haar segmentation toolkit."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")


def _param_block(**params) -> list[tuple[str, object]]:
    block = [("tool", f"tguhseg {__version__}")]
    block.extend((k, v) for k, v in params.items())
    return block


@main.command("segment")
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--rho", default=0.01, show_default=True, help="Merge proportion per pass.")
@click.option("--cstar", default=2, show_default=True, help="Minimum arm width kept.")
@click.option("--lambda", "lam", type=float, default=None,
              help="Explicit threshold (default: auto from estimated noise).")
@click.option("--sigma", type=float, default=None,
              help="Explicit noise level (default: MAD estimate).")
@click.option("--theta", default=0.1, show_default=True,
              help="Gain/loss call tolerance around baseline 1.0.")
@click.option("--whole-genome", is_flag=True,
              help="Segment the concatenated genome instead of per chromosome.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@_handle_errors
def segment_cmd(input_path, rho, cstar, lam, sigma, theta, whole_genome, out_dir):
    """Segment a ratio file; writes segments, change-points, and metadata."""
    groups, dropped = read_ratio_file(input_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = ThresholdConfig(lam=lam, sigma=sigma, c_star=cstar)

    if whole_genome and groups:
        all_records = [r for records in groups.values() for r in records]
        groups = {"genome": all_records}

    seg_rows, cp_rows, meta_rows = [], [], []
    for chrom, records in groups.items():
        values = [r.ratio for r in records]
        if len(records) < 2:
            logger.warning("chromosome %s has <2 windows; passthrough segment", chrom)
            segm = Segmentation(
                change_points=(),
                segment_bounds=(0, len(records)),
                segment_means=np.asarray(values, dtype=float),
                fitted=np.asarray(values, dtype=float),
            )
        else:
            series = Series.from_values(
                values,
                positions=None if whole_genome else [r.window_start for r in records],
                label=chrom,
            )
            segm = run_segmentation(series, cfg, rho=rho)
        for j in range(segm.n_segments):
            lo, hi = segm.segment_bounds[j], segm.segment_bounds[j + 1]
            mean = float(segm.segment_means[j])
            rec = SegmentRecord(
                chromosome=records[lo].chromosome if whole_genome else chrom,
                start_window_index=lo + 1,
                end_window_index=hi,
                start_bp=records[lo].window_start,
                end_bp=records[hi - 1].window_end,
                mean_ratio=mean,
                n_windows=hi - lo,
                call=classify_call(mean, theta=theta),
            )
            seg_rows.append([
                rec.chromosome, rec.start_window_index, rec.end_window_index,
                rec.start_bp, rec.end_bp, format_exact(rec.mean_ratio),
                rec.n_windows, rec.call,
            ])
        for b in segm.change_points:
            cp_rows.append([chrom, b, records[b - 1].window_end])
        meta_rows.append([
            chrom, len(records),
            format_exact(segm.sigma_used) if segm.sigma_used is not None else "NA",
            format_exact(segm.lambda_used) if segm.lambda_used is not None else "NA",
            segm.n_stage1 if segm.n_stage1 is not None else "NA",
            segm.n_kept if segm.n_kept is not None else "NA",
            len(segm.change_points),
        ])

    params = _param_block(
        input=Path(input_path).name, rho=rho, cstar=cstar,
        **{"lambda": "auto" if lam is None else lam},
        sigma="auto" if sigma is None else sigma,
        theta=theta, whole_genome=whole_genome, dropped_records=dropped,
    )
    write_table(
        out / "segments.tsv", params,
        ["chromosome", "start_window_index", "end_window_index", "start_bp",
         "end_bp", "mean_ratio", "n_windows", "call"],
        seg_rows,
    )
    write_table(
        out / "changepoints.tsv", params,
        ["chromosome", "window_index", "bp_position"], cp_rows,
    )
    write_table(
        out / "metadata.tsv", params,
        ["chromosome", "n_windows", "sigma_hat", "lambda", "n_stage1",
         "n_kept", "n_change_points"],
        meta_rows,
    )
    click.echo(f"wrote {len(seg_rows)} segments across {len(groups)} group(s) to {out}")


def _load_scenario_arg(scenario_path):
    if scenario_path is None:
        raise InputError(
            f"no scenario file given (pass an argument or set {SCENARIO_ENVVAR})"
        )
    return load_scenario(scenario_path)


def _apply_overrides(scenario, replicates, seed, sigma_grid, noise, alpha, inflation):
    kw = {}
    if replicates is not None:
        kw["replicates"] = replicates
    if seed is not None:
        kw["base_seed"] = seed
    if sigma_grid is not None:
        try:
            kw["sigma_grid"] = tuple(float(s) for s in sigma_grid.split(","))
        except ValueError:
            raise InputError(f"bad --sigma-grid value {sigma_grid!r}") from None
    noise_kw = {}
    if noise is not None:
        noise_kw["kind"] = noise
    if alpha is not None:
        noise_kw["contamination_prob"] = alpha
    if inflation is not None:
        noise_kw["inflation"] = inflation
    if noise_kw:
        kw["noise"] = replace(scenario.noise, **noise_kw)
    return replace(scenario, **kw) if kw else scenario


def _scenario_options(func):
    decorators = [
        click.argument("scenario_path", required=False,
                       type=click.Path(exists=True, dir_okay=False),
                       envvar=SCENARIO_ENVVAR),
        click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False)),
        click.option("--replicates", type=int, default=None),
        click.option("--seed", type=int, default=None),
        click.option("--sigma-grid", type=str, default=None,
                     help="Comma-separated noise levels overriding the scenario."),
        click.option("--noise", type=click.Choice(["gaussian", "contaminated"]),
                     default=None),
        click.option("--alpha", type=float, default=None,
                     help="Contamination probability."),
        click.option("--inflation", type=float, default=None,
                     help="Contaminant standard-deviation multiplier."),
    ]
    for dec in reversed(decorators):
        func = dec(func)
    return func


def _scenario_params(scenario, rho=None, **extra):
    params = {
        "noise": scenario.noise.kind,
        "alpha": scenario.noise.contamination_prob,
        "inflation": scenario.noise.inflation,
        "sigma_grid": ",".join(format_exact(s) for s in scenario.sigma_grid),
        "replicates": scenario.replicates,
        "base_seed": scenario.base_seed,
        "rng": "numpy-PCG64",
    }
    if rho is not None:
        params["rho"] = rho
    params.update(extra)
    return _param_block(**params)


@main.command("simulate")
@_scenario_options
@_handle_errors
def simulate_cmd(scenario_path, out_dir, replicates, seed, sigma_grid, noise,
                 alpha, inflation):
    """Write per-replicate series and truth files for each noise level."""
    scenario = _apply_overrides(
        _load_scenario_arg(scenario_path),
        replicates, seed, sigma_grid, noise, alpha, inflation,
    )
    out = Path(out_dir)
    truth_cps = set(scenario.signal.change_points())
    for si, sigma in enumerate(scenario.sigma_grid):
        sc = with_sigma(scenario, sigma, si)
        subdir = out / f"sigma_{sigma:.3f}"
        subdir.mkdir(parents=True, exist_ok=True)
        params = _scenario_params(sc, sigma=format_exact(sigma))
        for r in range(1, sc.replicates + 1):
            rep = generate_replicate(sc, r)
            write_table(
                subdir / f"replicate_{r:04d}.tsv",
                params + [("replicate", r)],
                ["index", "ratio"],
                ([i + 1, format_ratio(v)] for i, v in enumerate(rep.series.values)),
            )
        write_table(
            subdir / "truth.tsv", params,
            ["index", "true_value", "is_change_point"],
            ([i + 1, format_exact(v), int(i + 1 in truth_cps)]
             for i, v in enumerate(rep.truth)),
        )
    click.echo(
        f"wrote {scenario.replicates} replicate(s) x {len(scenario.sigma_grid)} "
        f"noise level(s) to {out}"
    )


@main.command("evaluate")
@_scenario_options
@click.option("--cstar-grid", default="1,2", show_default=True,
              help="Comma-separated minimum-arm-width settings to compare.")
@click.option("--rho", default=0.01, show_default=True)
@click.option("--match-window", default=2, show_default=True)
@click.option("--theta", default=0.1, show_default=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
@_handle_errors
def evaluate_cmd(scenario_path, out_dir, replicates, seed, sigma_grid, noise,
                 alpha, inflation, cstar_grid, rho, match_window, theta, figures):
    """Run the replicate benchmark and write metric tables (and figures)."""
    scenario = _apply_overrides(
        _load_scenario_arg(scenario_path),
        replicates, seed, sigma_grid, noise, alpha, inflation,
    )
    try:
        cstars = [int(c) for c in cstar_grid.split(",")]
    except ValueError:
        raise InputError(f"bad --cstar-grid value {cstar_grid!r}") from None
    configs = [ThresholdConfig(c_star=c) for c in cstars]

    report = run_scenario(scenario, configs, rho=rho, window=match_window, theta=theta)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = _scenario_params(
        scenario, rho=rho, cstar_grid=cstar_grid,
        match_window=match_window, theta=theta,
    )
    rows = []
    for row in report.rows:
        for metric in ("atpr", "afpr", "atprsh", "amse"):
            value = row[metric]
            rows.append([
                format_exact(row["sigma"]), row["config"], metric,
                "NA" if value is None else format_exact(value),
            ])
    write_table(out / "metrics.tsv", params, ["sigma", "config", "metric", "value"], rows)
    with open(out / "metrics.json", "w") as fh:
        json.dump({"metadata": report.metadata, "rows": report.rows}, fh,
                  indent=2, sort_keys=True)
        fh.write("\n")
    if figures:
        from .plots import plot_metrics

        plot_metrics(report, out / "metrics.png")
    click.echo(f"wrote metrics for {len(configs)} config(s) to {out}")


@main.command("roc")
@_scenario_options
@click.option("--cstar", default=2, show_default=True)
@click.option("--rho", default=0.01, show_default=True)
@click.option("--match-window", default=2, show_default=True)
@click.option("--sweep-min", default=0.1, show_default=True)
@click.option("--sweep-max", default=3.0, show_default=True)
@click.option("--sweep-count", default=30, show_default=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
@_handle_errors
def roc_cmd(scenario_path, out_dir, replicates, seed, sigma_grid, noise, alpha,
            inflation, cstar, rho, match_window, sweep_min, sweep_max,
            sweep_count, figures):
    """Trace ROC curves over a threshold sweep for each noise level."""
    scenario = _apply_overrides(
        _load_scenario_arg(scenario_path),
        replicates, seed, sigma_grid, noise, alpha, inflation,
    )
    if sweep_min <= 0 or sweep_max < sweep_min or sweep_count < 1:
        raise InputError("invalid sweep grid options")
    sweep = np.geomspace(sweep_min, sweep_max, sweep_count)
    cfg = ThresholdConfig(c_star=cstar)

    results = {}
    for si, sigma in enumerate(scenario.sigma_grid):
        sc = with_sigma(scenario, sigma, si)
        results[sigma] = roc_curve(sc, cfg, sweep=sweep, rho=rho, window=match_window)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = _scenario_params(
        scenario, rho=rho, cstar=cstar,
        sweep=f"geomspace({sweep_min},{sweep_max},{sweep_count})",
        match_window=match_window,
    )
    point_rows = [
        [format_exact(sigma), format_exact(p.scale), format_exact(p.mean_fpr),
         format_exact(p.mean_tpr), format_exact(p.mean_fp)]
        for sigma in scenario.sigma_grid
        for p in results[sigma].points
    ]
    write_table(
        out / "roc_points.tsv", params,
        ["sigma", "scale", "mean_fpr", "mean_tpr", "mean_fp"], point_rows,
    )
    auc_rows = [
        [format_exact(sigma), cfg.label(), format_exact(results[sigma].auc),
         format_exact(results[sigma].partial_auc)]
        for sigma in scenario.sigma_grid
    ]
    write_table(
        out / "auc.tsv", params,
        ["sigma", "config", "auc", "partial_auc"], auc_rows,
    )
    if figures:
        from .plots import plot_roc

        plot_roc(results, out / "roc.png")
    click.echo(f"wrote ROC tables for {len(results)} noise level(s) to {out}")


if __name__ == "__main__":
    main()
