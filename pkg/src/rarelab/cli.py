"""Command line front end: ``rarelab profile | solve | decay | verify``.

Exit codes: 0 ok, 2 usage or config error, 3 numerical blowup,
4 insufficient data for a fit.
"""

from __future__ import annotations

import csv
import math
import sys

import click
import numpy as np

from . import __version__
from .decay_analysis import SeriesFileError
from .fitting import DecayDataError
from .flux_laws import ConvexFlux, FluxRangeError, flux_prime
from .harness import output_root as _output_root
from .harness import (
    decay_reports, fit_series_file, load_config, load_snapshots, plot_profiles,
    plot_reports, run_directory, run_experiment, summary_table, verdict_text, wall_time, write_reports,
)
from .pde_solver import ConfigError, NumericalBlowupError
from .wave_profiles import (
    CharacteristicMap, ProfileDomainError, contact_wave, profile_dt, profile_dx, profile_dxx, profile_envelopes,
    profile_value, rarefaction, riemann_data, smoothed_rarefaction, speed_field_checks,
)

EXIT_USAGE = 2
EXIT_BLOWUP = 3
EXIT_NO_DATA = 4


def _fail(message, code):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _root_option(f):
    return click.option("--output-root", type=click.Path(file_okay=False), default=None,
                        help="Output root (default $RARELAB_OUTPUT_ROOT, else ./runs).")(f)


@click.group()
@click.version_option(__version__, prog_name="rarelab")
def main():
    """Rarefaction-wave lab for viscous conservation laws."""


@main.command()
@click.option("--kind", type=click.Choice(["rarefaction", "smoothed", "contact"]), required=True)
@click.option("--flux", "flux_name", type=click.Choice(["burgers", "exponential"]), default="burgers")
@click.option("--um", type=float, default=-1.0, show_default=True, help="Left far-field state.")
@click.option("--up", type=float, default=1.0, show_default=True, help="Right far-field state.")
@click.option("--t", "t", type=float, default=1.0, show_default=True)
@click.option("--q", type=float, default=1.0, show_default=True, help="Smoothing exponent (> 1/2).")
@click.option("--mu", type=float, default=1.0, show_default=True, help="Contact-wave diffusion coefficient.")
@click.option("--speed", type=float, default=0.0, show_default=True, help="Contact-wave speed.")
@click.option("--x-min", type=float, default=None)
@click.option("--x-max", type=float, default=None)
@click.option("--dx", type=float, default=0.05, show_default=True, help="Sample spacing.")
@_root_option
def profile(kind, flux_name, um, up, t, q, mu, speed, x_min, x_max, dx, output_root):
    """Sample a wave profile and its derivatives to CSV, with an SVG overlay."""
    root = _output_root(output_root)
    flux = ConvexFlux.burgers() if flux_name == "burgers" else ConvexFlux.exponential()
    if um > up:
        raise click.UsageError("need --um <= --up")
    if t < 0 or not dx > 0:
        raise click.UsageError("need --t >= 0 and --dx > 0")
    try:
        if kind == "contact":
            prof = contact_wave(um, up, mu, speed)
            lo, hi = speed * t - 10.0 - 6.0 * math.sqrt(mu * t), speed * t + 10.0 + 6.0 * math.sqrt(mu * t)
        else:
            prof = rarefaction(flux, um, up) if kind == "rarefaction" else smoothed_rarefaction(flux, um, up, q)
            lo, hi = min(prof.lambda_minus * t, 0.0) - 10.0, max(prof.lambda_plus * t, 0.0) + 10.0
        lo = lo if x_min is None else x_min
        hi = hi if x_max is None else x_max
        if not hi > lo:
            raise click.UsageError("need --x-max > --x-min")
        k0, k1 = math.floor(lo / dx), math.ceil(hi / dx)
        x = np.arange(k0, k1 + 1) * dx
        columns = {"u": profile_value(prof, t, x)}
        if kind == "smoothed" or t > 0:
            columns["u_x"] = profile_dx(prof, t, x)
            columns["u_t"] = profile_dt(prof, t, x)
            columns["u_xx"] = profile_dxx(prof, t, x)
        overlay = {kind: columns["u"]}
        if kind == "smoothed":
            overlay["rarefaction"] = (profile_value(rarefaction(flux, um, up), t, x) if t > 0
                                      else riemann_data(um, up, x))
        elif kind == "contact":
            overlay["riemann data"] = riemann_data(um, up, x - speed * t)
    except (ProfileDomainError, FluxRangeError, ValueError) as exc:
        raise click.UsageError(str(exc)) from None

    out = root / "profiles"
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{kind}_t{t:.6f}"
    with open(out / f"{stem}.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x"] + list(columns))
        for i, xi in enumerate(x):
            w.writerow([repr(float(xi))] + [repr(float(columns[c][i])) for c in columns])
    plot_profiles(x, overlay, out / f"{stem}.svg", title=f"t = {t:g}")
    click.echo(str(out / f"{stem}.csv"))


@main.command("solve")
@click.argument("config", type=click.Path(dir_okay=False))
@_root_option
def solve_cmd(config, output_root):
    """Run the solver for CONFIG; write snapshots, norms.csv and manifest.json."""
    try:
        cfg = load_config(config)
    except ConfigError as exc:
        _fail(str(exc), EXIT_USAGE)
    try:
        result = run_experiment(cfg, output_root)
    except NumericalBlowupError as exc:
        _fail(str(exc), EXIT_BLOWUP)
    except ConfigError as exc:
        _fail(str(exc), EXIT_USAGE)
    m = result.manifest
    click.echo(f"run directory   {result.directory}")
    click.echo(f"snapshots       {len(result.snapshots)}")
    click.echo(f"steps           {m.monitor['steps']}")
    click.echo(f"mass defect     {m.monitor['relative_mass_defect']:.3e}")
    if m.oracle_max_error is not None:
        click.echo(f"oracle error    {m.oracle_max_error:.3e}")


@main.command()
@click.argument("config", type=click.Path(dir_okay=False), required=False)
@click.option("--series", type=click.Path(dir_okay=False, exists=True), default=None,
              help="Fit the columns of a norm-series CSV instead of a run.")
@click.option("--theoretical", type=float, default=None, help="Bounding exponent for --series columns.")
@click.option("--tolerance", type=float, default=0.1, show_default=True)
@click.option("--allow-log", is_flag=True, help="Divide --series values by max{1, ln(1+t)} before fitting.")
@click.option("--fresh", is_flag=True, help="Re-run the solver even if snapshots exist.")
@_root_option
def decay(config, series, theoretical, tolerance, allow_log, fresh, output_root):
    """Fit decay exponents for the checks in CONFIG (or a --series file)."""
    if (config is None) == (series is None):
        raise click.UsageError("give either CONFIG or --series")
    if series is not None:
        try:
            reports = fit_series_file(series, theoretical, tolerance, allow_log)
        except SeriesFileError as exc:
            _fail(str(exc), EXIT_USAGE)
        except DecayDataError as exc:
            _fail(str(exc), EXIT_NO_DATA)
        click.echo(summary_table(reports), nl=False)
        return
    try:
        cfg = load_config(config)
    except ConfigError as exc:
        _fail(str(exc), EXIT_USAGE)
    if not cfg.checks:
        _fail(f"{config}: no [checks] lines configured", EXIT_USAGE)
    directory = run_directory(cfg, output_root)
    loaded = None if fresh else load_snapshots(cfg, directory)
    if loaded is None:
        try:
            result = run_experiment(cfg, output_root)
        except NumericalBlowupError as exc:
            _fail(str(exc), EXIT_BLOWUP)
        snapshots, manifest = result.snapshots, result.manifest
    else:
        snapshots, manifest = loaded
    try:
        reports = decay_reports(cfg, snapshots)
    except DecayDataError as exc:
        _fail(str(exc), EXIT_NO_DATA)
    write_reports(directory, reports)
    table = summary_table(reports)
    (directory / "summary.txt").write_text(table, encoding="utf-8")
    plot_reports(reports, directory / "norms.svg")
    manifest.verdicts = {r.norm_label: r.passed for r in reports}
    manifest.finished = wall_time()
    manifest.write(directory)
    click.echo(table, nl=False)


def _parse_r(value):
    if value.lower() in ("inf", "infinity"):
        return math.inf
    r = float(value)
    if r < 1:
        raise click.BadParameter("norm order must be >= 1 or 'inf'")
    return r


@main.command()
@click.option("--flux", "flux_name", type=click.Choice(["burgers", "exponential"]), default="burgers")
@click.option("--um", type=float, default=-1.0, show_default=True)
@click.option("--up", type=float, default=1.0, show_default=True)
@click.option("--q", type=float, default=1.0, show_default=True, help="Smoothing exponent (> 1/2).")
@click.option("--r", "r_text", default="2", show_default=True, help="Norm order, or 'inf'.")
@click.option("--r-sweep", is_flag=True, help="Envelope rows for r in {1, 2, 4, inf}.")
@click.option("--t-min", type=float, default=10.0, show_default=True)
@click.option("--t-max", type=float, default=1000.0, show_default=True)
@click.option("--samples", type=int, default=20, show_default=True)
@click.option("--tolerance", type=float, default=0.1, show_default=True)
def verify(flux_name, um, up, q, r_text, r_sweep, t_min, t_max, samples, tolerance):
    """Check the smoothed-rarefaction invariants and decay envelopes."""
    if not q > 0.5:
        raise click.UsageError(f"q must exceed 1/2 (got {q:g})")
    if not um < up:
        raise click.UsageError("need --um < --up")
    if not 0 < t_min < t_max or samples < 2:
        raise click.UsageError("need 0 < --t-min < --t-max and --samples >= 2")
    try:
        r = _parse_r(r_text)
    except ValueError:
        raise click.UsageError(f"bad norm order {r_text!r}") from None
    flux = ConvexFlux.burgers() if flux_name == "burgers" else ConvexFlux.exponential()
    times = np.geomspace(t_min, t_max, samples)
    cmap = CharacteristicMap(q, float(flux_prime(flux, um)), float(flux_prime(flux, up)))
    click.echo(f"speed field w, q={q:g}, t in [{t_min:g}, {t_max:g}]")
    for check in speed_field_checks(cmap, times, r, tolerance):
        click.echo(f"  {check.name:<22} {verdict_text(check.passed):<5} {check.detail}")
    click.echo("profile envelopes (fitted / bound)")
    for rr in ((1.0, 2.0, 4.0, math.inf) if r_sweep else (r,)):
        rep = profile_envelopes(flux, q, um, up, times, rr, tolerance)
        cells = "  ".join(f"{ln.label} {ln.fitted:+.3f}/{ln.theoretical:+.3f} {verdict_text(ln.passed)}"
                          for ln in rep.lines)
        rs = "inf" if math.isinf(rr) else f"{rr:g}"
        click.echo(f"  r={rs:<4} {cells}")


if __name__ == "__main__":
    main()
