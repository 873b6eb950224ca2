"""Experiment configs, run directories, manifests and plots.

An experiment is described by a small TOML file::

    name = "burgers-rarefaction"

    [flux]
    kind = "burgers"            # burgers | exponential | zero

    [viscosity]
    kind = "regularized_power"  # regularized_power | ostwald_de_waele | linear
    p = 0.5
    mu = 1.0

    [far_field]
    u_minus = -1.0
    u_plus = 1.0

    [initial]
    kind = "profile_plus_bump"  # profile_plus_bump | mollified_riemann | constant_plus_bump
    profile = "smoothed"        # smoothed | rarefaction | contact
    q = 1.0
    amplitude = 0.5

    [grid]
    cells = 8192
    margin = 20.0
    boundary = "profile"

    [time]
    t_end = 500.0
    snapshots = 40

    [checks]
    lines = ["rarefaction/l1/Lq", { key = "rarefaction/dx/Lq+1", q = 1 }]

Every run writes into ``<output root>/<name>/``.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import re
import shutil
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .decay_analysis import DecayReport, norm_series, theorem_check, theorem_line, write_norm_series_csv
from .fitting import DecayDataError, fit_decay
from .flux_laws import ConvexFlux, ViscosityKind, ViscosityLaw
from .pde_solver import (
    BOUNDARY_MODES, ConfigError, GridSolution, InitialData, RunMonitor, SolverConfig,
    read_snapshot_csv, required_domain, snapshot_filename, solve, write_snapshot_csv,
)
from .wave_profiles import ProfileDomainError, contact_wave, profile_value, rarefaction, smoothed_rarefaction

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

OUTPUT_ROOT_ENV = "RARELAB_OUTPUT_ROOT"
DEFAULT_OUTPUT_ROOT = "runs"
_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


class ExperimentConfigError(ConfigError):
    """Malformed experiment config; ``line`` is 1-based when known."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = f"{path or '<config>'}:{line}" if line else f"{path or '<config>'}"
        super().__init__(f"{where}: {message}")


FLUXES = {
    "burgers": ConvexFlux.burgers,
    "exponential": ConvexFlux.exponential,
    "zero": ConvexFlux.zero,
}


@dataclass(frozen=True)
class CheckSpec:
    key: str
    q: float = 2.0

    @property
    def label(self):
        return theorem_line(self.key, self.q).label


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    flux_kind: str
    viscosity_kind: str
    p: float
    mu: float
    u_minus: float
    u_plus: float
    initial_kind: str
    profile: str = "smoothed"
    smoothing_q: float = 1.0
    amplitude: float = 0.0
    center: float = 0.0
    width: float = 1.0
    profile_time: float = 0.0
    noise_bumps: int = 0
    noise_amplitude: float = 0.0
    seed: int = 0
    cells: int = 8192
    margin: float = 20.0
    x_left: float | None = None
    x_right: float | None = None
    boundary: str = "pinned"
    limiter: str = "none"
    cfl_advection: float = 0.2
    cfl_diffusion: float = 0.4
    dt_override: float | None = None
    t_start: float = 0.0
    t_end: float = 500.0
    times: tuple = ()
    checks: tuple = ()
    smooth_q: float = 1.0
    tolerance: float = 0.1
    eps_slack: float = 0.05
    min_decades: float = 1.5
    oracle: str | None = None
    output_dir: str | None = None
    save_snapshots: bool = True
    text: str = field(default="", repr=False, compare=False)

    @property
    def config_hash(self):
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()

    def flux(self):
        return FLUXES[self.flux_kind]()

    def law(self):
        return ViscosityLaw(ViscosityKind(self.viscosity_kind), self.p, self.mu)

    def reference_profile(self):
        fl = self.flux()
        if self.profile == "contact":
            return contact_wave(self.u_minus, self.u_plus, self.mu)
        if self.profile == "rarefaction":
            return rarefaction(fl, self.u_minus, self.u_plus)
        return smoothed_rarefaction(fl, self.u_minus, self.u_plus, self.smoothing_q)

    def initial_data(self):
        extra = ()
        if self.noise_bumps:
            rng = np.random.default_rng(self.seed)
            extra = tuple(
                (float(a), float(c), float(s))
                for a, c, s in zip(
                    rng.uniform(-self.noise_amplitude, self.noise_amplitude, self.noise_bumps),
                    rng.uniform(-10.0, 10.0, self.noise_bumps),
                    rng.uniform(0.5, 2.0, self.noise_bumps),
                )
            )
        if self.initial_kind == "mollified_riemann":
            init = InitialData.mollified_riemann(self.flux(), self.u_minus, self.u_plus, self.smoothing_q)
            return replace(init, bumps=extra)
        if self.initial_kind == "constant_plus_bump":
            return InitialData.constant_plus_bump(self.u_minus, self.amplitude, self.center, self.width, extra)
        return InitialData.profile_plus_bump(self.reference_profile(), self.amplitude, self.center, self.width,
                                             self.profile_time, extra)

    def domain(self):
        lo, hi = required_domain(self.flux(), self.u_minus, self.u_plus, self.t_end, self.margin)
        return (lo if self.x_left is None else self.x_left), (hi if self.x_right is None else self.x_right)

    def snapshot_times(self):
        return tuple(t for t in self.times if self.t_start <= t <= self.t_end)

    def solver_config(self):
        x_left, x_right = self.domain()
        return SolverConfig(
            flux=self.flux(), law=self.law(), initial=self.initial_data(),
            x_left=x_left, x_right=x_right, n_cells=self.cells, t_end=self.t_end,
            snapshot_times=self.snapshot_times(), cfl_advection=self.cfl_advection,
            cfl_diffusion=self.cfl_diffusion, t_start=self.t_start, margin=self.margin,
            dt_override=self.dt_override, limiter=self.limiter, boundary=self.boundary,
        )


def _key_line(text, section, key):
    """1-based line of ``key`` inside ``[section]`` (top level when ``section`` is None)."""
    current = None
    header_line = None
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        m = re.match(r"^\[([^\[\]]+)\]", line)
        if m:
            current = m.group(1).strip()
            if current == section:
                header_line = i
            continue
        if current == section and key is not None and re.match(rf"^{re.escape(key)}\s*=", line):
            return i
    return header_line


class _Reader:
    """Typed access to a parsed TOML table with line-numbered errors."""

    def __init__(self, data, text, path):
        self.data, self.text, self.path = data, text, path

    def fail(self, message, section=None, key=None):
        raise ExperimentConfigError(message, _key_line(self.text, section, key), self.path)

    def table(self, section):
        value = self.data.get(section, {})
        if not isinstance(value, dict):
            self.fail(f"'{section}' must be a table", None, section)
        return value

    def get(self, section, key, kind, default=None, choices=None, required=False):
        table = self.data if section is None else self.table(section)
        name = key if section is None else f"{section}.{key}"
        if key not in table:
            if required:
                self.fail(f"missing required key '{name}'", section, None)
            return default
        value = table[key]
        if kind is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                self.fail(f"'{name}' must be a number", section, key)
            value = float(value)
            if not math.isfinite(value):
                self.fail(f"'{name}' must be finite", section, key)
        elif kind is int:
            if isinstance(value, bool) or not isinstance(value, int):
                self.fail(f"'{name}' must be an integer", section, key)
        elif kind is bool:
            if not isinstance(value, bool):
                self.fail(f"'{name}' must be true or false", section, key)
        elif kind is str:
            if not isinstance(value, str):
                self.fail(f"'{name}' must be a string", section, key)
        if choices is not None and value not in choices:
            self.fail(f"'{name}' must be one of {', '.join(map(str, choices))}; got {value!r}", section, key)
        return value

    def unknown_keys(self, allowed):
        for section, keys in allowed.items():
            table = self.data if section is None else self.data.get(section, {})
            if not isinstance(table, dict):
                continue
            for key in table:
                if section is None and key in allowed:
                    continue
                if key not in keys:
                    where = key if section is None else f"{section}.{key}"
                    self.fail(f"unknown key '{where}'", section, key)


_ALLOWED = {
    None: {"name", "seed"},
    "flux": {"kind"},
    "viscosity": {"kind", "p", "mu"},
    "far_field": {"u_minus", "u_plus"},
    "initial": {"kind", "profile", "q", "amplitude", "center", "width", "profile_time",
                "noise_bumps", "noise_amplitude"},
    "grid": {"cells", "margin", "x_left", "x_right", "boundary", "limiter", "cfl_advection",
             "cfl_diffusion", "dt_override"},
    "time": {"t_start", "t_end", "snapshots", "t_first", "times"},
    "checks": {"lines", "q", "smooth_q", "tolerance", "eps_slack", "min_decades"},
    "oracle": {"kind"},
    "output": {"dir", "save_snapshots"},
}


def parse_config(text, path=None) -> ExperimentConfig:
    """Parse and validate experiment TOML; raises :class:`ExperimentConfigError`."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ExperimentConfigError(f"TOML syntax error: {exc}", int(m.group(1)) if m else None, path) from None
    rd = _Reader(data, text, path)
    rd.unknown_keys(_ALLOWED)

    name = rd.get(None, "name", str, required=True)
    if not _NAME_RE.match(name):
        rd.fail(f"name {name!r} is not filesystem-safe (letters, digits, '.', '_', '-')", None, "name")
    seed = rd.get(None, "seed", int, 0)

    flux_kind = rd.get("flux", "kind", str, "burgers", choices=tuple(FLUXES))
    vkind = rd.get("viscosity", "kind", str, "regularized_power", choices=tuple(k.value for k in ViscosityKind))
    p = rd.get("viscosity", "p", float, 1.0)
    mu = rd.get("viscosity", "mu", float, 1.0)
    if not p > 0:
        rd.fail("viscosity.p must be positive", "viscosity", "p")
    if not mu > 0:
        rd.fail("viscosity.mu must be positive", "viscosity", "mu")
    if vkind == "ostwald_de_waele" and p < 1:
        rd.fail("ostwald_de_waele needs p >= 1", "viscosity", "p")

    u_minus = rd.get("far_field", "u_minus", float, 0.0)
    u_plus = rd.get("far_field", "u_plus", float, u_minus)
    if u_minus > u_plus:
        rd.fail("need u_minus <= u_plus", "far_field", "u_plus")

    ikind = rd.get("initial", "kind", str, "profile_plus_bump",
                   choices=("profile_plus_bump", "mollified_riemann", "constant_plus_bump"))
    profile = rd.get("initial", "profile", str, "smoothed", choices=("smoothed", "rarefaction", "contact"))
    sq = rd.get("initial", "q", float, 1.0)
    if not sq > 0.5:
        rd.fail("initial.q must exceed 1/2", "initial", "q")
    if ikind == "constant_plus_bump" and u_minus != u_plus:
        rd.fail("constant_plus_bump needs u_minus == u_plus", "initial", "kind")
    if flux_kind == "zero" and ikind != "constant_plus_bump" and profile != "contact":
        rd.fail("zero flux pairs with profile = \"contact\" or a constant state", "initial", "profile")
    width = rd.get("initial", "width", float, 1.0)
    if not width > 0:
        rd.fail("initial.width must be positive", "initial", "width")
    noise_bumps = rd.get("initial", "noise_bumps", int, 0)
    if noise_bumps < 0:
        rd.fail("initial.noise_bumps must be >= 0", "initial", "noise_bumps")

    cells = rd.get("grid", "cells", int, 8192)
    if cells < 5:
        rd.fail("grid.cells must be at least 5", "grid", "cells")
    margin = rd.get("grid", "margin", float, 20.0)
    if margin < 20:
        rd.fail("grid.margin must be at least 20", "grid", "margin")
    dt_override = rd.get("grid", "dt_override", float)
    if dt_override is not None and not dt_override > 0:
        rd.fail("grid.dt_override must be positive", "grid", "dt_override")

    t_start = rd.get("time", "t_start", float, 0.0)
    t_end = rd.get("time", "t_end", float, 500.0)
    if t_end < t_start:
        rd.fail("time.t_end precedes time.t_start", "time", "t_end")
    if "times" in rd.table("time"):
        raw = rd.table("time")["times"]
        if not isinstance(raw, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
            rd.fail("time.times must be a list of numbers", "time", "times")
        times = tuple(float(v) for v in raw)
        if any(b <= a for a, b in zip(times, times[1:])):
            rd.fail("time.times must be strictly increasing", "time", "times")
    else:
        count = rd.get("time", "snapshots", int, 40)
        if count < 1:
            rd.fail("time.snapshots must be positive", "time", "snapshots")
        t_first = rd.get("time", "t_first", float, max(1.0, t_start))
        if not t_first > 0:
            rd.fail("time.t_first must be positive", "time", "t_first")
        times = log_schedule(t_first, t_end, count)

    checks = []
    cq = rd.get("checks", "q", float, 2.0)
    raw_lines = rd.table("checks").get("lines", [])
    if not isinstance(raw_lines, list):
        rd.fail("checks.lines must be a list", "checks", "lines")
    for entry in raw_lines:
        if isinstance(entry, str):
            spec = CheckSpec(entry, cq)
        elif isinstance(entry, dict) and isinstance(entry.get("key"), str):
            qv = entry.get("q", cq)
            if isinstance(qv, bool) or not isinstance(qv, (int, float)):
                rd.fail("check q must be a number", "checks", "lines")
            spec = CheckSpec(entry["key"], float(qv))
        else:
            rd.fail("each check is a key string or a table with 'key' (and optional 'q')", "checks", "lines")
        try:
            theorem_line(spec.key, spec.q)
        except (KeyError, ValueError) as exc:
            rd.fail(f"bad check {spec.key!r}: {exc}", "checks", "lines")
        checks.append(spec)

    oracle = rd.get("oracle", "kind", str, None, choices=("heat",))
    if oracle == "heat" and not (flux_kind == "zero" and profile == "contact" and ikind == "profile_plus_bump"
                                 and (vkind == "linear" or p == 1.0)):
        rd.fail("heat oracle needs zero flux, p = 1 and contact-wave initial data", "oracle", "kind")

    boundary = rd.get("grid", "boundary", str, "pinned", choices=BOUNDARY_MODES)
    if boundary == "profile" and ikind == "constant_plus_bump":
        rd.fail("boundary = \"profile\" needs profile initial data", "grid", "boundary")

    cfg = ExperimentConfig(
        name=name, flux_kind=flux_kind, viscosity_kind=vkind, p=p, mu=mu,
        u_minus=u_minus, u_plus=u_plus, initial_kind=ikind, profile=profile, smoothing_q=sq,
        amplitude=rd.get("initial", "amplitude", float, 0.0),
        center=rd.get("initial", "center", float, 0.0), width=width,
        profile_time=rd.get("initial", "profile_time", float, 0.0),
        noise_bumps=noise_bumps, noise_amplitude=rd.get("initial", "noise_amplitude", float, 0.0),
        seed=seed, cells=cells, margin=margin,
        x_left=rd.get("grid", "x_left", float), x_right=rd.get("grid", "x_right", float),
        boundary=boundary, limiter=rd.get("grid", "limiter", str, "none", choices=("none", "minmod")),
        cfl_advection=rd.get("grid", "cfl_advection", float, 0.2),
        cfl_diffusion=rd.get("grid", "cfl_diffusion", float, 0.4),
        dt_override=dt_override, t_start=t_start, t_end=t_end, times=times, checks=tuple(checks),
        smooth_q=rd.get("checks", "smooth_q", float, 1.0),
        tolerance=rd.get("checks", "tolerance", float, 0.1),
        eps_slack=rd.get("checks", "eps_slack", float, 0.05),
        min_decades=rd.get("checks", "min_decades", float, 1.5),
        oracle=oracle, output_dir=rd.get("output", "dir", str, None),
        save_snapshots=rd.get("output", "save_snapshots", bool, True), text=text,
    )
    try:
        x_left, x_right = cfg.domain()
        cfg.solver_config()
        lo, hi = required_domain(cfg.flux(), u_minus, u_plus, t_end, margin)
        if x_left > lo or x_right < hi:
            rd.fail(f"domain [{x_left:g}, {x_right:g}] does not cover [{lo:g}, {hi:g}] needed up to t={t_end:g}",
                    "grid", "x_left" if x_left > lo else "x_right")
    except (ConfigError, ProfileDomainError, ValueError) as exc:
        if isinstance(exc, ExperimentConfigError):
            raise
        rd.fail(str(exc), "grid", None)
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ExperimentConfigError(f"cannot read config: {exc.strerror}", None, str(path)) from None
    return parse_config(text, str(path))


def log_schedule(t_first, t_end, count):
    """``count`` log-spaced times in ``[t_first, t_end]``; empty when ``t_end < t_first``."""
    if t_end < t_first:
        return ()
    if count == 1 or t_end == t_first:
        return (float(t_end),)
    ts = np.geomspace(t_first, t_end, count)
    ts[-1] = t_end
    return tuple(float(t) for t in ts)


def output_root(option=None):
    """CLI option, then ``$RARELAB_OUTPUT_ROOT``, then ``./runs``."""
    return Path(option or os.environ.get(OUTPUT_ROOT_ENV) or DEFAULT_OUTPUT_ROOT)


def run_directory(cfg: ExperimentConfig, root=None):
    return output_root(root) / (cfg.output_dir or cfg.name)


def wall_time():
    """UTC timestamp; ``$SOURCE_DATE_EPOCH`` pins it for reproducible manifests."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        moment = datetime.now(tz=timezone.utc)
    return moment.isoformat(timespec="seconds")


@dataclass
class RunManifest:
    name: str
    config_hash: str
    tool_version: str
    started: str
    finished: str = ""
    monitor: dict = field(default_factory=dict)
    snapshots: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    oracle_max_error: float | None = None

    def to_json(self):
        return json.dumps(self.__dict__, indent=2) + "\n"

    def write(self, directory):
        path = Path(directory) / "manifest.json"
        path.write_text(self.to_json(), encoding="utf-8")
        return path

    @classmethod
    def read(cls, directory):
        data = json.loads((Path(directory) / "manifest.json").read_text(encoding="utf-8"))
        return cls(**data)


@dataclass
class RunResult:
    directory: Path
    snapshots: list
    manifest: RunManifest


def heat_oracle_error(cfg: ExperimentConfig, snapshots):
    """Largest ``|u - U|`` over snapshots for the contact-wave oracle."""
    prof = cfg.reference_profile()
    worst = 0.0
    for t, state in snapshots:
        exact = profile_value(prof, cfg.profile_time + (t - cfg.t_start), state.x)
        worst = max(worst, float(np.max(np.abs(np.asarray(state.values) - exact))))
    return worst


def norm_columns(cfg: ExperimentConfig, snapshots):
    """Times and ``{label: values}`` for mass and every configured check line."""
    times = [t for t, _ in snapshots]
    columns = {"mass": [s.mass() for _, s in snapshots]}
    flux, law = cfg.flux(), cfg.law()
    for spec in cfg.checks:
        series = dict(norm_series(spec.key, snapshots, flux, law, spec.q, cfg.smooth_q))
        columns[spec.label] = [series.get(t, math.nan) for t in times]
    return times, columns


def run_experiment(cfg: ExperimentConfig, root=None, monitor=None) -> RunResult:
    """Solve, write snapshots, the norm-series table and the manifest."""
    directory = run_directory(cfg, root)
    snap_dir = directory / "snapshots"
    if snap_dir.exists():
        shutil.rmtree(snap_dir)
    snap_dir.mkdir(parents=True)
    manifest = RunManifest(cfg.name, cfg.config_hash, __version__, wall_time())
    mon = monitor if monitor is not None else RunMonitor()
    snapshots = solve(cfg.solver_config(), mon)
    if cfg.save_snapshots:
        for _, state in snapshots:
            manifest.snapshots.append(write_snapshot_csv(state, snap_dir).name)
    times, columns = norm_columns(cfg, snapshots)
    write_norm_series_csv(directory / "norms.csv", times, columns)
    if cfg.oracle == "heat":
        manifest.oracle_max_error = heat_oracle_error(cfg, snapshots)
    manifest.monitor = mon.as_dict()
    manifest.finished = wall_time()
    manifest.write(directory)
    return RunResult(directory, snapshots, manifest)


def load_snapshots(cfg: ExperimentConfig, directory):
    """Snapshots saved by a previous run of the same config, or ``None``."""
    directory = Path(directory)
    try:
        manifest = RunManifest.read(directory)
    except (OSError, ValueError, TypeError):
        return None
    if manifest.config_hash != cfg.config_hash or not manifest.snapshots:
        return None
    x_left, x_right = cfg.domain()
    out = []
    for fname in manifest.snapshots:
        path = directory / "snapshots" / fname
        if not path.exists():
            return None
        s = read_snapshot_csv(path)
        out.append((s.t, GridSolution(x_left, x_right, s.n_cells, s.values, s.t, cfg.u_minus, cfg.u_plus)))
    return out, manifest


def safe_label(label):
    return re.sub(r"[^A-Za-z0-9._-]+", "_", label).strip("_")


def decay_reports(cfg: ExperimentConfig, snapshots):
    """One :class:`DecayReport` per configured check line."""
    flux, law = cfg.flux(), cfg.law()
    return [
        theorem_check(spec.key, snapshots, flux, law, q=spec.q, smooth_q=cfg.smooth_q,
                      tolerance=cfg.tolerance, eps_slack=cfg.eps_slack, min_decades=cfg.min_decades)
        for spec in cfg.checks
    ]


def verdict_text(passed):
    return "n/a" if passed is None else ("pass" if passed else "FAIL")


def summary_table(reports):
    """Fixed-width table with columns norm, fitted, theoretical, verdict."""
    width = max([len("norm")] + [len(r.norm_label) for r in reports])
    rows = [f"{'norm':<{width}}  {'fitted':>9}  {'theoretical':>11}  verdict"]
    for r in reports:
        rows.append(f"{r.norm_label:<{width}}  {r.fitted_exponent:>9.4f}  {r.theoretical_exponent:>11.4f}  "
                    f"{verdict_text(r.passed)}")
    return "\n".join(rows) + "\n"


def write_reports(directory, reports):
    rdir = Path(directory) / "reports"
    rdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for rep in reports:
        path = rdir / f"{safe_label(rep.norm_label)}.json"
        path.write_text(rep.to_json() + "\n", encoding="utf-8")
        paths.append(path)
    return paths


def fit_series_file(path, theoretical=None, tolerance=0.1, allow_log=False):
    """Reports for each column of a norm-series CSV (planted or measured)."""
    from .decay_analysis import read_norm_series_csv

    times, columns = read_norm_series_csv(path)
    reports = []
    for label, values in columns.items():
        series = [(float(t), float(v)) for t, v in zip(times, values) if math.isfinite(v)]
        fit = fit_decay(series, allow_log=allow_log)
        fitted = fit.corrected_exponent if allow_log else fit.exponent
        target = math.nan if theoretical is None else float(theoretical)
        verdict = None if theoretical is None else bool(fitted <= target + tolerance)
        reports.append(DecayReport(label, tuple(series), float(fitted), fit.window, target, allow_log, verdict))
    return reports


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "rarelab"
    return plt


def save_svg(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})


def plot_reports(reports, path):
    """Log-log norm curves with a guide line of the bounding slope through the last point."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for rep in reports:
        data = np.asarray([p for p in rep.series if p[1] > 0], dtype=float)
        if data.size == 0:
            continue
        line, = ax.loglog(1.0 + data[:, 0], data[:, 1], marker=".", label=rep.norm_label)
        if math.isfinite(rep.theoretical_exponent):
            t_end, v_end = 1.0 + data[-1, 0], data[-1, 1]
            guide = v_end * ((1.0 + data[:, 0]) / t_end) ** rep.theoretical_exponent
            ax.loglog(1.0 + data[:, 0], guide, linestyle="--", color=line.get_color(), linewidth=0.8)
    ax.set_xlabel("1 + t")
    ax.set_ylabel("norm")
    ax.legend(fontsize="small")
    fig.tight_layout()
    save_svg(fig, path)
    plt.close(fig)
    return Path(path)


def plot_profiles(x, curves, path, title=""):
    """Overlay of sampled profiles; ``curves`` maps a legend label to values."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for label, values in curves.items():
        ax.plot(x, values, label=label)
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    if title:
        ax.set_title(title)
    ax.legend(fontsize="small")
    fig.tight_layout()
    save_svg(fig, path)
    plt.close(fig)
    return Path(path)
