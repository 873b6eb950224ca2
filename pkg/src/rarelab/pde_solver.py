"""Finite-volume solver for ``u_t + (f(u) - sigma(u_x))_x = 0`` on a truncated line.

The semi-discrete scheme is

    du_j/dt = -(F_{j+1/2} - F_{j-1/2}) / dx,
    F_{j+1/2} = G(u_j, u_{j+1}) - sigma((u_{j+1} - u_j) / dx),

with ``G`` the Godunov flux, advanced by the two-stage SSP Runge-Kutta
method. The first and last cells are Dirichlet cells pinned to the far-field
states.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .flux_laws import ConvexFlux, ViscosityLaw, godunov_flux
from .wave_profiles import ProfileKind, WaveProfile, contact_wave, profile_value, smoothed_rarefaction


class ConfigError(ValueError):
    pass


class NumericalBlowupError(RuntimeError):
    def __init__(self, t):
        super().__init__(f"numerical blowup (divergent or non-finite state) at t={t:.6g}")
        self.t = t


@dataclass(frozen=True)
class GridSolution:
    x_left: float
    x_right: float
    n_cells: int
    values: np.ndarray = field(repr=False)
    t: float
    u_minus: float
    u_plus: float

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.n_cells,):
            raise ValueError(f"expected {self.n_cells} values, got shape {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def dx(self):
        return (self.x_right - self.x_left) / self.n_cells

    @property
    def x(self):
        return cell_centers(self.x_left, self.x_right, self.n_cells)

    def mass(self):
        return float(np.sum(self.values) * self.dx)

    def with_values(self, values, t):
        return GridSolution(self.x_left, self.x_right, self.n_cells, values, t, self.u_minus, self.u_plus)


def cell_centers(x_left, x_right, n_cells):
    dx = (x_right - x_left) / n_cells
    return x_left + (np.arange(n_cells) + 0.5) * dx


class InitialKind(str, enum.Enum):
    PROFILE_PLUS_BUMP = "profile_plus_bump"
    MOLLIFIED_RIEMANN = "mollified_riemann"
    CONSTANT_PLUS_BUMP = "constant_plus_bump"


@dataclass(frozen=True)
class InitialData:
    """Reference profile (or constant) plus Gaussian bumps ``a exp(-(x-xc)^2/s^2)``.

    ``bumps`` holds ``(a, xc, s)`` triples; the factories put the main bump
    first.
    """

    kind: InitialKind
    profile: WaveProfile | None = None
    profile_time: float = 0.0
    constant: float = 0.0
    bumps: tuple = ()

    @classmethod
    def profile_plus_bump(cls, profile, amplitude=0.0, center=0.0, width=1.0, profile_time=0.0, extra=()):
        return cls(InitialKind.PROFILE_PLUS_BUMP, profile, float(profile_time), 0.0,
                   ((float(amplitude), float(center), float(width)),) + tuple(extra))

    @classmethod
    def mollified_riemann(cls, flux, u_minus, u_plus, q=1.0):
        return cls(InitialKind.MOLLIFIED_RIEMANN, smoothed_rarefaction(flux, u_minus, u_plus, q), 0.0)

    @classmethod
    def constant_plus_bump(cls, constant, amplitude=0.0, center=0.0, width=1.0, extra=()):
        return cls(InitialKind.CONSTANT_PLUS_BUMP, None, 0.0, float(constant),
                   ((float(amplitude), float(center), float(width)),) + tuple(extra))

    def far_fields(self):
        if self.kind is InitialKind.CONSTANT_PLUS_BUMP:
            return self.constant, self.constant
        return self.profile.u_minus, self.profile.u_plus

    def base(self, x):
        if self.kind is InitialKind.CONSTANT_PLUS_BUMP:
            return np.full_like(x, self.constant)
        return np.asarray(profile_value(self.profile, self.profile_time, x), dtype=float)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        u = self.base(x)
        for a, xc, s in self.bumps:
            if a != 0.0:
                u = u + a * np.exp(-(((x - xc) / s) ** 2))
        return u


@dataclass(frozen=True)
class SolverConfig:
    flux: ConvexFlux
    law: ViscosityLaw
    initial: InitialData
    x_left: float
    x_right: float
    n_cells: int
    t_end: float
    snapshot_times: tuple = ()
    cfl_advection: float = 0.2
    cfl_diffusion: float = 0.4
    t_start: float = 0.0
    margin: float = 20.0
    dt_override: float | None = None
    limiter: str = "none"
    boundary: str = "pinned"

    def __post_init__(self):
        if not 0 < self.cfl_advection <= 1:
            raise ConfigError("cfl_advection must lie in (0, 1]")
        if not 0 < self.cfl_diffusion <= 0.5:
            raise ConfigError("cfl_diffusion must lie in (0, 0.5]")
        if self.n_cells < 5:
            raise ConfigError("need at least 5 cells")
        if not self.x_right > self.x_left:
            raise ConfigError("x_right must exceed x_left")
        if self.t_end < self.t_start:
            raise ConfigError("t_end precedes t_start")
        if self.limiter not in ("none", "minmod"):
            raise ConfigError(f"unknown limiter {self.limiter!r}")
        if self.boundary not in BOUNDARY_MODES:
            raise ConfigError(f"unknown boundary mode {self.boundary!r}")
        if self.boundary == "profile" and self.initial.profile is None:
            raise ConfigError("boundary mode 'profile' needs profile initial data")

    @property
    def dx(self):
        return (self.x_right - self.x_left) / self.n_cells

    def output_times(self):
        ts = {float(t) for t in self.snapshot_times if self.t_start <= t <= self.t_end}
        ts.add(float(self.t_end))
        return sorted(ts)


BOUNDARY_MODES = ("pinned", "profile", "outflow")


def boundary_values(config: SolverConfig, t):
    """End-cell values at time ``t`` for the Dirichlet modes.

    ``pinned`` holds the far-field states. ``profile`` follows the reference
    profile of the initial data, which matters when its tails decay only
    algebraically (smoothed rarefaction with ``q = 1``).
    """
    u_minus, u_plus = config.initial.far_fields()
    if config.boundary != "profile":
        return u_minus, u_plus
    profile = config.initial.profile
    tp = config.initial.profile_time + (t - config.t_start)
    if profile.kind is ProfileKind.RAREFACTION and tp <= 0:
        return u_minus, u_plus
    ends = np.array([config.x_left + 0.5 * config.dx, config.x_right - 0.5 * config.dx])
    left, right = profile_value(profile, tp, ends)
    return float(left), float(right)


def required_domain(flux: ConvexFlux, u_minus, u_plus, t_end, margin=20.0):
    """Smallest ``(x_left, x_right)`` holding the fan at ``t_end`` plus ``margin``."""
    if flux.is_zero:
        lm = lp = 0.0
    else:
        lm = float(flux.df(np.asarray(float(u_minus))))
        lp = float(flux.df(np.asarray(float(u_plus))))
    return min(lm * t_end, 0.0) - margin, max(lp * t_end, 0.0) + margin


def build_initial(config: SolverConfig) -> GridSolution:
    """Sample the initial datum at cell centres; end cells take ``u_minus``/``u_plus``."""
    u_minus, u_plus = config.initial.far_fields()
    if config.margin < 20:
        raise ConfigError("margin must be at least 20")
    lo, hi = required_domain(config.flux, u_minus, u_plus, config.t_end, config.margin)
    if config.x_left > lo or config.x_right < hi:
        raise ConfigError(
            f"domain [{config.x_left:g}, {config.x_right:g}] does not cover [{lo:g}, {hi:g}] needed up to t={config.t_end:g}"
        )
    x = cell_centers(config.x_left, config.x_right, config.n_cells)
    u = config.initial(x)
    if config.boundary == "outflow":
        u[0], u[-1] = u[1], u[-2]
    else:
        u[0], u[-1] = boundary_values(config, config.t_start)
    return GridSolution(config.x_left, config.x_right, config.n_cells, u, config.t_start, u_minus, u_plus)


def _minmod_slopes(u):
    d = np.diff(u)
    s = np.zeros_like(u)
    a, b = d[:-1], d[1:]
    s[1:-1] = np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)
    return s


def interface_fluxes(u, dx, flux: ConvexFlux, law: ViscosityLaw, limiter="none"):
    """Numerical fluxes at the ``n - 1`` interfaces between cells."""
    if limiter == "minmod":
        s = _minmod_slopes(u)
        ul, ur = u[:-1] + 0.5 * s[:-1], u[1:] - 0.5 * s[1:]
    else:
        ul, ur = u[:-1], u[1:]
    conv = godunov_flux(flux, ul, ur)
    return conv - law.sigma((u[1:] - u[:-1]) / dx)


def semi_discrete_rhs(u, dx, flux, law, limiter="none"):
    """``du/dt`` on all cells (zero on the pinned end cells) and the two end fluxes."""
    F = interface_fluxes(u, dx, flux, law, limiter)
    rhs = np.zeros_like(u)
    rhs[1:-1] = -(F[1:] - F[:-1]) / dx
    return rhs, F[0], F[-1]


def _stable_dt_arrays(u, dx, flux, law, cfl_a, cfl_d):
    dt = math.inf
    if not flux.is_zero:
        amax = float(np.max(np.abs(flux.df(u))))
        if amax > 0:
            dt = cfl_a * dx / amax
    smax = law.max_slope(np.diff(u) / dx)
    if smax > 0:
        dt = min(dt, cfl_d * dx * dx / smax)
    return dt


def stable_dt(state: GridSolution, config: SolverConfig):
    """Explicit step bound ``min(cfl_a dx / max|f'|, cfl_d dx^2 / max sigma')``.

    The result is shortened to land on the next output time after ``state.t``.
    """
    dt = _stable_dt_arrays(np.asarray(state.values), state.dx, config.flux, config.law,
                           config.cfl_advection, config.cfl_diffusion)
    later = [t for t in config.output_times() if t > state.t]
    if later:
        dt = min(dt, later[0] - state.t)
    if not dt > 0:
        raise RuntimeError(f"non-positive time step {dt} at t={state.t}")
    return dt


def _set_ends(u, mode, ends):
    if mode == "outflow":
        u[0], u[-1] = u[1], u[-2]
    elif ends is not None:
        u[0], u[-1] = ends


def _ssp_rk2(u, dt, dx, flux, law, limiter, mode="pinned", ends=None):
    """Two-stage SSP step; ``ends`` are the Dirichlet values at ``t + dt``."""
    L0, a0, b0 = semi_discrete_rhs(u, dx, flux, law, limiter)
    u1 = u + dt * L0
    _set_ends(u1, mode, ends)
    L1, a1, b1 = semi_discrete_rhs(u1, dx, flux, law, limiter)
    u2 = 0.5 * u + 0.5 * (u1 + dt * L1)
    _set_ends(u2, mode, ends)
    boundary = 0.5 * dt * ((a0 - b0) + (a1 - b1))
    return u2, float(boundary)


def step(state: GridSolution, dt, config: SolverConfig) -> GridSolution:
    """One SSP-RK2 step; raises :class:`NumericalBlowupError` on non-finite output."""
    u = np.array(state.values)
    ends = None if config.boundary == "pinned" else boundary_values(config, state.t + dt)
    u2, _ = _ssp_rk2(u, dt, state.dx, config.flux, config.law, config.limiter, config.boundary, ends)
    if not np.all(np.isfinite(u2)):
        raise NumericalBlowupError(state.t + dt)
    return state.with_values(u2, state.t + dt)


@dataclass
class RunMonitor:
    """Conservation and extremum bookkeeping collected by :func:`solve`."""

    mass_initial: float = 0.0
    boundary_flux_integral: float = 0.0
    max_mass_defect: float = 0.0
    lower_bound: float = 0.0
    upper_bound: float = 0.0
    min_seen: float = math.inf
    max_seen: float = -math.inf
    steps: int = 0
    dt_min: float = math.inf

    @property
    def max_undershoot(self):
        return max(0.0, self.lower_bound - self.min_seen)

    @property
    def max_overshoot(self):
        return max(0.0, self.max_seen - self.upper_bound)

    def relative_mass_defect(self):
        return self.max_mass_defect / (1.0 + abs(self.mass_initial))

    def as_dict(self):
        return {
            "mass_initial": self.mass_initial,
            "boundary_flux_integral": self.boundary_flux_integral,
            "relative_mass_defect": self.relative_mass_defect(),
            "max_overshoot": self.max_overshoot,
            "max_undershoot": self.max_undershoot,
            "steps": self.steps,
            "dt_min": self.dt_min,
        }


BLOWUP_FACTOR = 1e6


def solve(config: SolverConfig, monitor: RunMonitor | None = None, callback=None):
    """Advance from ``t_start`` to ``t_end``; return ``[(t, GridSolution), ...]``.

    ``callback(state)`` is invoked at each output time. Non-finite values, or
    values further than ``BLOWUP_FACTOR`` data ranges outside the initial
    bounds, raise :class:`NumericalBlowupError`.
    """
    state = build_initial(config)
    dx = state.dx
    u = np.array(state.values)
    mon = monitor if monitor is not None else RunMonitor()
    mon.mass_initial = float(np.sum(u[1:-1]) * dx)
    mon.lower_bound = min(float(u.min()), state.u_minus, state.u_plus)
    mon.upper_bound = max(float(u.max()), state.u_minus, state.u_plus)
    mon.min_seen, mon.max_seen = float(u.min()), float(u.max())
    blowup_span = BLOWUP_FACTOR * (1.0 + mon.upper_bound - mon.lower_bound)
    flux, law, lim = config.flux, config.law, config.limiter

    out_times = config.output_times()
    snapshots = []
    t = config.t_start
    k = 0
    while k < len(out_times) and out_times[k] <= t:
        snapshots.append((out_times[k], state))
        k += 1
    inflow = 0.0
    while k < len(out_times):
        target = out_times[k]
        if config.dt_override is not None:
            dt = float(config.dt_override)
        else:
            dt = _stable_dt_arrays(u, dx, flux, law, config.cfl_advection, config.cfl_diffusion)
        landing = dt >= (target - t) - 1e-9 * dt
        if landing:
            dt = target - t
        t_next = target if landing else t + dt
        ends = boundary_values(config, t_next) if config.boundary == "profile" else None
        u, boundary = _ssp_rk2(u, dt, dx, flux, law, lim, config.boundary, ends)
        t = target if landing else t + dt
        inflow += boundary
        mass = float(np.sum(u[1:-1]) * dx)
        lo, hi = float(u.min()), float(u.max())
        # a stable run obeys the maximum principle, so far excursions mean divergence
        if not (math.isfinite(mass) and lo >= mon.lower_bound - blowup_span and hi <= mon.upper_bound + blowup_span):
            raise NumericalBlowupError(t)
        mon.max_mass_defect = max(mon.max_mass_defect, abs(mass - mon.mass_initial - inflow))
        mon.min_seen = min(mon.min_seen, lo)
        mon.max_seen = max(mon.max_seen, hi)
        mon.steps += 1
        mon.dt_min = min(mon.dt_min, dt)
        if landing:
            snap = state.with_values(u, t)
            snapshots.append((t, snap))
            if callback is not None:
                callback(snap)
            k += 1
    mon.boundary_flux_integral = inflow
    return snapshots


def snapshot_filename(t):
    return f"snap_{t:.6f}.csv"


def write_snapshot_csv(state: GridSolution, directory):
    """Write ``t,x,u`` rows; floats use round-trip precision."""
    path = Path(directory) / snapshot_filename(state.t)
    x = state.x
    with open(path, "w", newline="\n") as fh:
        fh.write("t,x,u\n")
        for xi, ui in zip(x, state.values):
            fh.write(f"{state.t!r},{float(xi)!r},{float(ui)!r}\n")
    return path


def read_snapshot_csv(path) -> GridSolution:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    t = float(data[0, 0])
    x, u = data[:, 1], data[:, 2]
    dx = (x[-1] - x[0]) / (len(x) - 1)
    return GridSolution(float(x[0] - 0.5 * dx), float(x[-1] + 0.5 * dx), len(x), u, t, float(u[0]), float(u[-1]))


def heat_oracle_config(dx, mu=1.0, u_minus=0.0, u_plus=1.0, t0=1.0, t1=2.0, half_width=20.0):
    """Pure diffusion started from the contact wave at ``t0``; exact at every later time."""
    n = int(round(2 * half_width / dx))
    profile = contact_wave(u_minus, u_plus, mu)
    return SolverConfig(
        flux=ConvexFlux.zero(),
        law=ViscosityLaw.linear(mu),
        initial=InitialData.profile_plus_bump(profile, 0.0, profile_time=t0),
        x_left=-half_width, x_right=half_width, n_cells=n,
        t_start=t0, t_end=t1,
    )
