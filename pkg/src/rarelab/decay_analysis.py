"""Norms, deviations and decay-rate verdicts for solver snapshots.

Rate statements are addressed by keys ``"<scenario>/<quantity>/<norm>"``:

``scenario``
    ``constant`` (equal far fields, convective flux), ``rarefaction``
    (``u_minus < u_plus``, convex flux) or ``diffusion`` (no convective flux).
``quantity``
    ``decay`` (``H^2`` perturbation), ``l1`` (perturbation also in ``L^1``),
    ``dx``, ``dt``, ``dxx``; for the rarefaction ``dx-smooth`` etc. compare
    with the smoothed profile instead of the fan.
``norm``
    ``L1``, ``Lq``, ``Lq+1``, ``L2`` or ``Linf``; ``q`` is passed separately.

Value deviations in the rarefaction scenario are taken against ``u^r(x/t)``,
derivative deviations against the fan derivatives at time ``1 + t``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .fitting import DecayDataError, DecayFit, default_window, fit_decay, log_factor
from .flux_laws import ConvexFlux, ViscosityLaw
from .pde_solver import GridSolution, semi_discrete_rhs
from .wave_profiles import WaveProfile, rarefaction, smoothed_rarefaction

__all__ = [
    "DecayDataError", "DecayFit", "fit_decay", "lq_norm", "linf_norm", "derivative_field",
    "derivative_norms", "Deviation", "deviation", "weighted_dissipation", "holder_check",
    "interpolation_check", "TheoremLine", "theorem_line", "DecayReport", "theorem_check",
    "InsufficientSpanError", "SeriesFileError", "log_growth_constant", "norm_series", "write_norm_series_csv", "read_norm_series_csv",
]


class SeriesFileError(DecayDataError):
    """Norm-series file that cannot be parsed."""


class InsufficientSpanError(DecayDataError):
    """Snapshots cover too short a time range for an exponent fit."""


def lq_norm(values, dx, q):
    if q < 1:
        raise ValueError(f"L^q norm needs q >= 1, got {q}")
    a = np.abs(np.asarray(values, dtype=float))
    if np.isinf(q):
        return linf_norm(a)
    if q == 1:
        return float(np.sum(a) * dx)
    if q == 2:
        return float(math.sqrt(np.dot(a, a) * dx))
    m = a.max(initial=0.0)
    if m == 0.0:
        return 0.0
    # scaled to keep large q from overflowing
    return float(m * (np.sum((a / m) ** q) * dx) ** (1.0 / q))


def linf_norm(values):
    a = np.abs(np.asarray(values, dtype=float))
    return float(a.max(initial=0.0))


def derivative_field(state: GridSolution, order, flux: ConvexFlux | None = None, law: ViscosityLaw | None = None):
    """Derivative on interior cells ``1 .. n-2``.

    ``order`` 1 and 2 use centred differences. ``order="t"`` evaluates
    ``-(f(u) - sigma(u_x))_x`` with the solver's own interface fluxes, so it
    is the exact semi-discrete time derivative.
    """
    u = np.asarray(state.values)
    if u.size < 5:
        raise ValueError("derivative fields need at least 5 cells")
    dx = state.dx
    if order == 1:
        return (u[2:] - u[:-2]) / (2.0 * dx)
    if order == 2:
        return (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (dx * dx)
    if order == "t":
        if flux is None or law is None:
            raise ValueError("time derivative needs the flux and the viscosity law")
        return semi_discrete_rhs(u, dx, flux, law)[0][1:-1]
    raise ValueError(f"unsupported derivative order {order!r}")


def derivative_norms(state: GridSolution, order, q, flux=None, law=None):
    return lq_norm(derivative_field(state, order, flux, law), state.dx, q)


@dataclass(frozen=True)
class Deviation:
    """``u - reference`` sampled on the grid (all cells, or interior for derivatives)."""

    reference: object
    values: np.ndarray
    t: float
    dx: float

    def end_values(self):
        return float(self.values[0]), float(self.values[-1])


def _reference_values(reference, t, x, order):
    if isinstance(reference, WaveProfile):
        if order == 0:
            return np.asarray(reference.value(t, x), dtype=float)
        if order == 1:
            return np.asarray(reference.dx(t, x), dtype=float)
        if order == 2:
            return np.asarray(reference.dxx(t, x), dtype=float)
        return np.asarray(reference.dt(t, x), dtype=float)
    return np.zeros_like(x) if order else np.full_like(x, float(reference))


def deviation(state: GridSolution, reference, ref_time=None, order=0, flux=None, law=None):
    """Deviation of ``u`` (or of a derivative of ``u``) from ``reference``.

    ``reference`` is a :class:`WaveProfile` or a constant state; the profile
    is evaluated at ``ref_time`` (default ``state.t``).
    """
    t_ref = state.t if ref_time is None else ref_time
    if order == 0:
        x, u = state.x, np.asarray(state.values)
    else:
        x = state.x[1:-1]
        u = derivative_field(state, order, flux, law)
    return Deviation(reference, u - _reference_values(reference, t_ref, x, order), state.t, state.dx)


def weighted_dissipation(grad, dx, law: ViscosityLaw):
    """``sum <g>^(p-1) |g|^2 dx`` with ``<g> = sqrt(1 + g^2)``.

    Cell-centred quadrature, matching :func:`lq_norm`, so ``p = 1`` gives the
    squared ``L^2`` norm of ``grad`` exactly.
    """
    g = np.asarray(grad, dtype=float)
    g2 = g * g
    if law.p == 1.0:
        return float(np.sum(g2) * dx)
    return float(np.sum((1.0 + g2) ** (0.5 * (law.p - 1.0)) * g2) * dx)


def holder_check(phi, dx):
    """``(||phi||_2^2, ||phi||_1 ||phi||_inf)``; the first never exceeds the second."""
    return lq_norm(phi, dx, 2) ** 2, lq_norm(phi, dx, 1) * linf_norm(phi)


def interpolation_check(phi, dx, q=2.0):
    """Sides of ``||phi||_inf^(q+2) <= ((q+2)/2)^2 ||phi||_2^2 int |phi|^(q-2) |phi_x|^2``.

    One-sided differences are used, for which the bound holds on the grid
    whenever ``phi`` vanishes at both ends.
    """
    phi = np.asarray(phi, dtype=float)
    d = np.diff(phi) / dx
    if q == 2:
        weight = 1.0
    else:
        weight = (0.5 * (np.abs(phi[1:]) + np.abs(phi[:-1]))) ** (q - 2.0)
    integral = float(np.sum(weight * d * d) * dx)
    lhs = linf_norm(phi) ** (q + 2.0)
    rhs = ((q + 2.0) / 2.0) ** 2 * lq_norm(phi, dx, 2) ** 2 * integral
    return lhs, rhs


@dataclass(frozen=True)
class TheoremLine:
    key: str
    scenario: str
    quantity: str
    norm_q: float
    exponent: float
    epsilon: bool
    log_factor: bool
    verdict: bool = True

    @property
    def label(self):
        qs = "inf" if np.isinf(self.norm_q) else f"{self.norm_q:g}"
        return f"{self.scenario}/{self.quantity}/L{qs}"


_SCENARIOS = ("constant", "rarefaction", "diffusion")


def theorem_line(key, q=2.0) -> TheoremLine:
    """Resolve a rate statement key into norm order and bounding exponent."""
    try:
        scenario, quantity, norm = key.split("/")
    except ValueError:
        raise KeyError(f"malformed line key {key!r}") from None
    if scenario not in _SCENARIOS:
        raise KeyError(f"unknown scenario {scenario!r}")
    q = float(q)
    if q < 1:
        raise ValueError("q must be >= 1")
    diffusion = scenario == "diffusion"
    rare = scenario == "rarefaction"
    smooth = quantity.endswith("-smooth")
    base_q = quantity.removesuffix("-smooth")
    if smooth and not rare:
        raise KeyError("smoothed-profile comparisons exist only for the rarefaction scenario")

    def make(nq, expo, eps=False, log=False, verdict=True):
        return TheoremLine(key, scenario, quantity, nq, expo + 0.0, eps, log, verdict)

    if quantity == "decay":
        if norm == "Lq":
            return make(q, -0.25 * (1.0 - 2.0 / q))
        if norm == "Linf":
            return make(math.inf, -0.25, eps=True)
    elif quantity == "l1":
        if norm == "L1":
            if diffusion:
                return make(1.0, 0.0)
            if rare:
                return make(1.0, 0.0, eps=True, verdict=False)
            return make(1.0, 0.0, log=True)
        if norm == "Lq":
            return make(q, -0.5 * (1.0 - 1.0 / q), log=not diffusion)
        if norm == "Linf":
            return make(math.inf, -0.5, eps=True)
    elif base_q == "dx":
        if norm == "Lq+1":
            if rare and not smooth:
                return make(q + 1.0, -q / (q + 1.0))
            return make(q + 1.0, -(2.0 * q + 1.0) / (2.0 * q + 2.0), eps=not diffusion)
        if norm == "Linf":
            return make(math.inf, -1.0, eps=True)
    elif base_q == "dt" and norm == "L2":
        if rare and not smooth:
            return make(2.0, -0.5)
        return make(2.0, -0.75, eps=not diffusion)
    elif base_q == "dxx" and norm == "L2":
        return make(2.0, -0.75, eps=not diffusion)
    raise KeyError(f"no rate statement for {key!r}")


@dataclass(frozen=True)
class DecayReport:
    norm_label: str
    series: tuple
    fitted_exponent: float
    fit_window: tuple
    theoretical_exponent: float
    log_factor_allowed: bool
    passed: bool | None

    def to_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        d["series"] = [list(p) for p in self.series]
        d["fit_window"] = list(self.fit_window)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    @classmethod
    def from_dict(cls, d):
        return cls(d["norm_label"], tuple(tuple(p) for p in d["series"]), d["fitted_exponent"],
                   tuple(d["fit_window"]), d["theoretical_exponent"], d["log_factor_allowed"], d["pass"])


def log_growth_constant(series):
    """Smallest ``C`` with ``value <= C max{1, ln(1+t)}`` over the series."""
    data = np.asarray(series, dtype=float)
    return float(np.max(data[:, 1] / log_factor(data[:, 0])))


def norm_series(key, snapshots, flux: ConvexFlux, law: ViscosityLaw, q=2.0, smooth_q=1.0):
    """``[(t, norm), ...]`` for the deviation named by ``key`` over ``snapshots``."""
    return _line_series(theorem_line(key, q), snapshots, flux, law, smooth_q)


def _line_series(line: TheoremLine, snapshots, flux, law, smooth_q):
    series = []
    ref_fan = ref_smooth = None
    for t, state in snapshots:
        if line.scenario == "rarefaction":
            if t <= 0:
                continue
            if ref_fan is None:
                ref_fan = rarefaction(flux, state.u_minus, state.u_plus)
                ref_smooth = smoothed_rarefaction(flux, state.u_minus, state.u_plus, smooth_q)
        base = line.quantity.removesuffix("-smooth")
        order = {"decay": 0, "l1": 0, "dx": 1, "dxx": 2, "dt": "t"}[base]
        if line.scenario != "rarefaction":
            ref, t_ref = state.u_minus, None
        elif order == 0:
            ref, t_ref = ref_fan, t
        elif line.quantity.endswith("-smooth"):
            ref, t_ref = ref_smooth, t
        else:
            ref, t_ref = ref_fan, 1.0 + t
        dev = deviation(state, ref, t_ref, order, flux, law)
        series.append((float(t), lq_norm(dev.values, dev.dx, line.norm_q)))
    return series


def theorem_check(key, snapshots, flux: ConvexFlux, law: ViscosityLaw, q=2.0, smooth_q=1.0,
                  tolerance=0.1, eps_slack=0.05, window=None, min_decades=1.5):
    """Fit the norm series named by ``key`` and compare with its bounding exponent.

    Passes when the fitted exponent is at most ``theoretical + tolerance``,
    with ``eps_slack`` added for statements that hold up to an arbitrary
    ``epsilon``. Lines carrying a ``max{1, ln(1+t)}`` factor are judged on the
    exponent of the series divided by that factor.
    """
    line = theorem_line(key, q)
    times = [t for t, _ in snapshots if t > 0]
    if len(times) < 2 or math.log10(times[-1] / times[0]) < min_decades:
        span = 0.0 if len(times) < 2 else math.log10(times[-1] / times[0])
        raise InsufficientSpanError(f"snapshots span {span:.2f} decades, need {min_decades}")
    series = _line_series(line, snapshots, flux, law, smooth_q)
    if window is None:
        window = default_window([t for t, _ in series])
    fit = fit_decay(series, window=window, allow_log=line.log_factor)
    fitted = fit.corrected_exponent if line.log_factor else fit.exponent
    allowed = line.exponent + tolerance + (eps_slack if line.epsilon else 0.0)
    verdict = bool(fitted <= allowed) if line.verdict else None
    return DecayReport(line.label, tuple(series), float(fitted), fit.window, line.exponent, line.log_factor, verdict)


def write_norm_series_csv(path, times, columns):
    """``t,<label_1>,...`` with round-trip float formatting."""
    labels = list(columns)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + labels)
        for i, t in enumerate(times):
            w.writerow([repr(float(t))] + [repr(float(columns[k][i])) for k in labels])
    return Path(path)


def read_norm_series_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = (rows[0], rows[1:]) if rows else ([], [])
    if not header or header[0] != "t":
        raise SeriesFileError(f"{path}: first column must be 't'")
    try:
        data = np.array([[float(v) for v in r] for r in body if r], dtype=float).reshape(-1, len(header))
    except ValueError as exc:
        raise SeriesFileError(f"{path}: {exc}") from None
    return data[:, 0], {label: data[:, i + 1] for i, label in enumerate(header[1:])}
