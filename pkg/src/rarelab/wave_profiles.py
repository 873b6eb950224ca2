"""Asymptotic wave profiles and their derivatives.

Three kinds of reference state are provided:

* the exact rarefaction fan ``u^r(x/t)`` of a convex flux,
* the smoothed rarefaction ``U^r = (f')^{-1}(w)``, where ``w`` solves the
  inviscid Burgers equation from the monotone datum
  ``w0(x) = (w- + w+)/2 + (w+ - w-)/2 * K_q * int_0^x (1+y^2)^{-q} dy``
  and is evaluated along characteristics ``x = x0 + w0(x0) t``,
* the heat-kernel (error function) contact wave of ``u_t = mu u_xx``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .flux_laws import ConvexFlux, FluxKind, flux_prime_inv
from .fitting import fit_decay


class ProfileDomainError(ValueError):
    pass


def kq_constant(q):
    """Normalisation ``K_q`` with ``K_q * int_0^inf (1+y^2)^{-q} dy = 1``.

    The integral equals ``B(1/2, q - 1/2) / 2``.
    """
    q = float(q)
    if not q > 0.5:
        raise ProfileDomainError(f"K_q needs q > 1/2 (integral diverges), got q={q}")
    if q == 1.0:
        return 2.0 / np.pi
    return float(np.exp(np.log(2.0) - special.betaln(0.5, q - 0.5)))


def _tail_fraction(q, x):
    """``1 - K_q int_0^|x| (1+y^2)^{-q} dy``, accurate for large ``|x|``."""
    ax = np.abs(x)
    if q == 1.0:
        return np.arctan2(1.0, ax) * (2.0 / np.pi)
    ax2 = ax * ax
    # each branch keeps its beta argument away from 1
    near = 1.0 - special.betainc(0.5, q - 0.5, ax2 / (1.0 + ax2))
    far = special.betainc(q - 0.5, 0.5, 1.0 / (1.0 + ax2))
    return np.where(ax <= 1.0, near, far)


@dataclass(frozen=True)
class CharacteristicMap:
    """Smoothed Burgers rarefaction from ``w_minus`` to ``w_plus``."""

    q: float
    w_minus: float
    w_plus: float
    k_q: float = field(init=False)

    def __post_init__(self):
        if not self.q > 0.5:
            raise ProfileDomainError(f"smoothing exponent must exceed 1/2, got q={self.q}")
        if self.w_minus > self.w_plus:
            raise ProfileDomainError("need w_minus <= w_plus")
        object.__setattr__(self, "k_q", kq_constant(self.q))

    @property
    def mid(self):
        return 0.5 * (self.w_minus + self.w_plus)

    @property
    def half(self):
        return 0.5 * (self.w_plus - self.w_minus)

    def w0(self, x):
        x = np.asarray(x, dtype=float)
        tail = self.half * _tail_fraction(self.q, x)
        return np.where(x >= 0, self.w_plus - tail, self.w_minus + tail)

    def w0_prime(self, x):
        x = np.asarray(x, dtype=float)
        return self.half * self.k_q * (1.0 + x * x) ** (-self.q)

    def w0_second(self, x):
        x = np.asarray(x, dtype=float)
        return -2.0 * self.q * self.half * self.k_q * x * (1.0 + x * x) ** (-self.q - 1.0)

    def w0_third(self, x):
        x = np.asarray(x, dtype=float)
        s = 1.0 + x * x
        return -2.0 * self.q * self.half * self.k_q * s ** (-self.q - 2.0) * (1.0 - (2.0 * self.q + 1.0) * x * x)

    def foot(self, t, x, max_iter=200):
        """Root ``x0`` of ``x0 + w0(x0) t = x``.

        Newton from the inflection point ``x0 = 0`` with analytic slope
        ``1 + w0'(x0) t``, kept inside the bracket ``[x - w+ t, x - w- t]``
        and falling back to bisection when a step leaves it.
        """
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        if np.any(t < 0):
            raise ProfileDomainError("characteristic foot needs t >= 0")
        shape = x.shape
        t = t.astype(float).ravel()
        x = x.astype(float).ravel()
        if self.half == 0.0:
            return (x - self.w_plus * t).reshape(shape)
        lo = x - self.w_plus * t
        hi = x - self.w_minus * t
        x0 = np.clip(np.zeros_like(x), lo, hi)
        tol = 1e-13 * (1.0 + np.abs(x) + np.abs(t) * max(abs(self.w_minus), abs(self.w_plus)))
        active = np.ones(x.shape, dtype=bool)
        for _ in range(max_iter):
            xa, ta = x0[active], t[active]
            g = xa + self.w0(xa) * ta - x[active]
            gp = 1.0 + self.w0_prime(xa) * ta
            lo_a, hi_a = lo[active], hi[active]
            lo_a = np.where(g < 0, np.maximum(lo_a, xa), lo_a)
            hi_a = np.where(g > 0, np.minimum(hi_a, xa), hi_a)
            step = g / gp
            cand = xa - step
            bad = (cand < lo_a) | (cand > hi_a)
            cand = np.where(bad, 0.5 * (lo_a + hi_a), cand)
            lo[active], hi[active] = lo_a, hi_a
            x0[active] = cand
            done = (np.abs(g) <= tol[active]) | (np.abs(cand - xa) <= 1e-15 * (1.0 + np.abs(xa)))
            idx = np.flatnonzero(active)
            active[idx[done]] = False
            if not active.any():
                break
        return x0.reshape(shape)

    def fields(self, t, x, order=1):
        """``w`` and its x-derivatives up to ``order`` (at most 3)."""
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        x0 = self.foot(t, x)
        out = [self.w0(x0)]
        if order >= 1:
            d1 = self.w0_prime(x0)
            jac = 1.0 / (1.0 + d1 * t)  # dx0/dx
            out.append(d1 * jac)
        if order >= 2:
            d2 = self.w0_second(x0)
            out.append(d2 * jac**3)
        if order >= 3:
            d3 = self.w0_third(x0)
            out.append(d3 * jac**4 - 3.0 * d2 * d2 * t * jac**5)
        return out


def _scalar(a):
    a = np.asarray(a)
    return a[()] if a.ndim == 0 else a


def characteristic_foot(cmap: CharacteristicMap, t, x):
    return _scalar(cmap.foot(t, x))


def smooth_w(cmap: CharacteristicMap, t, x):
    return _scalar(cmap.fields(t, x, order=0)[0])


def smooth_w_dx(cmap: CharacteristicMap, t, x):
    return _scalar(cmap.fields(t, x, order=1)[1])


def smooth_w_dt(cmap: CharacteristicMap, t, x):
    w, wx = cmap.fields(t, x, order=1)
    return _scalar(-w * wx)


def smooth_w_dxx(cmap: CharacteristicMap, t, x):
    return _scalar(cmap.fields(t, x, order=2)[2])


def smooth_w_dxxx(cmap: CharacteristicMap, t, x):
    return _scalar(cmap.fields(t, x, order=3)[3])


def riemann_data(u_minus, u_plus, x):
    """Step data; the midpoint value is used at ``x = 0``."""
    x = np.asarray(x, dtype=float)
    out = np.where(x < 0, u_minus, np.where(x > 0, u_plus, 0.5 * (u_minus + u_plus)))
    return _scalar(out.astype(float))


class ProfileKind(str, enum.Enum):
    RAREFACTION = "rarefaction"
    SMOOTHED = "smoothed"
    CONTACT = "contact"


@dataclass(frozen=True)
class WaveProfile:
    """Reference state evaluator. Build with the module-level factories."""

    kind: ProfileKind
    flux: ConvexFlux
    u_minus: float
    u_plus: float
    q: float | None = None
    mu: float | None = None
    speed: float = 0.0
    cmap: CharacteristicMap | None = field(default=None, repr=False)

    @property
    def lambda_minus(self):
        return float(self.flux.df(np.asarray(self.u_minus)))

    @property
    def lambda_plus(self):
        return float(self.flux.df(np.asarray(self.u_plus)))

    def value(self, t, x):
        return profile_value(self, t, x)

    def dx(self, t, x):
        return profile_dx(self, t, x)

    def dt(self, t, x):
        return profile_dt(self, t, x)

    def dxx(self, t, x):
        return profile_dxx(self, t, x)


def rarefaction(flux: ConvexFlux, u_minus, u_plus):
    if flux.is_zero:
        raise ProfileDomainError("rarefaction needs a convex flux")
    if u_minus > u_plus:
        raise ProfileDomainError("rarefaction needs u_minus <= u_plus")
    return WaveProfile(ProfileKind.RAREFACTION, flux, float(u_minus), float(u_plus))


def smoothed_rarefaction(flux: ConvexFlux, u_minus, u_plus, q=1.0):
    """``U^r = (f')^{-1}(w(t, x; q, f'(u-), f'(u+)))``.

    ``q = 1`` gives the approximation used for the deviation ``phi``;
    large ``q`` (default 10 in the experiments) gives the one used for ``psi``.
    """
    if flux.is_zero:
        raise ProfileDomainError("smoothed rarefaction needs a convex flux")
    if u_minus > u_plus:
        raise ProfileDomainError("smoothed rarefaction needs u_minus <= u_plus")
    lm = float(flux.df(np.asarray(float(u_minus))))
    lp = float(flux.df(np.asarray(float(u_plus))))
    cmap = CharacteristicMap(float(q), lm, lp)
    return WaveProfile(ProfileKind.SMOOTHED, flux, float(u_minus), float(u_plus), q=float(q), cmap=cmap)


def contact_wave(u_minus, u_plus, mu=1.0, speed=0.0, flux: ConvexFlux | None = None):
    if not mu > 0:
        raise ProfileDomainError("contact wave needs mu > 0")
    return WaveProfile(
        ProfileKind.CONTACT, flux or ConvexFlux.zero(), float(u_minus), float(u_plus), mu=float(mu), speed=float(speed)
    )


def _fan(p: WaveProfile, t, x):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ProfileDomainError("rarefaction fan is defined for t > 0; use riemann_data at t = 0")
    t, x = np.broadcast_arrays(t, np.asarray(x, dtype=float))
    lm, lp = p.lambda_minus, p.lambda_plus
    inside = (x >= lm * t) & (x <= lp * t)
    s = np.clip(x / t, lm, lp)
    if p.u_minus == p.u_plus:
        u_in = np.full(s.shape, p.u_minus)
    else:
        u_in = flux_prime_inv(p.flux, s)
        u_in = np.clip(u_in, p.u_minus, p.u_plus)
    return t, x, inside, u_in


def _contact_parts(p: WaveProfile, t, x):
    t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    scale = np.sqrt(4.0 * p.mu * t)
    z = (x - p.speed * t) / scale
    jump = p.u_plus - p.u_minus
    ux = jump / np.sqrt(np.pi) / scale * np.exp(-z * z)
    return t, x, z, scale, ux


def profile_value(p: WaveProfile, t, x):
    if p.kind is ProfileKind.RAREFACTION:
        t, x, inside, u_in = _fan(p, t, x)
        out = np.where(x < p.lambda_minus * t, p.u_minus, np.where(x > p.lambda_plus * t, p.u_plus, u_in))
        return _scalar(out)
    if p.kind is ProfileKind.SMOOTHED:
        w = p.cmap.fields(t, x, order=0)[0]
        if p.flux.kind is FluxKind.BURGERS:
            return _scalar(w)
        return _scalar(np.clip(flux_prime_inv(p.flux, w), p.u_minus, p.u_plus))
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ProfileDomainError("contact wave needs t >= 0")
    t, x = np.broadcast_arrays(t_arr, np.asarray(x, dtype=float))
    out = np.empty(t.shape)
    zero = t == 0
    if zero.any():
        out[zero] = riemann_data(p.u_minus, p.u_plus, x[zero] - 0.0)
    pos = ~zero
    if pos.any():
        z = (x[pos] - p.speed * t[pos]) / np.sqrt(4.0 * p.mu * t[pos])
        out[pos] = p.u_minus + (p.u_plus - p.u_minus) * 0.5 * special.erfc(-z)
    return _scalar(out)


def _smoothed_derivs(p: WaveProfile, t, x, order):
    w_and = p.cmap.fields(t, x, order=order)
    w = w_and[0]
    if p.flux.kind is FluxKind.BURGERS:
        return w, w_and[1:], np.ones_like(w), np.zeros_like(w)
    u = np.clip(flux_prime_inv(p.flux, w), p.u_minus, p.u_plus)
    return w, w_and[1:], p.flux.d2f(u), p.flux.d3f(u)


def profile_dx(p: WaveProfile, t, x):
    if p.kind is ProfileKind.RAREFACTION:
        t, x, inside, u_in = _fan(p, t, x)
        if p.u_minus == p.u_plus:
            return _scalar(np.zeros(x.shape))
        return _scalar(np.where(inside, 1.0 / (p.flux.d2f(u_in) * t), 0.0))
    if p.kind is ProfileKind.SMOOTHED:
        _, (wx,), f2, _ = _smoothed_derivs(p, t, x, 1)
        return _scalar(wx / f2)
    _check_contact_t(t)
    return _scalar(_contact_parts(p, t, x)[4])


def profile_dt(p: WaveProfile, t, x):
    if p.kind is ProfileKind.RAREFACTION:
        t, x, inside, u_in = _fan(p, t, x)
        if p.u_minus == p.u_plus:
            return _scalar(np.zeros(x.shape))
        return _scalar(np.where(inside, -x / (p.flux.d2f(u_in) * t * t), 0.0))
    if p.kind is ProfileKind.SMOOTHED:
        w, (wx,), f2, _ = _smoothed_derivs(p, t, x, 1)
        return _scalar(-w * wx / f2)
    _check_contact_t(t)
    t, x, z, scale, ux = _contact_parts(p, t, x)
    uxx = -2.0 * z / scale * ux
    return _scalar(p.mu * uxx - p.speed * ux)


def profile_dxx(p: WaveProfile, t, x):
    if p.kind is ProfileKind.RAREFACTION:
        t, x, inside, u_in = _fan(p, t, x)
        if p.u_minus == p.u_plus:
            return _scalar(np.zeros(x.shape))
        f2 = p.flux.d2f(u_in)
        return _scalar(np.where(inside, -p.flux.d3f(u_in) / f2**3 / (t * t), 0.0))
    if p.kind is ProfileKind.SMOOTHED:
        _, (wx, wxx), f2, f3 = _smoothed_derivs(p, t, x, 2)
        return _scalar(wxx / f2 - f3 * wx * wx / f2**3)
    _check_contact_t(t)
    t, x, z, scale, ux = _contact_parts(p, t, x)
    return _scalar(-2.0 * z / scale * ux)


def _check_contact_t(t):
    if np.any(np.asarray(t, dtype=float) <= 0):
        raise ProfileDomainError("contact wave derivatives need t > 0")


# --- envelope checks -------------------------------------------------------


@dataclass(frozen=True)
class EnvelopeLine:
    label: str
    r: float
    theoretical: float
    fitted: float
    tolerance: float
    series: tuple

    @property
    def within(self):
        return abs(self.fitted - self.theoretical) <= self.tolerance

    @property
    def passed(self):
        return self.fitted <= self.theoretical + self.tolerance


@dataclass(frozen=True)
class EnvelopeReport:
    q: float
    r: float
    lines: tuple

    @property
    def passed(self):
        return all(line.passed for line in self.lines)

    def line(self, label):
        for ln in self.lines:
            if ln.label == label:
                return ln
        raise KeyError(label)


def _rnorm(values, h, r):
    a = np.abs(values)
    if np.isinf(r):
        return float(a.max())
    return float((np.sum(a**r) * h) ** (1.0 / r))


def envelope_grid(p: WaveProfile, t, resolution=0.02, width=40.0):
    """Uniform grid covering the fan at time ``t`` plus tails of ``width*sqrt(1+t)``."""
    pad = width * np.sqrt(1.0 + t) + 20.0
    h = resolution * np.sqrt(1.0 + t)
    a = p.lambda_minus * t - pad
    b = p.lambda_plus * t + pad
    n = int(np.ceil((b - a) / h))
    h = (b - a) / n
    return a + (np.arange(n) + 0.5) * h, h


def profile_envelopes(flux: ConvexFlux, q, u_minus, u_plus, times, r=2.0, tolerance=0.1):
    """Fit decay exponents of ``dx U``, ``dt U``, ``dxx U`` and ``U - u^r(./(1+t))``.

    Returns an :class:`EnvelopeReport`; each line carries the fitted and the
    bounding exponent. The deviation line is only produced when
    ``r >= 2q/(2q-1)``, where its bound is finite.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(times <= 0) or np.any(np.diff(times) <= 0):
        raise ProfileDomainError("times must be positive and strictly increasing")
    r = float(r)
    if r < 1:
        raise ProfileDomainError("norm order r must be >= 1")
    U = smoothed_rarefaction(flux, u_minus, u_plus, q)
    ur = rarefaction(flux, u_minus, u_plus)
    inv_r = 0.0 if np.isinf(r) else 1.0 / r
    targets = {
        "dx": -1.0 + inv_r,
        "dt": -1.0 + inv_r,
        "dxx": -1.0 - (1.0 - inv_r) / (2.0 * q),
    }
    with_dev = r >= 2.0 * q / (2.0 * q - 1.0)
    if with_dev:
        targets["deviation"] = -1.0 + inv_r + 1.0 / (2.0 * q)
    series = {k: [] for k in targets}
    for t in times:
        x, h = envelope_grid(U, t)
        w, (wx, wxx), f2, f3 = _smoothed_derivs(U, t, x, 2)
        ux = wx / f2
        series["dx"].append((t, _rnorm(ux, h, r)))
        series["dt"].append((t, _rnorm(-w * ux, h, r)))
        series["dxx"].append((t, _rnorm(wxx / f2 - f3 * wx * wx / f2**3, h, r)))
        if with_dev:
            u_val = profile_value(U, t, x)
            series["deviation"].append((t, _rnorm(u_val - profile_value(ur, 1.0 + t, x), h, r)))
    window = (float(times[0]), float(times[-1]))
    lines = []
    for key, target in targets.items():
        fit = fit_decay(series[key], window=window)
        lines.append(EnvelopeLine(key, r, target, fit.exponent, tolerance, tuple(series[key])))
    return EnvelopeReport(float(q), r, tuple(lines))


@dataclass(frozen=True)
class SpeedCheck:
    name: str
    passed: bool
    detail: str


def speed_field_checks(cmap: CharacteristicMap, times, r=2.0, tolerance=0.1):
    """Structural checks on the smoothed Burgers speed ``w``.

    * ``bounds``: ``w_minus < w < w_plus`` and ``w_x > 0`` strictly on the fan
      ``[w_minus t, w_plus t]``, non-strictly on the full grid (far tails
      round to the end states in floating point when ``q`` is large);
    * ``envelope-*``: ``L^r`` decay exponents of ``w_x``, ``w_t``, ``w_xx`` and
      ``w_xxx`` at most their bounds plus ``tolerance``;
    * ``fan-convergence``: ``sup |w - x/t|`` clipped to the fan decreases to 0.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2 or np.any(times <= 0) or np.any(np.diff(times) <= 0):
        raise ProfileDomainError("times must be positive and strictly increasing")
    if cmap.half == 0.0:
        raise ProfileDomainError("checks need w_minus < w_plus")
    r = float(r)
    inv_r = 0.0 if np.isinf(r) else 1.0 / r
    q = cmap.q
    targets = {
        "w_x": -1.0 + inv_r,
        "w_t": -1.0 + inv_r,
        "w_xx": -1.0 - (1.0 - inv_r) / (2.0 * q),
        "w_xxx": -1.0 - (2.0 - inv_r) / (2.0 * q),
    }
    series = {k: [] for k in targets}
    sup_dev = []
    strict = loose = True
    for t in times:
        pad = 40.0 * np.sqrt(1.0 + t) + 20.0
        a, b = cmap.w_minus * t - pad, cmap.w_plus * t + pad
        h = 0.02 * np.sqrt(1.0 + t)
        n = int(np.ceil((b - a) / h))
        h = (b - a) / n
        x = a + (np.arange(n) + 0.5) * h
        w, wx, wxx, wxxx = cmap.fields(t, x, 3)
        fan = (x >= cmap.w_minus * t) & (x <= cmap.w_plus * t)
        strict &= bool(np.all(w[fan] > cmap.w_minus) and np.all(w[fan] < cmap.w_plus) and np.all(wx[fan] > 0))
        loose &= bool(np.all(w >= cmap.w_minus) and np.all(w <= cmap.w_plus) and np.all(wx >= 0))
        series["w_x"].append((t, _rnorm(wx, h, r)))
        series["w_t"].append((t, _rnorm(w * wx, h, r)))
        series["w_xx"].append((t, _rnorm(wxx, h, r)))
        series["w_xxx"].append((t, _rnorm(wxxx, h, r)))
        sup_dev.append(float(np.max(np.abs(w - np.clip(x / t, cmap.w_minus, cmap.w_plus)))))
    checks = [SpeedCheck("bounds", strict and loose, f"strict on fan: {strict}, closed on grid: {loose}")]
    window = (float(times[0]), float(times[-1]))
    rs = "inf" if np.isinf(r) else f"{r:g}"
    for key, target in targets.items():
        fitted = fit_decay(series[key], window=window, min_samples=2).exponent
        checks.append(SpeedCheck(f"envelope-{key} r={rs}", fitted <= target + tolerance,
                                 f"fitted {fitted:.4f}, bound {target:.4f}"))
    decreasing = sup_dev[-1] < sup_dev[0]
    slope = fit_decay(list(zip(times, sup_dev)), window=window, min_samples=2).exponent
    checks.append(SpeedCheck("fan-convergence", bool(decreasing and slope < 0),
                             f"sup deviation {sup_dev[0]:.3e} -> {sup_dev[-1]:.3e}, slope {slope:.4f}"))
    return checks
