"""Convective and viscous flux families.

The viscous flux ``sigma`` maps a velocity gradient to a stress; the
convective flux ``f`` is a convex function with explicitly supplied
derivatives. ``godunov_flux`` is the exact Riemann interface flux used by
the finite-volume solver.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class FluxRangeError(ValueError):
    """Argument lies outside the range where an evaluator is defined."""


class ViscosityKind(str, enum.Enum):
    REGULARIZED_POWER = "regularized_power"
    OSTWALD_DE_WAELE = "ostwald_de_waele"
    LINEAR = "linear"


@dataclass(frozen=True)
class ViscosityLaw:
    """Stress law ``sigma(v)`` with exponent ``p`` and coefficient ``mu``.

    ``RegularizedPower`` is ``mu (1 + v^2)^((p-1)/2) v`` and is smooth and
    strictly increasing for every ``p > 0``. ``OstwaldDeWaele`` is
    ``mu |v|^(p-1) v`` and is only admitted for ``p >= 1``; for ``1 < p < 2``
    it is C^1 but not C^2 at the origin.
    """

    kind: ViscosityKind = ViscosityKind.REGULARIZED_POWER
    p: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ViscosityKind(self.kind))
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.p > 0:
            raise ValueError(f"p must be positive, got {self.p}")
        if self.kind is ViscosityKind.OSTWALD_DE_WAELE and self.p < 1:
            raise ValueError(
                f"Ostwald-de Waele law needs p >= 1 (sigma' unbounded at 0), got p={self.p}"
            )
        if self.kind is ViscosityKind.LINEAR and self.p != 1:
            object.__setattr__(self, "p", 1.0)

    @classmethod
    def regularized(cls, p, mu=1.0):
        return cls(ViscosityKind.REGULARIZED_POWER, p, mu)

    @classmethod
    def ostwald(cls, p, mu=1.0):
        return cls(ViscosityKind.OSTWALD_DE_WAELE, p, mu)

    @classmethod
    def linear(cls, mu=1.0):
        return cls(ViscosityKind.LINEAR, 1.0, mu)

    def sigma(self, v):
        v = np.asarray(v, dtype=float)
        if self.kind is ViscosityKind.LINEAR:
            out = self.mu * v
        elif self.kind is ViscosityKind.OSTWALD_DE_WAELE:
            out = self.mu * np.abs(v) ** (self.p - 1.0) * v
        elif self.p == 1.0:
            out = self.mu * v
        else:
            out = self.mu * (1.0 + v * v) ** (0.5 * (self.p - 1.0)) * v
        return out[()] if out.ndim == 0 else out

    def sigma_prime(self, v):
        v = np.asarray(v, dtype=float)
        if self.kind is ViscosityKind.LINEAR or self.p == 1.0:
            out = np.full_like(v, self.mu)
        elif self.kind is ViscosityKind.OSTWALD_DE_WAELE:
            out = self.mu * self.p * np.abs(v) ** (self.p - 1.0)
        else:
            v2 = v * v
            out = self.mu * (1.0 + v2) ** (0.5 * (self.p - 3.0)) * (1.0 + self.p * v2)
        return out[()] if out.ndim == 0 else out

    def max_slope(self, gradients):
        """Largest ``sigma'`` over ``gradients``.

        For the regularized law with ``p <= 1`` this is ``mu`` regardless of
        the data, since ``sigma'`` peaks at zero gradient.
        """
        if self.kind is ViscosityKind.LINEAR or self.p == 1.0:
            return self.mu
        if self.kind is ViscosityKind.REGULARIZED_POWER and self.p < 1.0:
            return self.mu
        g = np.asarray(gradients, dtype=float)
        if g.size == 0:
            return float(self.sigma_prime(0.0))
        return float(np.max(self.sigma_prime(g)))


def sigma_eval(law: ViscosityLaw, v):
    return law.sigma(v)


def sigma_prime(law: ViscosityLaw, v):
    return law.sigma_prime(v)


class FluxKind(str, enum.Enum):
    ZERO = "zero"
    BURGERS = "burgers"
    EXPONENTIAL = "exponential"
    CUSTOM = "custom"


def _zero(u):
    return np.zeros_like(np.asarray(u, dtype=float))


def _ident(u):
    return np.asarray(u, dtype=float) * 1.0


def _half_square(u):
    u = np.asarray(u, dtype=float)
    return 0.5 * u * u


def _one(u):
    return np.ones_like(np.asarray(u, dtype=float))


def _exp(u):
    return np.exp(np.asarray(u, dtype=float))


def _log_positive(s):
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise FluxRangeError("exponential flux: f' takes only positive values")
    return np.log(s)


@dataclass(frozen=True)
class ConvexFlux:
    """Convective flux with its first three derivatives and ``(f')^{-1}``.

    ``sonic_point`` is where ``f'`` vanishes; it is ``+inf`` or ``-inf`` when
    ``f'`` never changes sign (then the minimum of ``f`` over an interval
    sits at the corresponding end).
    """

    kind: FluxKind
    f: Callable = field(repr=False)
    df: Callable = field(repr=False)
    d2f: Callable = field(repr=False)
    d3f: Callable = field(repr=False)
    df_inv: Callable | None = field(repr=False, default=None)
    sonic_point: float = 0.0

    @classmethod
    def zero(cls):
        return cls(FluxKind.ZERO, _zero, _zero, _zero, _zero, None, 0.0)

    @classmethod
    def burgers(cls):
        return cls(FluxKind.BURGERS, _half_square, _ident, _one, _zero, _ident, 0.0)

    @classmethod
    def exponential(cls):
        return cls(FluxKind.EXPONENTIAL, _exp, _exp, _exp, _exp, _log_positive, -np.inf)

    @classmethod
    def custom(cls, f, df, d2f, d3f, df_inv, sonic_point=None):
        """User flux. All evaluators must accept and return numpy arrays.

        When ``sonic_point`` is omitted it is taken as ``df_inv(0)`` if that
        succeeds, else ``-inf`` / ``+inf`` by the sign of ``df(0)``.
        """
        if sonic_point is None:
            try:
                sonic_point = float(df_inv(np.asarray(0.0)))
                if not np.isfinite(sonic_point):
                    raise FluxRangeError
            except (FluxRangeError, ValueError, FloatingPointError):
                sonic_point = -np.inf if float(df(np.asarray(0.0))) > 0 else np.inf
        return cls(FluxKind.CUSTOM, f, df, d2f, d3f, df_inv, float(sonic_point))

    @property
    def is_zero(self):
        return self.kind is FluxKind.ZERO

    def check_convex(self, u_lo, u_hi, n=2001):
        """Raise if ``f''`` is not positive on ``[u_lo - 1, u_hi + 1]``."""
        if self.is_zero:
            return
        u = np.linspace(u_lo - 1.0, u_hi + 1.0, n)
        if not np.all(self.d2f(u) > 0):
            raise ValueError(f"{self.kind.value} flux is not strictly convex on the operating interval")


def flux_eval(flux: ConvexFlux, u):
    out = flux.f(u)
    return out[()] if np.ndim(out) == 0 else out


def flux_prime(flux: ConvexFlux, u):
    out = flux.df(u)
    return out[()] if np.ndim(out) == 0 else out


def flux_prime_inv(flux: ConvexFlux, s, bounds=None):
    """Inverse of ``f'``.

    ``bounds=(u_lo, u_hi)`` restricts the admissible speeds to
    ``[f'(u_lo), f'(u_hi)]`` (a small relative slack absorbs rounding).
    """
    if flux.df_inv is None:
        raise FluxRangeError(f"{flux.kind.value} flux has no invertible derivative")
    s_arr = np.asarray(s, dtype=float)
    if bounds is not None:
        lo, hi = float(flux.df(np.asarray(bounds[0]))), float(flux.df(np.asarray(bounds[1])))
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(s_arr < lo - slack) or np.any(s_arr > hi + slack):
            raise FluxRangeError(f"speed outside [{lo}, {hi}]")
    out = flux.df_inv(s_arr)
    return out[()] if np.ndim(out) == 0 else out


def godunov_flux(flux: ConvexFlux, u_left, u_right):
    """Exact Riemann interface flux for a convex ``f``.

    Minimum of ``f`` over ``[u_left, u_right]`` when ``u_left <= u_right``,
    maximum over ``[u_right, u_left]`` otherwise. For convex ``f`` the
    minimum is at the sonic point clipped to the interval and the maximum
    at one of the end points.
    """
    ul = np.asarray(u_left, dtype=float)
    ur = np.asarray(u_right, dtype=float)
    if flux.is_zero:
        out = np.zeros(np.broadcast(ul, ur).shape)
        return out[()] if out.ndim == 0 else out
    fl = flux.f(ul)
    fr = flux.f(ur)
    u_min = np.clip(flux.sonic_point, ul, np.maximum(ul, ur))
    rare = flux.f(u_min)
    out = np.where(ul <= ur, rare, np.maximum(fl, fr))
    return out[()] if out.ndim == 0 else out
