"""Closed-form upper-bound shapes and the prime-window schedule.

All implied constants default to 1 and are exposed as multipliers.
Logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .curves import Curve
from .errors import MalformedInputError, ScheduleInfeasibleError
from .group_lab.groups import Kind, group_order


def _check_x(x: float) -> None:
    if not x > math.e:
        raise MalformedInputError(f"x must exceed e (got {x})")


def _kappa(g: int, t_is_zero: bool) -> int:
    if g < 1:
        raise MalformedInputError("g must be >= 1")
    return 3 * g + (1 if t_is_zero else 2)


def theorem1_exponents(g: int, t_is_zero: bool) -> tuple[Fraction, Fraction]:
    """(power of x, power of log x in the denominator)."""
    k = _kappa(g, t_is_zero)
    return 1 - Fraction(1, k), 1 - Fraction(2, k)


def torus_exponents(g: int) -> tuple[Fraction, Fraction]:
    k = 5 * g + 2
    return 1 - Fraction(1, k), 1 - Fraction(2, k)


def _shape(x: float, exps: tuple[Fraction, Fraction], constant: float) -> float:
    a, b = exps
    return constant * x ** float(a) / math.log(x) ** float(b)


def theorem1_bound(x: float, g: int, t_is_zero: bool, constant: float = 1.0) -> float:
    """constant * x^(1 - 1/k) / (log x)^(1 - 2/k), k = 3g+1 (t = 0) or 3g+2."""
    _check_x(x)
    return _shape(x, theorem1_exponents(g, t_is_zero), constant)


def torus_variant_bound(x: float, g: int, constant: float = 1.0) -> float:
    """The weaker split-torus / non-split-Cartan alternative, k = 5g+2."""
    _check_x(x)
    return _shape(x, torus_exponents(g), constant)


@dataclass(frozen=True)
class ParamSchedule:
    y: float
    u: float
    epsilon: float
    clamped: bool = False

    @property
    def window(self) -> tuple[float, float]:
        return (self.y, self.y + self.u)


def _raw_schedule(x: float, g: int, t_is_zero: bool, epsilon: float,
                  c_y: float = 1.0, c_u: float = 1.0) -> tuple[float, float]:
    k = _kappa(g, t_is_zero)
    lx = math.log(x)
    y = c_y * x ** (1 / k) / lx ** (2 / k)
    u = c_u * math.sqrt(y) * math.log(y) ** (2 + epsilon) if y > 1 else 0.0
    return y, u


def schedule_values(x: float, g: int, t_is_zero: bool, epsilon: float = 0.1,
                    c_y: float = 1.0, c_u: float = 1.0) -> tuple[float, float]:
    """The (y, u) pair without feasibility checks, for plotting."""
    _check_x(x)
    return _raw_schedule(x, g, t_is_zero, epsilon, c_y, c_u)


def _feasible(y: float, u: float) -> bool:
    return y > 3 and u <= y


def min_feasible_x(g: int, t_is_zero: bool, epsilon: float = 0.1,
                   c_y: float = 1.0, c_u: float = 1.0) -> float:
    """Least x beyond which the schedule is feasible for every larger x."""
    # in s = log y, u <= y reads h(s) >= 0; h is convex with its minimum at 2(2+eps)
    h = lambda s: 0.5 * s - math.log(c_u) - (2 + epsilon) * math.log(s)
    s_min = 2 * (2 + epsilon)
    if h(s_min) >= 0:
        y_star = 3.0
    else:
        s_hi = 2 * s_min
        while h(s_hi) <= 0:
            s_hi *= 2
        y_star = max(math.exp(brentq(h, s_min, s_hi)), 3.0)
    k = _kappa(g, t_is_zero)
    # log y as a function of log x; increasing once log x > 2
    f = lambda lx: math.log(c_y) + lx / k - (2 / k) * math.log(lx) - math.log(y_star)
    lo, hi = 2.0, 16.0
    if f(lo) >= 0:
        return math.exp(lo)
    while f(hi) < 0:
        hi *= 2
    return math.exp(brentq(f, lo, hi, xtol=1e-12)) * (1 + 1e-9)


def choose_parameters(x: float, g: int, t_is_zero: bool, epsilon: float = 0.1,
                      c_y: float = 1.0, c_u: float = 1.0, clamp: bool = False) -> ParamSchedule:
    """y ~ x^(1/k)/(log x)^(2/k) and u ~ sqrt(y) (log y)^(2+eps).

    With ``clamp`` an infeasible schedule is pushed into range instead of
    raising: y is raised to at least 3 and u is capped at y.
    """
    _check_x(x)
    if not epsilon > 0:
        raise MalformedInputError("epsilon must be > 0")
    y, u = _raw_schedule(x, g, t_is_zero, epsilon, c_y, c_u)
    if _feasible(y, u):
        lower = c_u * math.sqrt(y) * math.log(y) ** (2 + epsilon)
        assert u <= y and u >= lower * (1 - 1e-12)
        return ParamSchedule(y, u, epsilon)
    if not clamp:
        xmin = min_feasible_x(g, t_is_zero, epsilon, c_y, c_u)
        raise ScheduleInfeasibleError(
            f"schedule infeasible at x={x:g} (y={y:.4g}, u={u:.4g}); feasible for all x >= {xmin:.4g}",
            xmin, y, u,
        )
    y = max(y, 3.0)
    u = min(c_u * math.sqrt(y) * math.log(y) ** (2 + epsilon), y)
    return ParamSchedule(y, u, epsilon, clamped=True)


def conductor_surrogate(curves: Sequence[Curve]) -> int:
    """Product of |discriminant| over the curves, standing in for N_A."""
    out = 1
    for c in curves:
        out *= abs(c.discriminant)
    return out


def _check_variant(variant: str) -> str:
    v = variant.upper().replace("'", "PRIME")
    if v not in ("U", "UPRIME"):
        raise MalformedInputError(f"variant must be U or Uprime, got {variant!r}")
    return v


def chebotarev_terms(x: float, ell: int, g: int, n_surrogate: int, variant: str = "U") -> tuple[float, float]:
    """Main and error terms of x/(ell log x) + g ell^e sqrt(x)/log x * log(ell N)."""
    _check_x(x)
    v = _check_variant(variant)
    if ell < 3 or n_surrogate < 1:
        raise MalformedInputError("need ell >= 3 and N >= 1")
    e = 3 * g / 2 if v == "U" else (3 * g - 1) / 2
    lx = math.log(x)
    main = x / (ell * lx)
    err = g * ell**e * math.sqrt(x) / lx * math.log(ell * n_surrogate)
    return main, err


def chebotarev_rhs(x: float, ell: int, g: int, n_surrogate: int, variant: str = "U") -> float:
    return sum(chebotarev_terms(x, ell, g, n_surrogate, variant))


def logM_surrogate(ell: int, n_surrogate: int, g: int, variant: str = "U") -> float:
    """2 log|B/N| + 2 log(ell N_A) + log 2 with N = U or U'."""
    v = _check_variant(variant)
    quotient = group_order(Kind.B, ell, g) // group_order(Kind.U if v == "U" else Kind.UPRIME, ell, g)
    return 2 * math.log(quotient) + 2 * math.log(ell * n_surrogate) + math.log(2)


def x_grid(a: float, b: float, steps: int) -> np.ndarray:
    if steps < 1 or not b >= a:
        raise MalformedInputError("x-grid needs a <= b and steps >= 1")
    if steps == 1:
        return np.array([float(a)])
    return np.linspace(a, b, steps)


def bounds_table(xs: Sequence[float], g: int, t_is_zero: bool, constant: float = 1.0,
                 epsilon: float = 0.1) -> list[dict]:
    rows = []
    for x in xs:
        y, u = schedule_values(x, g, t_is_zero, epsilon)
        rows.append({
            "x": x,
            "bound": theorem1_bound(x, g, t_is_zero, constant),
            "torus_bound": torus_variant_bound(x, g, constant),
            "y": y,
            "u": u,
        })
    return rows
