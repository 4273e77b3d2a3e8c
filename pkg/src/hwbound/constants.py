"""The series xi_r = sum_{k>=0} r^k / (k + 2) and the constant kappa.

kappa = (1/4) max_{0<r<1} min{r, 1/(2 xi_r)}. The first branch increases and
the second decreases in r, so the max of the min sits at the single crossing
2 r xi_r = 1, which we locate by bisection. Substituting the closed form of
xi_r turns the crossing into 1 - r = exp(-3r/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

SMALL_R = 1e-4
BRACKET = (1e-6, 1.0 - 1e-6)


@dataclass(frozen=True)
class XiValue:
    r: float
    xi: float


@dataclass(frozen=True)
class KappaResult:
    r_star: float
    kappa: float
    residual: float

    @property
    def crossing_value(self) -> float:
        """min{r, 1/(2 xi_r)} at the optimum, i.e. 4 * kappa."""
        return min(self.r_star, 1.0 / (2.0 * xi_closed(self.r_star).xi))


class FigureRow(NamedTuple):
    r: float
    quarter_r: float
    inv_8xi: float
    min_term: float


def _check_r(r: float) -> float:
    r = float(r)
    if not 0.0 < r < 1.0:
        raise ValueError(f"r must lie in (0, 1), got {r!r}")
    return r


def xi_series(r: float, rel_tol: float = 1e-14) -> XiValue:
    """Partial sums of the defining series, stopped once the next term is
    below ``rel_tol`` times the running sum."""
    r = _check_r(r)
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    total = 0.0
    power = 1.0
    k = 0
    while True:
        total += power / (k + 2)
        power *= r
        k += 1
        if power / (k + 2) < rel_tol * total:
            return XiValue(r, total)


def xi_closed(r: float) -> XiValue:
    r = _check_r(r)
    if r < SMALL_R:
        # -ln(1-r) and r agree to O(r^2); use the series head instead
        xi = 0.5 + r / 3 + r**2 / 4 + r**3 / 5 + r**4 / 6
    else:
        xi = (-math.log1p(-r) - r) / (r * r)
    return XiValue(r, xi)


def xi(r: float) -> float:
    return xi_closed(r).xi


def kappa_at(r: float) -> float:
    """(1/4) min{r, 1/(2 xi_r)}: the constant the argument yields for a fixed r."""
    return 0.25 * min(r, 1.0 / (2.0 * xi(r)))


def crossing(r: float) -> float:
    return 2.0 * r * xi(r) - 1.0


def solve_kappa(tol: float = 1e-12) -> KappaResult:
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo, hi = BRACKET
    g_lo = crossing(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        g_mid = crossing(mid)
        if (g_mid < 0.0) == (g_lo < 0.0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    r_star = 0.5 * (lo + hi)
    return KappaResult(r_star=r_star, kappa=r_star / 4, residual=crossing(r_star))


def figure_grid(steps: int = 999) -> list[FigureRow]:
    """r/4 and 1/(8 xi_r) at r = i/(steps+1), i = 1..steps, with their pointwise min."""
    if int(steps) != steps or steps < 2:
        raise ValueError(f"steps must be an integer >= 2, got {steps!r}")
    rows = []
    for i in range(1, int(steps) + 1):
        r = i / (steps + 1)
        quarter = r / 4
        inv = 1.0 / (8.0 * xi(r))
        rows.append(FigureRow(r, quarter, inv, min(quarter, inv)))
    return rows
