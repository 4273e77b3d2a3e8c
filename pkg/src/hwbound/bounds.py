"""Tail bounds for x^T A x - E[x^T A x] with x ~ N(0, I_n) and A symmetric.

Three tiers, from loosest to tightest:

* universal: ``kappa * min{a^2/|A|_2^2, a/|A|}``;
* r-parametrized: ``min{a^2/(8 xi_r |A|_2^2), r a/(4|A|)}``;
* exact Chernoff: ``-min_t E(t)`` with
  ``E(t) = -t a + sum_i [-t lam_i - 0.5 log(1 - 2 t lam_i)]``.

Between the last two sits the quadratic surrogate ``t a - 2 t^2 xi_r |A|_2^2``
at the constrained optimal t, exposed as :func:`intermediate_exponent`. Each
tier's exponent is at least the next one's, which :func:`assemble_report`
checks on every call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import kappa_at, solve_kappa, xi
from .spectral import Spectrum

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
DOMAIN_GUARD = 1e-9
MAX_DOUBLINGS = 200
NEST_SLACK = 1e-9


class Side(str, Enum):
    UPPER = "upper"
    LOWER = "lower"
    TWO_SIDED = "two-sided"

    @classmethod
    def parse(cls, value: "Side | str") -> "Side":
        if isinstance(value, Side):
            return value
        key = str(value).strip().lower().replace("_", "-")
        if key == "twosided":
            key = "two-sided"
        return cls(key)

    @property
    def factor(self) -> float:
        return 2.0 if self is Side.TWO_SIDED else 1.0


class BracketError(RuntimeError):
    pass


class NestingError(AssertionError):
    """The exponents came out in the wrong order, which the proof rules out."""


@dataclass(frozen=True)
class TailQuery:
    a: float
    side: Side = Side.TWO_SIDED

    def __post_init__(self):
        a = float(self.a)
        if not (a > 0.0 and math.isfinite(a)):
            raise ValueError(f"threshold a must be a positive finite number, got {self.a!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "side", Side.parse(self.side))


@dataclass(frozen=True)
class TierBound:
    exponent: float
    probability: float


@dataclass(frozen=True)
class ChernoffBound:
    exponent: float
    probability: float
    t_star: float
    upper: "OneSided | None" = None
    lower: "OneSided | None" = None


@dataclass(frozen=True)
class OneSided:
    exponent: float
    t_star: float


@dataclass(frozen=True)
class BoundReport:
    a: float
    side: Side
    r_used: float
    kappa: float
    universal_exponent: float
    parametrized_exponent: float
    intermediate_exponent: float
    t_intermediate: float
    chernoff_exponent: float
    t_star: float
    prob_universal: float
    prob_parametrized: float
    prob_chernoff: float

    @property
    def probabilities(self) -> dict[str, float]:
        return {
            "universal": self.prob_universal,
            "parametrized": self.prob_parametrized,
            "chernoff": self.prob_chernoff,
        }


def clamp_prob(factor: float, exponent: float) -> float:
    return min(1.0, factor * math.exp(-exponent))


def hw_scale(spec: Spectrum, a: float) -> float:
    """min{a^2/|A|_2^2, a/|A|}."""
    return min(a * a / spec.hs_norm_sq, a / spec.op_norm)


def universal_bound(spec: Spectrum, q: TailQuery, kappa: float) -> TierBound:
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    exponent = kappa * hw_scale(spec, q.a)
    return TierBound(exponent, clamp_prob(q.side.factor, exponent))


def _check_r(r: float) -> float:
    r = float(r)
    if not 0.0 < r < 1.0:
        raise ValueError(f"r must lie in (0, 1), got {r!r}")
    return r


def parametrized_bound(spec: Spectrum, q: TailQuery, r: float) -> TierBound:
    r = _check_r(r)
    a = q.a
    exponent = min(a * a / (8.0 * xi(r) * spec.hs_norm_sq), r * a / (4.0 * spec.op_norm))
    return TierBound(exponent, clamp_prob(q.side.factor, exponent))


def intermediate_exponent(spec: Spectrum, a: float, r: float) -> tuple[float, float]:
    """Optimal t for the quadratic surrogate under 2 t |lam_i| <= r, and the
    resulting exponent ``t a - 2 t^2 xi_r |A|_2^2``."""
    r = _check_r(r)
    if not a > 0:
        raise ValueError("threshold a must be positive")
    x = xi(r)
    t_free = a / (4.0 * x * spec.hs_norm_sq)
    t_cap = r / (2.0 * spec.op_norm)
    if t_free < t_cap:
        return t_free, a * a / (8.0 * x * spec.hs_norm_sq)
    t = t_cap
    return t, t * a - 2.0 * t * t * x * spec.hs_norm_sq


def log_mgf_exponent(eigenvalues: np.ndarray, a: float, t: float) -> float:
    """E(t) = log of the Markov/MGF bound on P(sum lam_i (y_i^2 - 1) >= a)."""
    lam = np.asarray(eigenvalues, dtype=float)
    u = 2.0 * t * lam
    return float(-t * a + np.sum(-0.5 * u - 0.5 * np.log1p(-u)))


def _golden_min(f, lo: float, hi: float, rel_tol: float = 1e-12) -> tuple[float, float]:
    width_tol = rel_tol * (hi - lo)
    best_t, best_f = lo, f(lo)
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > width_tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = f(d)
    for t, ft in ((c, fc), (d, fd)):
        if ft < best_f:
            best_t, best_f = t, ft
    return best_t, best_f


def _one_sided_chernoff(eigenvalues: np.ndarray, a: float) -> OneSided:
    lam = np.asarray(eigenvalues, dtype=float)
    lam_max = float(np.max(lam))
    f = lambda t: log_mgf_exponent(lam, a, t)  # noqa: E731

    if lam_max > 0.0:
        t_cap = (1.0 - DOMAIN_GUARD) / (2.0 * lam_max)
    elif a >= -float(np.sum(lam)):
        # deviation is at most sum |lam_i|, so the event is null
        return OneSided(math.inf, math.inf)
    else:
        t_cap = math.inf

    # E is convex with E'(0) = -a < 0: double until E turns up or the cap is hit
    hi = min(t_cap, 1.0 / (2.0 * float(np.max(np.abs(lam)))))
    prev = f(hi)
    for _ in range(MAX_DOUBLINGS):
        if hi >= t_cap:
            break
        nxt_t = min(2.0 * hi, t_cap)
        nxt = f(nxt_t)
        if nxt > prev:
            hi = nxt_t
            break
        hi, prev = nxt_t, nxt
    else:
        raise BracketError("could not bracket the Chernoff minimizer")
    t, val = _golden_min(f, 0.0, hi)
    return OneSided(-val, t)


def exact_chernoff_bound(spec: Spectrum, q: TailQuery) -> ChernoffBound:
    lam = spec.eigenvalues
    up = lo = None
    if q.side in (Side.UPPER, Side.TWO_SIDED):
        up = _one_sided_chernoff(lam, q.a)
    if q.side in (Side.LOWER, Side.TWO_SIDED):
        lo = _one_sided_chernoff(-lam, q.a)

    if q.side is Side.UPPER:
        return ChernoffBound(up.exponent, clamp_prob(1.0, up.exponent), up.t_star, up, None)
    if q.side is Side.LOWER:
        return ChernoffBound(lo.exponent, clamp_prob(1.0, lo.exponent), lo.t_star, None, lo)
    # union bound over the two tails
    prob = min(1.0, math.exp(-up.exponent) + math.exp(-lo.exponent))
    worst = up if up.exponent <= lo.exponent else lo
    return ChernoffBound(worst.exponent, prob, worst.t_star, up, lo)


def _nested(big: float, small: float) -> bool:
    return big >= small - NEST_SLACK * max(1.0, abs(small))


def assemble_report(
    spec: Spectrum, q: TailQuery, r: float | None = None, kappa: float | None = None
) -> BoundReport:
    """All three tiers for one (spectrum, threshold). ``r`` and ``kappa``
    default to the optimal radius and the constant it produces."""
    if r is None or kappa is None:
        solved = solve_kappa()
        r = solved.r_star if r is None else r
        kappa = solved.kappa if kappa is None else kappa
    r = _check_r(r)

    uni = universal_bound(spec, q, kappa)
    par = parametrized_bound(spec, q, r)
    t_mid, mid = intermediate_exponent(spec, q.a, r)
    che = exact_chernoff_bound(spec, q)
    floor = kappa_at(r) * hw_scale(spec, q.a)

    chain = [("chernoff", che.exponent), ("intermediate", mid), ("parametrized", par.exponent), ("r-scaled", floor)]
    for (hi_name, hi), (lo_name, lo) in zip(chain, chain[1:]):
        if not _nested(hi, lo):
            raise NestingError(f"{hi_name} exponent {hi!r} < {lo_name} exponent {lo!r}")
    # universal sits under the others only when kappa is no larger than the
    # constant this r produces
    if kappa <= kappa_at(r) * (1.0 + NEST_SLACK) and not _nested(par.exponent, uni.exponent):
        raise NestingError(f"parametrized exponent {par.exponent!r} < universal {uni.exponent!r}")

    return BoundReport(
        a=q.a,
        side=q.side,
        r_used=r,
        kappa=kappa,
        universal_exponent=uni.exponent,
        parametrized_exponent=par.exponent,
        intermediate_exponent=mid,
        t_intermediate=t_mid,
        chernoff_exponent=che.exponent,
        t_star=che.t_star,
        prob_universal=uni.probability,
        prob_parametrized=par.probability,
        prob_chernoff=che.probability,
    )
