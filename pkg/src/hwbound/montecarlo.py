"""Seeded simulation of P(|x^T A x - E x^T A x| >= a) and its one-sided variants.

x^T A x - tr A has the law of sum_i lam_i (y_i^2 - 1) with y ~ N(0, I_n),
so only the spectrum is needed.

Randomness: each chunk c runs its own Philox-4x64 counter generator keyed by
``mix_seed(seed, c)`` (splitmix64 finalizer). Raw 64-bit outputs become
uniforms in [0, 1) via their top 53 bits, and normals come from the
Marsaglia polar method. No library distribution code is involved, so the
stream is fixed by (seed, chunk index) alone.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from statistics import NormalDist

import numpy as np

from .bounds import BoundReport, Side, TailQuery
from .spectral import Spectrum

MIN_SAMPLES = 1000
DEFAULT_CONFIDENCE = 0.99
BLOCK_ROWS = 1 << 16
MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def mix_seed(seed: int, chunk: int) -> int:
    """64-bit key for chunk ``chunk``: splitmix64(seed XOR splitmix64(chunk))."""
    return splitmix64((int(seed) & MASK64) ^ splitmix64(int(chunk) & MASK64))


class NormalStream:
    """Standard normals by the polar method on top of a keyed Philox generator."""

    def __init__(self, key: int):
        self._bits = np.random.Philox(key=int(key) & MASK64)
        self._spare = np.empty(0)

    def uniforms(self, size: int) -> np.ndarray:
        raw = self._bits.random_raw(size)
        return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)

    def normals(self, size: int) -> np.ndarray:
        out = [self._spare]
        have = self._spare.size
        while have < size:
            pairs = max(64, int((size - have) * 0.66) + 16)
            u = 2.0 * self.uniforms(2 * pairs).reshape(pairs, 2) - 1.0
            s = u[:, 0] ** 2 + u[:, 1] ** 2
            ok = (s > 0.0) & (s < 1.0)
            u, s = u[ok], s[ok]
            scale = np.sqrt(-2.0 * np.log(s) / s)
            z = (u * scale[:, None]).ravel()
            out.append(z)
            have += z.size
        z = np.concatenate(out)
        self._spare = z[size:]
        return z[:size]


def sample_deviations(spec: Spectrum, stream: NormalStream, count: int) -> np.ndarray:
    """``count`` draws of sum_i lam_i (y_i^2 - 1)."""
    lam = spec.eigenvalues
    y = stream.normals(count * lam.size).reshape(count, lam.size)
    return (y * y - 1.0) @ lam


def sample_deviation(spec: Spectrum, stream: NormalStream) -> float:
    return float(sample_deviations(spec, stream, 1)[0])


def _hits(dev: np.ndarray, a: float, side: Side) -> int:
    if side is Side.UPPER:
        return int(np.count_nonzero(dev >= a))
    if side is Side.LOWER:
        return int(np.count_nonzero(dev <= -a))
    return int(np.count_nonzero(np.abs(dev) >= a))


def wilson_interval(hits: int, samples: int, confidence: float = DEFAULT_CONFIDENCE) -> tuple[float, float]:
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    p = hits / samples
    z2n = z * z / samples
    centre = (p + z2n / 2.0) / (1.0 + z2n)
    half = z / (1.0 + z2n) * math.sqrt(p * (1.0 - p) / samples + z2n / (4.0 * samples))
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class TailEstimate:
    samples: int
    hits: int
    point_estimate: float
    ci_low: float
    ci_high: float
    confidence: float
    seed: int
    chunks: int
    a: float
    side: Side


def chunk_sizes(samples: int, chunks: int) -> list[int]:
    base, extra = divmod(samples, chunks)
    return [base + (1 if c < extra else 0) for c in range(chunks)]


def _count_chunk(spec: Spectrum, q: TailQuery, seed: int, chunk: int, size: int) -> int:
    stream = NormalStream(mix_seed(seed, chunk))
    rows = max(1, BLOCK_ROWS // spec.n)
    hits = 0
    done = 0
    while done < size:
        m = min(rows, size - done)
        hits += _hits(sample_deviations(spec, stream, m), q.a, q.side)
        done += m
    return hits


def estimate_tail(
    spec: Spectrum,
    q: TailQuery,
    samples: int = 1_000_000,
    seed: int = 42,
    confidence: float = DEFAULT_CONFIDENCE,
    chunks: int = 1,
    workers: int | None = None,
) -> TailEstimate:
    """Monte Carlo tail estimate with a Wilson interval.

    The result depends on (seed, samples, chunks, spectrum, query) only;
    ``workers`` changes how chunks are scheduled, not what they compute.
    """
    if int(samples) != samples or samples < MIN_SAMPLES:
        raise ValueError(f"samples must be an integer >= {MIN_SAMPLES}, got {samples!r}")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must lie in (0, 1), got {confidence!r}")
    if int(chunks) != chunks or chunks < 1:
        raise ValueError(f"chunks must be a positive integer, got {chunks!r}")
    if not 0 <= int(seed) <= MASK64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    samples, chunks, seed = int(samples), int(chunks), int(seed)
    sizes = chunk_sizes(samples, chunks)

    if chunks > 1 and workers != 1:
        with ThreadPoolExecutor(max_workers=workers or chunks) as pool:
            counts = list(pool.map(lambda c: _count_chunk(spec, q, seed, c, sizes[c]), range(chunks)))
    else:
        counts = [_count_chunk(spec, q, seed, c, sizes[c]) for c in range(chunks)]

    hits = sum(counts)
    lo, hi = wilson_interval(hits, samples, confidence)
    p = hits / samples
    return TailEstimate(samples, hits, p, min(lo, p), max(hi, p), confidence, seed, chunks, q.a, q.side)


class Verdict(str, Enum):
    CONSISTENT = "consistent"
    VIOLATION = "violation"


def verify_bound(estimate: TailEstimate, report: BoundReport) -> Verdict:
    """Violation iff the lower confidence limit exceeds some bound."""
    if estimate.side is not report.side or not math.isclose(estimate.a, report.a, rel_tol=1e-15):
        raise ValueError(
            f"estimate is for (a={estimate.a}, {estimate.side.value}) "
            f"but report is for (a={report.a}, {report.side.value})"
        )
    if any(estimate.ci_low > p for p in report.probabilities.values()):
        return Verdict.VIOLATION
    return Verdict.CONSISTENT


def normal_sf(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def chi2_1_two_sided_tail(a: float) -> float:
    """P(|y^2 - 1| >= a) for y ~ N(0, 1)."""
    upper = 2.0 * normal_sf(math.sqrt(1.0 + a))
    if a >= 1.0:
        return upper
    return upper + 1.0 - 2.0 * normal_sf(math.sqrt(1.0 - a))
