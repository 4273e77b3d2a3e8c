import math

import numpy as np
import pytest
from scipy.stats import ks_2samp
from statsmodels.stats.proportion import proportion_confint

from conftest import random_symmetric
from hwbound.bounds import BoundReport, Side, TailQuery, assemble_report
from hwbound.montecarlo import (
    NormalStream,
    TailEstimate,
    Verdict,
    chi2_1_two_sided_tail,
    chunk_sizes,
    estimate_tail,
    mix_seed,
    normal_sf,
    sample_deviation,
    sample_deviations,
    splitmix64,
    verify_bound,
    wilson_interval,
)
from hwbound.spectral import Spectrum, decompose, make_symmetric

# 2 * Phi-bar(sqrt(1 + a)), mpmath at 40 digits
EXACT_TAIL = {3: 0.04550026389635841440, 10: 9.111188771537128870e-4, 30: 2.580284304160425187e-8}

ONE = Spectrum.from_eigenvalues([1.0])


def test_splitmix64_reference_output():
    # first output of the reference splitmix64 generator from state 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_mix_seed_frozen():
    assert mix_seed(42, 0) == 5592132763777985307
    assert mix_seed(42, 1) == 9129838320742759465
    assert len({mix_seed(42, c) for c in range(1000)}) == 1000


def test_stream_frozen():
    s = NormalStream(mix_seed(42, 0))
    np.testing.assert_array_equal(
        s.uniforms(3), [0.8845783446319921, 0.6506776771828291, 0.28100609648739827]
    )
    z = NormalStream(mix_seed(42, 0)).normals(5)
    np.testing.assert_allclose(
        z,
        [0.8139570980242987, 0.31890814074343776, -0.15648512626209854, -1.1567789218014797, -0.40335689841119016],
        rtol=1e-15,
    )


def test_stream_split_calls_match_single_call():
    a = NormalStream(123).normals(1000)
    s = NormalStream(123)
    b = np.concatenate([s.normals(1), s.normals(499), s.normals(500)])
    np.testing.assert_array_equal(a, b)


def test_uniforms_in_unit_interval():
    u = NormalStream(7).uniforms(100_000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 4 * math.sqrt(1 / 12 / u.size)


def test_normal_moments():
    z = NormalStream(99).normals(1_000_000)
    assert abs(z.mean()) < 4 / 1000
    assert z.var() == pytest.approx(1.0, rel=0.01)
    assert np.mean(z**4) == pytest.approx(3.0, rel=0.02)


def test_zero_eigenvalue_contributes_nothing():
    s1 = NormalStream(5)
    s2 = NormalStream(5)
    with_zero = sample_deviations(Spectrum.from_eigenvalues([1.0, 0.0]), s1, 1000)
    y = s2.normals(2000).reshape(1000, 2)
    np.testing.assert_allclose(with_zero, y[:, 0] ** 2 - 1.0, rtol=1e-15)


def test_chi_square_one_moments():
    d = sample_deviations(ONE, NormalStream(2024), 1_000_000)
    assert abs(d.mean()) < 4 * math.sqrt(2) / 1000
    assert d.var() == pytest.approx(2.0, rel=0.05)


def test_single_draw():
    assert isinstance(sample_deviation(ONE, NormalStream(1)), float)


def test_direct_quadratic_form_has_same_law(rng):
    a = random_symmetric(rng, 4)
    spec = decompose(make_symmetric(4, a.ravel()))
    via_spectrum = sample_deviations(spec, NormalStream(mix_seed(11, 0)), 10_000)
    x = rng.standard_normal((10_000, 4))
    direct = np.einsum("ij,jk,ik->i", x, a, x) - np.trace(a)
    stat = ks_2samp(via_spectrum, direct).statistic
    assert stat < 1.628 * math.sqrt(2 / 10_000)


@pytest.mark.parametrize("hits, n", [(0, 1000), (7, 1000), (500, 1000), (1000, 1000), (45500, 1_000_000)])
@pytest.mark.parametrize("conf", [0.9, 0.95, 0.99])
def test_wilson_matches_statsmodels(hits, n, conf):
    lo, hi = wilson_interval(hits, n, conf)
    ref_lo, ref_hi = proportion_confint(hits, n, alpha=1 - conf, method="wilson")
    assert lo == pytest.approx(ref_lo, abs=1e-12)
    assert hi == pytest.approx(ref_hi, abs=1e-12)


def test_normal_tail_oracle():
    for a, want in EXACT_TAIL.items():
        assert chi2_1_two_sided_tail(a) == pytest.approx(want, rel=1e-12)
    assert normal_sf(0.0) == 0.5
    # a < 1 includes the lower branch y^2 <= 1 - a
    assert chi2_1_two_sided_tail(0.5) == pytest.approx(
        2 * normal_sf(math.sqrt(1.5)) + 1 - 2 * normal_sf(math.sqrt(0.5)), rel=1e-14
    )


def test_chunk_sizes():
    assert chunk_sizes(10, 3) == [4, 3, 3]
    assert sum(chunk_sizes(1_000_003, 8)) == 1_000_003


@pytest.mark.parametrize("side", [Side.TWO_SIDED, Side.UPPER])
def test_estimate_chi_square_tail(side):
    est = estimate_tail(ONE, TailQuery(3, side), samples=1_000_000, seed=42)
    assert est.ci_low <= EXACT_TAIL[3] <= est.ci_high
    assert est.point_estimate == est.hits / est.samples


def test_lower_tail_impossible_for_chi_square():
    est = estimate_tail(ONE, TailQuery(3, "lower"), samples=10_000, seed=1)
    assert est.hits == 0


def test_rare_event():
    spec = Spectrum.from_eigenvalues([0.5, -0.25, 0.1])
    est = estimate_tail(spec, TailQuery(100.0), samples=100_000, seed=3)
    assert est.hits == 0
    assert est.ci_high < 1e-4


def test_interval_brackets_point(rng):
    for seed in range(20):
        est = estimate_tail(ONE, TailQuery(2.0), samples=1000, seed=seed)
        assert est.ci_low <= est.point_estimate <= est.ci_high


def test_deterministic():
    spec = Spectrum.from_eigenvalues([1.5, -0.5, 0.2])
    q = TailQuery(2.0)
    a = estimate_tail(spec, q, samples=50_000, seed=77, chunks=4)
    b = estimate_tail(spec, q, samples=50_000, seed=77, chunks=4)
    assert a == b


def test_workers_do_not_change_result():
    spec = Spectrum.from_eigenvalues([1.5, -0.5, 0.2])
    q = TailQuery(2.0)
    serial = estimate_tail(spec, q, samples=50_000, seed=77, chunks=5, workers=1)
    threaded = estimate_tail(spec, q, samples=50_000, seed=77, chunks=5, workers=5)
    assert serial == threaded


def test_seed_changes_result():
    q = TailQuery(1.0)
    assert estimate_tail(ONE, q, 20_000, seed=1).hits != estimate_tail(ONE, q, 20_000, seed=2).hits


def test_coverage_of_wilson_interval():
    covered = 0
    for seed in range(100):
        est = estimate_tail(ONE, TailQuery(3), samples=100_000, seed=seed, confidence=0.99)
        covered += est.ci_low <= EXACT_TAIL[3] <= est.ci_high
    assert covered >= 95


@pytest.mark.parametrize(
    "kwargs",
    [dict(samples=999), dict(samples=1000.5), dict(confidence=1.0), dict(confidence=0.0), dict(chunks=0), dict(seed=-1)],
)
def test_estimate_argument_errors(kwargs):
    args = dict(samples=1000, seed=1, confidence=0.99, chunks=1)
    args.update(kwargs)
    with pytest.raises(ValueError):
        estimate_tail(ONE, TailQuery(1.0), **args)


def test_verify_clamped_bound_is_consistent():
    q = TailQuery(3)
    rep = assemble_report(ONE, q)
    assert rep.prob_universal == 1.0
    est = estimate_tail(ONE, q, samples=100_000, seed=42)
    assert verify_bound(est, rep) is Verdict.CONSISTENT


def test_verify_deep_tail_consistent():
    q = TailQuery(30)
    rep = assemble_report(ONE, q, kappa=0.1457)
    assert rep.prob_universal == pytest.approx(2 * math.exp(-0.1457 * 30), rel=1e-14)
    assert rep.prob_universal == pytest.approx(0.02527719130, rel=1e-9)
    assert rep.prob_universal > EXACT_TAIL[30]
    est = estimate_tail(ONE, q, samples=100_000, seed=42)
    assert verify_bound(est, rep) is Verdict.CONSISTENT


def test_verify_fabricated_zero_bound_is_violation():
    q = TailQuery(1.0)
    est = estimate_tail(ONE, q, samples=10_000, seed=5)
    assert est.hits > 0
    rep = assemble_report(ONE, q)
    fake = BoundReport(**{**rep.__dict__, "prob_chernoff": 0.0})
    assert verify_bound(est, fake) is Verdict.VIOLATION


def test_verify_rejects_mismatched_query():
    est = estimate_tail(ONE, TailQuery(1.0), samples=1000, seed=5)
    with pytest.raises(ValueError):
        verify_bound(est, assemble_report(ONE, TailQuery(2.0)))
    with pytest.raises(ValueError):
        verify_bound(est, assemble_report(ONE, TailQuery(1.0, "upper")))


def test_no_violation_randomized():
    rng = np.random.default_rng(8)
    for i in range(25):
        n = int(rng.integers(1, 9))
        spec = decompose(make_symmetric(n, random_symmetric(rng, n).ravel()))
        a = float(rng.uniform(0.05, 4.0) * spec.hs_norm)
        q = TailQuery(a, list(Side)[i % 3])
        est = estimate_tail(spec, q, samples=20_000, seed=i)
        assert verify_bound(est, assemble_report(spec, q)) is Verdict.CONSISTENT


def test_estimate_is_frozen_dataclass():
    est = estimate_tail(ONE, TailQuery(1.0), samples=1000, seed=5)
    assert isinstance(est, TailEstimate)
    with pytest.raises(AttributeError):
        est.hits = 0
