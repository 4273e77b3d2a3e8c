import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "hwbound", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", parent=settings.get_profile("hwbound"), max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "hwbound"))


def random_symmetric(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    b = rng.normal(scale=scale, size=(n, n))
    return 0.5 * (b + b.T)


def random_orthogonal(rng: np.random.Generator, n: int, rotations: int | None = None) -> np.ndarray:
    """Product of random plane (Givens) rotations."""
    q = np.eye(n)
    for _ in range(rotations or 3 * n * n):
        i, j = rng.choice(n, size=2, replace=False)
        th = rng.uniform(0, 2 * np.pi)
        c, s = np.cos(th), np.sin(th)
        qi, qj = q[i].copy(), q[j].copy()
        q[i], q[j] = c * qi - s * qj, s * qi + c * qj
    return q


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def write_matrix(path, rows):
    n = len(rows)
    body = "\n".join(" ".join(repr(float(x)) for x in row) for row in rows)
    path.write_text(f"# test matrix\n{n}\n{body}\n")
    return path


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
