"""Real symmetric matrices and their spectra.

Eigenvalues come from a cyclic Jacobi iteration that visits the
off-diagonal pairs in round-robin order, so each step applies n/2
disjoint plane rotations at once.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np

SYM_TOL = 1e-12
MAX_SWEEPS = 30
CONVERGENCE_FACTOR = 1e-24

Mode = Literal["strict", "symmetrize"]


class MatrixError(ValueError):
    """Invalid matrix input: wrong size, asymmetric, all zero, unparsable."""


class AsymmetricMatrixError(MatrixError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class SymmetricMatrix:
    n: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=float).reshape(self.n, self.n)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.entries)))

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)

    def scaled(self, c: float) -> "SymmetricMatrix":
        return SymmetricMatrix(self.n, c * self.entries)


def make_symmetric(n: int, entries: Iterable[float], mode: Mode = "strict") -> SymmetricMatrix:
    """Validate (``strict``) or replace by (A + A^T)/2 (``symmetrize``).

    Symmetrizing leaves x^T A x unchanged for every x, so the tail of the
    quadratic form is the same for both matrices.
    """
    if mode not in ("strict", "symmetrize"):
        raise ValueError(f"unknown mode {mode!r}")
    if int(n) != n or n < 1:
        raise MatrixError(f"dimension must be a positive integer, got {n!r}")
    n = int(n)
    flat = np.asarray(list(entries) if not isinstance(entries, np.ndarray) else entries, dtype=float).ravel()
    if flat.size != n * n:
        raise MatrixError(f"expected {n * n} entries for n={n}, got {flat.size}")
    if not np.all(np.isfinite(flat)):
        raise MatrixError("matrix entries must be finite")
    a = flat.reshape(n, n)
    if not np.any(a):
        raise MatrixError("matrix is all zero; the bound needs a nonzero matrix")

    if mode == "symmetrize":
        a = 0.5 * (a + a.T)
    else:
        scale = max(1.0, float(np.max(np.abs(a))))
        gap = float(np.max(np.abs(a - a.T)))
        if gap > SYM_TOL * scale:
            raise AsymmetricMatrixError(
                f"matrix is not symmetric (max |A_ij - A_ji| = {gap:.3g})"
            )
        # exact symmetry below tolerance keeps the Jacobi sweeps consistent
        a = 0.5 * (a + a.T)
    return SymmetricMatrix(n, a)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (descending) of a symmetric matrix plus derived norms.

    ``eigenvectors`` holds U with rows as eigenvectors, so A = U^T diag(λ) U.
    """

    eigenvalues: np.ndarray
    hs_norm_sq: float
    op_norm: float
    trace: float
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_eigenvalues(cls, eigenvalues: Sequence[float], eigenvectors=None) -> "Spectrum":
        lam = np.asarray(eigenvalues, dtype=float).ravel()
        if lam.size == 0 or not np.any(lam):
            raise MatrixError("spectrum must contain a nonzero eigenvalue")
        order = np.argsort(-lam, kind="stable")
        lam = lam[order]
        if eigenvectors is not None:
            eigenvectors = np.asarray(eigenvectors, dtype=float)[order]
            eigenvectors.setflags(write=False)
        lam.setflags(write=False)
        return cls(
            eigenvalues=lam,
            hs_norm_sq=float(np.dot(lam, lam)),
            op_norm=float(np.max(np.abs(lam))),
            trace=float(np.sum(lam)),
            eigenvectors=eigenvectors,
        )

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def hs_norm(self) -> float:
        return float(np.sqrt(self.hs_norm_sq))

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[-1])

    def negated(self) -> "Spectrum":
        return Spectrum.from_eigenvalues(-self.eigenvalues)

    def scaled(self, c: float) -> "Spectrum":
        return Spectrum.from_eigenvalues(c * self.eigenvalues)


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings covering every (p, q), p < q, once per sweep; n/2 disjoint pairs per step."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p >= n or q >= n:
                continue
            ps.append(min(p, q))
            qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_sq(a: np.ndarray) -> float:
    upper = np.triu(a, 1)
    return 2.0 * float(np.sum(upper * upper))


def jacobi_eigh(a: np.ndarray, want_vectors: bool = True, max_sweeps: int = MAX_SWEEPS):
    """Cyclic Jacobi. Returns (eigenvalues, V) with a = V diag(w) V^T (unsorted)."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n) if want_vectors else None
    target = CONVERGENCE_FACTOR * float(np.sum(a * a))
    if n == 1 or _off_sq(a) <= target:
        return np.diag(a).copy(), v

    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            big = np.abs(theta) > 1e150
            safe = np.where(big, 0.0, theta)
            t = np.sign(safe) / (np.abs(safe) + np.sqrt(safe * safe + 1.0))
            t = np.where(safe == 0.0, 1.0, t)
            t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            # A <- J^T A J, J[p,p]=J[q,q]=c, J[p,q]=s, J[q,p]=-s
            col_p, col_q = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * col_p - s * col_q
            a[:, q] = s * col_p + c * col_q
            row_p, row_q = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * row_p - s[:, None] * row_q
            a[q, :] = s[:, None] * row_p + c[:, None] * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0
            if v is not None:
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        if _off_sq(a) <= target:
            return np.diag(a).copy(), v
    raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def decompose(matrix: SymmetricMatrix, want_vectors: bool = False) -> Spectrum:
    w, v = jacobi_eigh(matrix.entries, want_vectors=want_vectors)
    return Spectrum.from_eigenvalues(w, None if v is None else v.T)


_TOKEN = re.compile(r"[\s,]+")


def parse_matrix_text(text: str, mode: Mode = "strict") -> SymmetricMatrix:
    """Parse '# comments', then n, then n*n numbers (whitespace or comma separated)."""
    tokens: list[str] = []
    for line in text.splitlines():
        if line.lstrip().startswith("#"):
            continue
        tokens.extend(tok for tok in _TOKEN.split(line) if tok)
    if not tokens:
        raise MatrixError("empty matrix file")
    try:
        n = int(tokens[0])
    except ValueError:
        raise MatrixError(f"first token must be the dimension n, got {tokens[0]!r}") from None
    try:
        values = [float(tok) for tok in tokens[1:]]
    except ValueError as exc:
        raise MatrixError(f"bad matrix entry: {exc}") from None
    return make_symmetric(n, values, mode)


def read_matrix(path: str | Path, mode: Mode = "strict") -> SymmetricMatrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MatrixError(f"cannot read matrix file {path}: {exc.strerror or exc}") from None
    return parse_matrix_text(text, mode)


def format_matrix_text(matrix: SymmetricMatrix) -> str:
    rows = [" ".join(repr(float(x)) for x in row) for row in matrix.entries]
    return "\n".join([str(matrix.n), *rows]) + "\n"
