# Filename: diracgap/eigensolve.py
"""Generalized symmetric eigensolver for assembled pencils.

The overlap is diagonalized first and near-null directions are dropped (canonical
orthogonalization), so nearly dependent Gaussian bases still solve. Eigenvectors come back in
basis coordinates with a fixed sign, and each one carries its residual on the kept subspace.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .errors import DegenerateBasisError, SolverAccuracyError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray        # ascending
    eigenvectors: np.ndarray       # basis coordinates, one column per eigenvalue, x^T S x = 1
    n_discarded: int
    s_condition: float
    residuals: np.ndarray

    @property
    def residual_max(self) -> float:
        return float(self.residuals.max()) if self.residuals.size else 0.0

    def __len__(self) -> int:
        return self.eigenvalues.size


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """First coefficient that is not round-off noise is made positive."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        big = np.flatnonzero(np.abs(col) > 1e-12 * np.max(np.abs(col)))
        if big.size and col[big[0]] < 0:
            out[:, k] = -col
    return out


def solve_pencil(p, overlap_threshold: float = 1e-10, residual_tolerance: float | None = None) -> SpectrumResult:
    """Hx = lambda Sx by canonical orthogonalization.

    Overlap directions with eigenvalue below overlap_threshold * max are dropped; the pencil is
    transformed to X^T H X with X = U s^-1/2 on the kept directions and solved densely.
    """
    h = np.asarray(p.h, dtype=float)
    s = np.asarray(p.s, dtype=float)
    if h.shape != s.shape or h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DegenerateBasisError(f"pencil blocks must be square and equal-sized, got {h.shape} and {s.shape}")
    if h.shape[0] == 0:
        raise DegenerateBasisError("empty pencil")

    s_vals, s_vecs = eigh(s)
    s_top = s_vals[-1]
    keep = s_vals > overlap_threshold * s_top if s_top > 0 else np.zeros_like(s_vals, dtype=bool)
    if not keep.any():
        raise DegenerateBasisError(f"no overlap eigenvalue above {overlap_threshold:g} x max ({s_top:.3e})")
    n_discarded = int((~keep).sum())
    if n_discarded:
        logger.debug("canonical orthogonalization dropped %d of %d overlap directions", n_discarded, s.shape[0])

    kept_vals = s_vals[keep]
    u_kept = s_vecs[:, keep]
    x = u_kept / np.sqrt(kept_vals)
    h_t = x.T @ h @ x
    h_t = 0.5 * (h_t + h_t.T)
    values, y = eigh(h_t)
    vectors = _fix_signs(x @ y)

    # residuals on the kept overlap subspace
    raw = h @ vectors - (s @ vectors) * values
    norms = np.sqrt(np.einsum("ij,ij->j", vectors, s @ vectors))
    residuals = np.linalg.norm(u_kept.T @ raw, axis=0) / norms

    h_max = float(np.max(np.abs(h)))
    tol = 1e-8 * h_max if residual_tolerance is None else residual_tolerance
    worst = float(residuals.max())
    if worst > tol:
        raise SolverAccuracyError(f"eigenpair residual {worst:.3e} exceeds tolerance {tol:.3e}")

    return SpectrumResult(
        eigenvalues=values,
        eigenvectors=vectors,
        n_discarded=n_discarded,
        s_condition=float(kept_vals[-1] / kept_vals[0]),
        residuals=residuals,
    )


def gap_eigenvalues(r: SpectrumResult, margin: float = 0.0) -> list[tuple[int, float]]:
    """Eigenvalues strictly inside (-1 + margin, 1 - margin), with their indices."""
    return [(i, float(e)) for i, e in enumerate(r.eigenvalues) if -1.0 + margin < e < 1.0 - margin]
