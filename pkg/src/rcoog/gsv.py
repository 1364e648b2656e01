"""Generalized singular values and the frequency-wise RCOOG objective.

The values of a pair ``(M, N)`` are the ``sigma >= 0`` with
``M^H M v = sigma^2 N^H N v``. With ``N^H N = L L^H`` they are the square
roots of the eigenvalues of ``L^{-1} M^H M L^{-H}``, i.e. the singular
values of ``L^{-1} M^H``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import NotPositiveDefinite
from .sslib import TwoOutputPlant, freq_response_pair


@dataclass(frozen=True)
class GsvResult:
    values: tuple  # descending, nonnegative

    @property
    def count(self) -> int:
        return len(self.values)

    @property
    def max(self) -> float:
        return self.values[0] if self.values else 0.0


def _reduced_gsv(M, NhN):
    try:
        L = la.cholesky(NhN, lower=True, check_finite=False)
    except la.LinAlgError as exc:
        raise NotPositiveDefinite(f"N^H N is not positive definite: {exc}") from None
    # Z Z^H = L^{-1} M^H M L^{-H}; singular values of Z avoid squaring M.
    Z = la.solve_triangular(L, M.conj().T, lower=True, check_finite=False)
    vals = np.zeros(NhN.shape[0])
    if Z.size:
        sv = la.svd(Z, compute_uv=False, check_finite=False)
        vals[: sv.size] = sv
    return vals


def generalized_singular_values(M, N) -> GsvResult:
    """All generalized singular values of ``(M, N)``, largest first.

    ``N^H N`` must be positive definite. Zero values are kept.
    """
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    N = np.atleast_2d(np.asarray(N, dtype=complex))
    if M.shape[1] != N.shape[1]:
        raise ValueError(f"column mismatch: M is {M.shape}, N is {N.shape}")
    vals = _reduced_gsv(M, N.conj().T @ N)
    return GsvResult(tuple(float(v) for v in vals))


def objective_gsv(Gp, Gr, epsilon: float) -> GsvResult:
    """Generalized singular values of ``(Gp, [Gr; sqrt(eps) I])``."""
    Gp = np.asarray(Gp, dtype=complex)
    Gr = np.asarray(Gr, dtype=complex)
    m = Gp.shape[1]
    NhN = Gr.conj().T @ Gr + epsilon * np.eye(m)
    vals = _reduced_gsv(Gp, NhN)
    return GsvResult(tuple(float(v) for v in vals))


def max_gsv_at_frequency(plant: TwoOutputPlant, epsilon: float, omega: float) -> float:
    """``sigma_bar(G_p(i w), [G_r(i w); sqrt(eps) I])``.

    ``epsilon = 0`` is accepted when ``G_r^H G_r`` alone is definite.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    Gp, Gr = freq_response_pair(plant, omega)
    if not np.any(Gp):
        return 0.0
    return objective_gsv(Gp, Gr, epsilon).max


def max_gsv_stack(Gp, Gr, epsilon: float) -> np.ndarray:
    """Vectorised maximum objective value over stacked responses.

    ``Gp`` has shape ``(K, pp, m)`` and ``Gr`` shape ``(K, pr, m)``. Rows
    containing NaN yield NaN.
    """
    K, _, m = Gp.shape
    out = np.full(K, np.nan)
    ok = np.isfinite(Gp).all(axis=(1, 2)) & np.isfinite(Gr).all(axis=(1, 2))
    if not ok.any():
        return out
    Gp, Gr = Gp[ok], Gr[ok]
    GpH = np.conj(np.swapaxes(Gp, 1, 2))
    NhN = np.conj(np.swapaxes(Gr, 1, 2)) @ Gr + epsilon * np.eye(m)
    try:
        L = np.linalg.cholesky(NhN)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"N^H N is not positive definite: {exc}") from None
    Z = np.linalg.solve(L, GpH)  # L^{-1} Gp^H, shape (K, m, pp)
    X = Z @ np.conj(np.swapaxes(Z, 1, 2))
    ev = np.linalg.eigvalsh(X)[:, -1]
    out[ok] = np.sqrt(np.clip(ev, 0.0, None))
    return out
