"""Hamiltonian matrix whose imaginary eigenvalues mark level crossings.

For a level ``gamma`` the matrix ``M_gamma`` has an eigenvalue ``i w`` iff
``gamma`` is a generalized singular value *squared* of
``(G_p(i w), [G_r(i w); sqrt(eps) I])``: ``det Gamma(i w) = 0`` with
``Gamma = gamma (G_r^H G_r + eps I) - G_p^H G_p``. The functions here take
``gamma`` on that squared scale; the solver passes the square of its gain
level.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import EigenFailure, RegularizationFailed, SingularDcal
from .sslib import TwoOutputPlant


@dataclass(frozen=True, eq=False)
class HamiltonianParts:
    Dcal: np.ndarray
    K: np.ndarray
    Mgamma: np.ndarray
    gamma: float
    epsilon: float


@dataclass(frozen=True)
class ImagEigs:
    frequencies: tuple
    residuals: tuple

    def __len__(self):
        return len(self.frequencies)

    def __bool__(self):
        return bool(self.frequencies)


def _symmetrize(X):
    return 0.5 * (X + X.T)


def dcal_matrix(plant: TwoOutputPlant, epsilon: float, gamma: float):
    """``gamma Dr^T Dr + gamma eps I - Dp^T Dp`` and its cancellation scale."""
    m = plant.ninputs
    DrtDr = plant.Dr.T @ plant.Dr
    DptDp = plant.Dp.T @ plant.Dp
    Dcal = _symmetrize(gamma * DrtDr + gamma * epsilon * np.eye(m) - DptDp)
    scale = max(
        gamma * (np.linalg.norm(DrtDr, 2) if m else 0.0) + gamma * epsilon,
        np.linalg.norm(DptDp, 2) if m else 0.0,
    )
    return Dcal, scale


def _dcal_solver(Dcal):
    # Dcal is symmetric; Cholesky when definite, LU otherwise.
    try:
        c = la.cho_factor(Dcal, lower=True, check_finite=False)
        return lambda rhs: la.cho_solve(c, rhs, check_finite=False)
    except la.LinAlgError:
        lu = la.lu_factor(Dcal, check_finite=False)
        return lambda rhs: la.lu_solve(lu, rhs, check_finite=False)


def build_hamiltonian(
    plant: TwoOutputPlant,
    epsilon: float,
    gamma: float,
    tau_sing: float = 1e-12,
) -> HamiltonianParts:
    """Assemble ``Dcal``, ``K`` and the ``2n x 2n`` matrix ``M_gamma``.

    ``M_gamma = [[A + BK, -B Dcal^{-1} B^T],
                 [-gamma Cr^T (Cr + Dr K) + Cp^T (Cp + Dp K), -(A + BK)^T]]``
    with ``K = Dcal^{-1} (Dp^T Cp - gamma Dr^T Cr)``.

    Raises:
        SingularDcal: if the smallest singular value of ``Dcal`` is below
            ``tau_sing`` times the magnitude of the terms it is built from.
    """
    if epsilon <= 0 or gamma <= 0:
        raise ValueError("epsilon and gamma must be positive")
    A, B = plant.A, plant.B
    Cp, Dp, Cr, Dr = plant.Cp, plant.Dp, plant.Cr, plant.Dr
    Dcal, scale = dcal_matrix(plant, epsilon, gamma)
    sig_min = float(np.min(np.abs(la.eigvalsh(Dcal)))) if Dcal.size else np.inf
    if sig_min <= tau_sing * scale:
        raise SingularDcal(
            f"Dcal is numerically singular (sigma_min={sig_min:.3e}, "
            f"gamma={gamma:.6g}, epsilon={epsilon:.3g})",
            sigma_min=sig_min,
        )
    solve = _dcal_solver(Dcal)

    S = Cp.T @ Dp - gamma * (Cr.T @ Dr)  # n x m
    K = solve(S.T)
    AK = A + B @ K
    M12 = -_symmetrize(B @ solve(B.T))
    M21 = _symmetrize(Cp.T @ Cp - gamma * (Cr.T @ Cr) + S @ K)
    M = np.block([[AK, M12], [M21, -AK.T]])
    return HamiltonianParts(Dcal=Dcal, K=K, Mgamma=M, gamma=float(gamma), epsilon=float(epsilon))


def retry_regularization(
    plant: TwoOutputPlant,
    epsilon0: float,
    gamma: float,
    max_tries: int = 20,
    delta: float = 0.01,
    tau_sing: float = 1e-12,
) -> float:
    """Smallest ``epsilon0 (1 + delta)^k``, ``k <= max_tries``, giving an
    invertible ``Dcal``."""
    if epsilon0 <= 0:
        raise ValueError("epsilon0 must be positive")
    history = []
    for k in range(max_tries + 1):
        eps = epsilon0 * (1.0 + delta) ** k
        try:
            build_hamiltonian(plant, eps, gamma, tau_sing)
            return eps
        except SingularDcal as exc:
            history.append((eps, exc.sigma_min))
    raise RegularizationFailed(
        f"Dcal stayed singular for {max_tries + 1} regularization values", history
    )


def hamiltonian_residual(M) -> float:
    """``||(J M)^T - J M||_max`` with ``J = [[0, I], [-I, 0]]``."""
    n = M.shape[0] // 2
    JM = np.vstack([M[n:], -M[:n]])
    return float(np.max(np.abs(JM.T - JM))) if M.size else 0.0


def imaginary_eigenvalues(
    H: HamiltonianParts | np.ndarray,
    tau_im: float = 1e-8,
    tau_merge: float = 1e-7,
) -> ImagEigs:
    """Frequencies ``w >= 0`` of the (numerically) imaginary eigenvalues.

    An eigenvalue counts as imaginary when ``|Re l| <= tau_im (1 + |l|)``.
    Frequencies closer than ``tau_merge (1 + w)`` are merged.
    """
    M = H.Mgamma if isinstance(H, HamiltonianParts) else np.asarray(H, dtype=float)
    try:
        lam = la.eigvals(M, check_finite=False)
    except la.LinAlgError as exc:
        raise EigenFailure(f"eigenvalue decomposition failed: {exc}") from None
    if not np.all(np.isfinite(lam)):
        raise EigenFailure("eigenvalue decomposition returned non-finite values")
    res = np.abs(lam.real)
    keep = (res <= tau_im * (1.0 + np.abs(lam))) & (lam.imag >= 0)
    w = np.abs(lam.imag[keep])
    r = res[keep]
    order = np.argsort(w, kind="stable")
    freqs, resid = [], []
    for wk, rk in zip(w[order], r[order]):
        if freqs and wk - freqs[-1] <= tau_merge * (1.0 + freqs[-1]):
            resid[-1] = min(resid[-1], rk)
            continue
        freqs.append(float(wk))
        resid.append(float(rk))
    return ImagEigs(tuple(freqs), tuple(resid))
