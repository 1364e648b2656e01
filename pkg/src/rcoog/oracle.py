"""Brute-force references used to check the Hamiltonian solver."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import RcoogError, SingularResolvent
from .gsv import max_gsv_at_frequency, max_gsv_stack
from .sslib import StateSpace, TwoOutputPlant, freq_response_batch, freq_response_pair


@dataclass(frozen=True)
class GridSpec:
    omega_min: float = 1e-4
    omega_max: float = 1e4
    n_points: int = 10000
    include_zero: bool = True
    refine: bool = False

    def __post_init__(self):
        if not 0 < self.omega_min < self.omega_max:
            raise ValueError("need 0 < omega_min < omega_max")
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")

    def omegas(self) -> np.ndarray:
        w = np.logspace(np.log10(self.omega_min), np.log10(self.omega_max), self.n_points)
        return np.concatenate([[0.0], w]) if self.include_zero else w


def sigma_curve(plant: TwoOutputPlant, epsilon: float, grid: GridSpec):
    """Objective values on the grid; failed frequencies are NaN."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    w = grid.omegas()
    if not np.any(plant.Cp) and not np.any(plant.Dp):
        return w, np.zeros_like(w)
    (Gp, Gr), _ = freq_response_batch(
        plant.A, plant.B, (plant.Cp, plant.Cr), (plant.Dp, plant.Dr), w
    )
    return w, max_gsv_stack(Gp, Gr, epsilon)


def _refine(plant, epsilon, w, vals, k):
    # Bounded scalar search in log-frequency between the grid neighbours.
    if w[k] == 0.0:
        return vals[k], 0.0
    lo = w[k - 1] if k > 0 and w[k - 1] > 0 else w[k] / 2
    hi = w[k + 1] if k + 1 < w.size else w[k] * 2

    def neg(x):
        try:
            return -max_gsv_at_frequency(plant, epsilon, math.exp(x))
        except RcoogError:
            return math.inf

    res = minimize_scalar(
        neg, bounds=(math.log(lo), math.log(hi)), method="bounded",
        options={"xatol": 1e-10},
    )
    if -res.fun > vals[k]:
        return -res.fun, math.exp(res.x)
    return vals[k], w[k]


def grid_rcoog(plant: TwoOutputPlant, epsilon: float, grid: GridSpec | None = None):
    """Maximum of the objective over the grid and the frequency attaining it.

    A lower bound on the true gain.
    """
    grid = grid or GridSpec()
    w, vals = sigma_curve(plant, epsilon, grid)
    if np.all(np.isnan(vals)):
        raise SingularResolvent("objective could not be evaluated at any grid frequency")
    if not np.any(vals > 0):
        return 0.0, float(grid.omega_min)
    k = int(np.nanargmax(vals))
    if grid.refine:
        v, wk = _refine(plant, epsilon, w, vals, k)
        return float(v), float(wk)
    return float(vals[k]), float(w[k])


def gamma_determinant(plant: TwoOutputPlant, epsilon: float, gamma: float, omega: float) -> complex:
    """``det(gamma G_r^H G_r - G_p^H G_p + gamma eps I)`` at ``i omega``."""
    Gp, Gr = freq_response_pair(plant, omega)
    m = plant.ninputs
    Gam = gamma * (Gr.conj().T @ Gr) - Gp.conj().T @ Gp + gamma * epsilon * np.eye(m)
    return complex(np.linalg.det(Gam))


def hinf_plant(sys: StateSpace) -> TwoOutputPlant:
    """Plant whose residual output is the input itself (``Cr = 0, Dr = I``)."""
    m = sys.ninputs
    return TwoOutputPlant(
        A=sys.A, B=sys.B, Cp=sys.C, Dp=sys.D, Cr=np.zeros((m, sys.nstates)), Dr=np.eye(m)
    )


def hinf_reference(sys: StateSpace, epsilon: float = 1e-8, grid: GridSpec | None = None) -> float:
    """Grid estimate of ``||G||_inf`` through the ``y_r = u`` reduction."""
    return grid_rcoog(hinf_plant(sys), epsilon, grid)[0]
