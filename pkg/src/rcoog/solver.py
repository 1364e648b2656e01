"""Level-set iteration for the regularized cyclic output-to-output gain.

Each iteration raises a certified lower bound ``lower``. The level
``gamma = (1 + 2 tol) lower`` is tested through the imaginary eigenvalues of
the Hamiltonian: none means the gain is below ``gamma`` and the midpoint of
``[lower, gamma]`` is returned; otherwise the objective is sampled between
consecutive crossing frequencies and ``lower`` is raised to the best sample.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    MaxIterationsExceeded,
    NotPositiveDefinite,
    SingularDcal,
    SingularResolvent,
    StagnationDetected,
)
from .gsv import max_gsv_at_frequency, objective_gsv
from .hamiltonian import (
    HamiltonianParts,
    build_hamiltonian,
    imaginary_eigenvalues,
    retry_regularization,
)
from .sslib import TwoOutputPlant

log = logging.getLogger(__name__)

# relative gain required before a sample counts as an improvement
_IMPROVE = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-8
    tol_gamma: float = 1e-4
    tau_im: float = 1e-8
    tau_merge: float = 1e-7
    tau_sing: float = 1e-12
    tau_stab: float = 1e-8
    max_iters: int = 100
    max_reg_tries: int = 20

    def __post_init__(self):
        for name in ("epsilon", "tol_gamma", "tau_im", "tau_merge", "tau_sing", "tau_stab"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.max_reg_tries < 0:
            raise ValueError("max_reg_tries must be >= 0")


@dataclass(frozen=True)
class TraceEntry:
    lower: float
    crossings: tuple
    epsilon: float
    note: str = ""


@dataclass(frozen=True)
class RcoogResult:
    value: float
    lower: float
    upper: float
    peak_frequency: float
    iterations: int
    trace: tuple = field(default_factory=tuple)
    epsilon: float = math.nan  # regularization actually used

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "peak_frequency": None if math.isinf(self.peak_frequency) else self.peak_frequency,
            "iterations": self.iterations,
        }


def _sigma_bar(plant, epsilon, omega):
    if math.isinf(omega):
        return objective_gsv(plant.Dp, plant.Dr, epsilon).max if np.any(plant.Dp) else 0.0
    return max_gsv_at_frequency(plant, epsilon, omega)


def initial_lower_bound(plant: TwoOutputPlant, epsilon: float):
    """Larger of the objective at ``w = 0`` and ``w -> inf``.

    Returns ``(value, omega)`` where ``omega`` is ``0.0`` or ``math.inf``.
    """
    at_zero = _sigma_bar(plant, epsilon, 0.0)
    at_inf = _sigma_bar(plant, epsilon, math.inf)
    if at_inf > at_zero:
        return at_inf, math.inf
    return at_zero, 0.0


def _probe_lower_bound(plant, epsilon):
    # Lower bound is zero at w=0 and w=inf. With Dp = 0 each entry of G_p is a
    # strictly proper rational function of degree < n, so vanishing at n + 1
    # distinct frequencies proves G_p == 0.
    best, best_w = 0.0, 0.0
    for k in range(1, plant.nstates + 2):
        w = float(k)
        try:
            v = max_gsv_at_frequency(plant, epsilon, w)
        except SingularResolvent:
            continue
        if v > best:
            best, best_w = v, w
    return best, best_w


def _hamiltonian_at(plant, epsilon, level, cfg):
    """Hamiltonian for gain ``level`` (squared scale internally)."""
    g2 = level * level
    try:
        return build_hamiltonian(plant, epsilon, g2, cfg.tau_sing)
    except SingularDcal:
        eps = retry_regularization(plant, epsilon, g2, cfg.max_reg_tries, tau_sing=cfg.tau_sing)
        log.warning("Dcal singular at epsilon=%g; regularization nudged to %g", epsilon, eps)
        return build_hamiltonian(plant, eps, g2, cfg.tau_sing)


def _best_sample(plant, epsilon, omegas):
    best, best_w = -math.inf, math.nan
    for w in omegas:
        try:
            v = max_gsv_at_frequency(plant, epsilon, w)
        except (SingularResolvent, NotPositiveDefinite) as exc:
            log.warning("skipping sample at omega=%g: %s", w, exc)
            continue
        if v > best:
            best, best_w = v, w
    return best, best_w


def compute_rcoog(plant: TwoOutputPlant, cfg: SolverConfig | None = None) -> RcoogResult:
    """Compute the RCOOG to relative tolerance ``cfg.tol_gamma``.

    The true gain lies in ``[result.lower, result.upper)``.

    Raises:
        NotStable: ``A`` is not Hurwitz within the configured margin.
        MaxIterationsExceeded: the iteration cap was reached; ``exc.result``
            holds the last interval.
        StagnationDetected: crossings were reported but no sample improved
            the lower bound.
    """
    cfg = cfg or SolverConfig()
    plant.require_stable(cfg.tau_stab)
    epsilon = cfg.epsilon
    lower, peak = initial_lower_bound(plant, epsilon)
    if lower == 0.0 and not np.any(plant.Dp):
        lower, peak = _probe_lower_bound(plant, epsilon)
    if lower == 0.0:
        return RcoogResult(0.0, 0.0, 0.0, peak, 0, (), epsilon)

    factor = 1.0 + 2.0 * cfg.tol_gamma
    trace = []

    def result(iterations):
        upper = factor * lower
        return RcoogResult(
            value=0.5 * (lower + upper),
            lower=lower,
            upper=upper,
            peak_frequency=peak,
            iterations=iterations,
            trace=tuple(trace),
            epsilon=epsilon,
        )

    for it in range(1, cfg.max_iters + 1):
        gamma = factor * lower
        H = _hamiltonian_at(plant, epsilon, gamma, cfg)
        epsilon = H.epsilon
        crossings = imaginary_eigenvalues(H, cfg.tau_im, cfg.tau_merge).frequencies
        trace.append(TraceEntry(lower, crossings, epsilon))
        if not crossings:
            return result(it)

        if len(crossings) >= 2:
            samples = [0.5 * (a + b) for a, b in zip(crossings[:-1], crossings[1:])]
        else:
            w1 = crossings[0]
            samples = [w1, 0.5 * w1, 2.0 * w1]
        best, best_w = _best_sample(plant, epsilon, samples)
        if best > lower * (1.0 + _IMPROVE):
            lower, peak = best, best_w
            continue

        if len(crossings) < 2:
            # tangential touch at the peak: lower is already within tolerance
            trace[-1] = replace(trace[-1], note="singleton crossing, converged")
            return result(it)
        best, best_w = _best_sample(plant, epsilon, crossings)
        if best > lower * (1.0 + _IMPROVE):
            trace[-1] = replace(trace[-1], note="midpoints stalled, raised at crossings")
            lower, peak = best, best_w
            continue
        raise StagnationDetected(
            f"no sample improved the lower bound at iteration {it}", result(it)
        )
    raise MaxIterationsExceeded(
        f"no convergence within {cfg.max_iters} iterations", result(cfg.max_iters)
    )


def bounded_below_gamma(plant: TwoOutputPlant, cfg: SolverConfig | None, gamma: float) -> bool:
    """True iff the RCOOG is strictly below ``gamma``."""
    cfg = cfg or SolverConfig()
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    plant.require_stable(cfg.tau_stab)
    # The objective at w = 0 or w -> inf is already a lower bound; below it the
    # crossing test is not conclusive (every value can sit above gamma).
    lower0, _ = initial_lower_bound(plant, cfg.epsilon)
    if gamma <= lower0:
        return False
    H = _hamiltonian_at(plant, cfg.epsilon, gamma, cfg)
    return not imaginary_eigenvalues(H, cfg.tau_im, cfg.tau_merge)


def hamiltonian_for_level(plant: TwoOutputPlant, cfg: SolverConfig, gamma: float) -> HamiltonianParts:
    """``M`` whose imaginary eigenvalues are where some generalized
    singular value equals the gain level ``gamma``."""
    return _hamiltonian_at(plant, cfg.epsilon, gamma, cfg)
