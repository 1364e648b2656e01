import math

import numpy as np
import pytest

from rcoog import (
    GridSpec,
    SolverConfig,
    TwoOutputPlant,
    bounded_below_gamma,
    compute_rcoog,
    grid_rcoog,
    initial_lower_bound,
)
from rcoog import solver as solver_mod
from rcoog.errors import MaxIterationsExceeded, NotStable, StagnationDetected
from rcoog.hamiltonian import ImagEigs
from rcoog.oracle import hinf_plant
from rcoog.sslib import StateSpace

from conftest import hinf_reference_refined, random_plant, scalar_sigma

SCALAR_PEAK = 1 / math.sqrt(1.01)


def test_lower_bound_scalar(scalar):
    lo, w = initial_lower_bound(scalar, 0.01)
    assert lo == pytest.approx(SCALAR_PEAK, rel=1e-14)
    assert w == 0.0


def test_lower_bound_zero_output():
    p = TwoOutputPlant(A=[[-1.0]], B=[[1.0]], Cp=[[0.0]], Cr=[[1.0]])
    assert initial_lower_bound(p, 0.01) == (0.0, 0.0)


def test_lower_bound_infinity_candidate():
    p = TwoOutputPlant(A=[[-1.0]], B=[[1.0]], Cp=[[0.0]], Cr=[[0.0]], Dp=[[1.0]], Dr=[[0.0]])
    assert initial_lower_bound(p, 1.0)[0] == pytest.approx(1.0)
    # Cp = -1 cancels the DC gain, so only the w -> inf candidate remains
    p = TwoOutputPlant(A=[[-1.0]], B=[[1.0]], Cp=[[-1.0]], Cr=[[0.0]], Dp=[[1.0]], Dr=[[0.0]])
    lo, w = initial_lower_bound(p, 1.0)
    assert lo == pytest.approx(1.0)
    assert math.isinf(w)


def test_scalar_fixture(scalar):
    # 1e6-point grid of the closed form puts the maximum at w = 0
    w = np.concatenate([[0.0], np.logspace(-6, 6, 10**6)])
    assert np.argmax(scalar_sigma(w, 0.01)) == 0
    res = compute_rcoog(scalar, SolverConfig(epsilon=0.01, tol_gamma=1e-4))
    assert res.value == pytest.approx(0.99504, rel=1e-4)
    assert res.lower <= SCALAR_PEAK < res.upper
    assert res.iterations == 1
    assert res.peak_frequency == 0.0


def test_zero_performance_short_circuit():
    p = TwoOutputPlant(A=[[-1.0, 0.0], [1.0, -2.0]], B=[[1.0], [0.0]], Cp=np.zeros((1, 2)), Cr=[[1.0, 1.0]])
    res = compute_rcoog(p)
    assert (res.value, res.iterations) == (0.0, 0)


def test_dc_zero_performance_output():
    # G_p(s) = s / (s + 1)^2 vanishes at w = 0 and w -> inf
    A = np.array([[-1.0, 1.0], [0.0, -1.0]])
    p = TwoOutputPlant(A=A, B=[[0.0], [1.0]], Cp=[[-1.0, 1.0]], Cr=[[1.0, 0.0]])
    assert initial_lower_bound(p, 1e-4)[0] == pytest.approx(0.0, abs=1e-12)
    res = compute_rcoog(p, SolverConfig(epsilon=1e-4))
    g, _ = grid_rcoog(p, 1e-4, GridSpec(refine=True))
    assert res.lower <= g * (1 + 1e-9) and g < res.upper


def test_hinf_reduction():
    rng = np.random.default_rng(5)
    for _ in range(3):
        n, m = 6, 2
        p = random_plant(rng, n=n, m=m, pp=1)
        sys = StateSpace(p.A, p.B, p.Cp, p.Dp)
        ref = hinf_reference_refined(p.A, p.B, p.Cp, p.Dp)
        cfg = SolverConfig(epsilon=1e-8, tol_gamma=1e-4)
        res = compute_rcoog(hinf_plant(sys), cfg)
        assert res.value == pytest.approx(ref, rel=max(2 * cfg.tol_gamma, 1e-4))


@pytest.mark.parametrize("gamma, expected", [(1.0, True), (0.9, False), (1e9, True)])
def test_bounded_below_gamma_scalar(scalar, gamma, expected):
    assert bounded_below_gamma(scalar, SolverConfig(epsilon=0.01), gamma) is expected


def test_sandwich_and_progress(rng):
    cfg = SolverConfig(epsilon=1e-6)
    for _ in range(15):
        p = random_plant(rng, n=8, m=2, pp=2, pr=1)
        res = compute_rcoog(p, cfg)
        g, _ = grid_rcoog(p, cfg.epsilon, GridSpec(refine=True))
        assert g <= res.upper
        assert g >= res.lower * (1 - 1e-6)
        assert res.lower <= res.value <= res.upper
        assert res.upper == pytest.approx((1 + 2 * cfg.tol_gamma) * res.lower, rel=1e-15)
        lowers = [t.lower for t in res.trace]
        assert all(b > a for a, b in zip(lowers, lowers[1:]))
        lo0 = initial_lower_bound(p, cfg.epsilon)[0]
        bound = math.log(res.upper / lo0) / math.log(1 + 2 * cfg.tol_gamma) + 1
        assert res.iterations <= bound


def test_api_consistency(rng):
    cfg = SolverConfig(epsilon=1e-6)
    seen = 0
    for _ in range(30):
        p = random_plant(rng, n=6, m=2)
        res = compute_rcoog(p, cfg)
        if res.peak_frequency in (0.0, math.inf):
            continue
        seen += 1
        assert bounded_below_gamma(p, cfg, res.upper)
        assert not bounded_below_gamma(p, cfg, res.lower * (1 - 1e-6))
    assert seen > 0


def test_determinism(rng):
    p = random_plant(rng, n=10, m=2)
    a = compute_rcoog(p)
    b = compute_rcoog(p)
    assert a.value == b.value and a.trace == b.trace


def test_max_iterations(rng):
    for _ in range(50):
        p = random_plant(rng, n=8, m=2)
        if compute_rcoog(p).iterations > 1:
            break
    with pytest.raises(MaxIterationsExceeded) as info:
        compute_rcoog(p, SolverConfig(max_iters=1))
    r = info.value.result
    assert r.lower <= r.value <= r.upper and r.iterations == 1


def test_unstable_rejected():
    p = TwoOutputPlant(A=[[0.5]], B=[[1.0]], Cp=[[1.0]], Cr=[[1.0]])
    with pytest.raises(NotStable):
        compute_rcoog(p)
    with pytest.raises(NotStable):
        bounded_below_gamma(p, None, 1.0)


def test_stagnation_on_spurious_crossings(scalar, monkeypatch):
    monkeypatch.setattr(solver_mod, "imaginary_eigenvalues", lambda *a: ImagEigs((50.0, 60.0), (0.0, 0.0)))
    with pytest.raises(StagnationDetected) as info:
        compute_rcoog(scalar, SolverConfig(epsilon=0.01))
    assert info.value.result.lower == pytest.approx(SCALAR_PEAK)


def test_singleton_crossing_converges(scalar, monkeypatch):
    monkeypatch.setattr(solver_mod, "imaginary_eigenvalues", lambda *a: ImagEigs((50.0,), (0.0,)))
    res = compute_rcoog(scalar, SolverConfig(epsilon=0.01))
    assert res.lower == pytest.approx(SCALAR_PEAK)
    assert "singleton" in res.trace[-1].note


def test_regularization_nudged_when_dcal_singular():
    eps, level = 1e-3, 2.0
    c = level * math.sqrt(1 + eps)
    p = TwoOutputPlant(A=[[-1.0]], B=[[1.0]], Cp=[[1.0]], Cr=[[1.0]], Dp=[[c]], Dr=[[1.0]])
    H = solver_mod.hamiltonian_for_level(p, SolverConfig(epsilon=eps), level)
    assert H.epsilon == pytest.approx(eps * 1.01)


@pytest.mark.parametrize("tau_im", [1e-10, 1e-8, 1e-6])
def test_value_insensitive_to_imaginary_threshold(rng, tau_im):
    # a few decades either side of the default should not move the answer
    for _ in range(10):
        p = random_plant(rng, n=6)
        ref = compute_rcoog(p, SolverConfig(tol_gamma=1e-6)).value
        got = compute_rcoog(p, SolverConfig(tol_gamma=1e-6, tau_im=tau_im)).value
        assert got == pytest.approx(ref, rel=3e-6)
