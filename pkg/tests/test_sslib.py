import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rcoog import StateSpace, TwoOutputPlant, freq_response, spectral_abscissa
from rcoog.errors import NotStable, PlantFormatError, SingularResolvent
from rcoog.sslib import format_plant, parse_plant, read_plant, write_plant

from conftest import random_plant


def test_first_order_dc_gain():
    sys = StateSpace([[-1.0]], [[1.0]], [[1.0]], [[0.0]])
    assert freq_response(sys, 0.0) == pytest.approx(np.array([[1.0]]))


def test_first_order_unit_frequency():
    sys = StateSpace([[-1.0]], [[1.0]], [[1.0]], [[0.0]])
    assert freq_response(sys, 1.0)[0, 0] == pytest.approx(0.5 - 0.5j)


def test_zero_input_matrix_gives_feedthrough(rng):
    D = rng.standard_normal((2, 3))
    sys = StateSpace(-np.eye(4), np.zeros((4, 3)), rng.standard_normal((2, 4)), D)
    for w in (0.0, 0.3, 17.0):
        np.testing.assert_array_equal(freq_response(sys, w), D)


def test_resolvent_singular_on_imaginary_eigenvalue():
    sys = StateSpace([[0.0, 1.0], [-1.0, 0.0]], [[0.0], [1.0]], [[1.0, 0.0]], [[0.0]])
    with pytest.raises(SingularResolvent):
        freq_response(sys, 1.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), omega=st.floats(0.0, 1e3))
def test_conjugate_symmetry(seed, omega):
    p = random_plant(np.random.default_rng(seed))
    G = freq_response(p.performance, omega)
    Gm = freq_response(p.performance, -omega)
    np.testing.assert_allclose(Gm, G.conj(), rtol=1e-10, atol=1e-12)


def test_high_frequency_tends_to_feedthrough(rng):
    p = random_plant(rng, n=5)
    sys = p.performance
    errs = [np.linalg.norm(freq_response(sys, w) - sys.D) for w in (1e2, 1e3, 1e4)]
    assert errs[0] > errs[1] > errs[2]
    # strictly proper part decays like 1/w
    assert errs[1] * 1e3 == pytest.approx(errs[2] * 1e4, rel=1e-3)


@pytest.mark.parametrize(
    "A, expected",
    [
        ([[-1.0]], -1.0),
        (np.diag([-2.0, -0.3]), -0.3),
        ([[0.0, 1.0], [-1.0, 0.0]], 0.0),
    ],
)
def test_spectral_abscissa_examples(A, expected):
    assert spectral_abscissa(np.array(A)) == pytest.approx(expected, abs=1e-14)


def test_spectral_abscissa_similarity(rng):
    for _ in range(20):
        lam = rng.uniform(-3, 1, size=6)
        Q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
        T = Q @ np.diag(rng.uniform(1, 2, 6))
        A = np.linalg.solve(T, lam[:, None] * T)
        assert spectral_abscissa(A) == pytest.approx(lam.max(), abs=1e-8)


def test_dimension_checks():
    with pytest.raises(ValueError):
        StateSpace(np.zeros((2, 3)), np.zeros((2, 1)), np.zeros((1, 2)), np.zeros((1, 1)))
    with pytest.raises(ValueError):
        TwoOutputPlant(A=-np.eye(2), B=np.ones((3, 1)), Cp=np.ones((1, 2)), Cr=np.ones((1, 2)))
    with pytest.raises(ValueError):
        TwoOutputPlant(A=-np.eye(2), B=np.ones((2, 1)), Cp=np.ones((1, 2)), Cr=np.ones((1, 2)),
                       Dr=np.ones((1, 2)))
    with pytest.raises(ValueError):
        StateSpace([[np.nan]], [[1.0]], [[1.0]], [[0.0]])


def test_matrices_are_read_only(scalar):
    with pytest.raises(ValueError):
        scalar.A[0, 0] = 3.0


def test_require_stable():
    p = TwoOutputPlant(A=[[1e-12]], B=[[1.0]], Cp=[[1.0]], Cr=[[1.0]])
    with pytest.raises(NotStable, match="not stable within margin"):
        p.require_stable()
    assert TwoOutputPlant(A=[[-1.0]], B=[[1.0]], Cp=[[1.0]], Cr=[[1.0]]).require_stable() == -1.0


def test_plant_text_round_trip(tmp_path, rng):
    p = random_plant(rng, n=3, m=2, pp=1, pr=2)
    path = tmp_path / "x.plant"
    write_plant(path, p, header="test")
    assert read_plant(path) == p


def test_parse_defaults_and_comments():
    text = """
    # comment line
    A 2 2
    -1 0
    0 -2   # trailing comment
    B
    2 1
    1 1
    Cp 1 2 1 0
    Cr 1 2 0 1
    """
    p = parse_plant(text)
    np.testing.assert_array_equal(p.Dp, np.zeros((1, 1)))
    np.testing.assert_array_equal(p.Dr, np.zeros((1, 1)))
    np.testing.assert_array_equal(p.A, np.diag([-1.0, -2.0]))


@pytest.mark.parametrize(
    "text",
    [
        "A 1 1 -1\nB 1 1 1\nCp 1 1 1\n",  # missing Cr
        "A 1 1 -1\nB 1 1\nCp 1 1 1\nCr 1 1 1\n",  # too few values
        "A 1 1 x\nB 1 1 1\nCp 1 1 1\nCr 1 1 1\n",
        "A 1 1 -1\nB 1 1 1\nCp 1 1 1\nCr 1 1 1\nQ 1 1 1\n",
        "A 1 1 -1\nB 1 1 1\nCp 1 2 1 1\nCr 1 1 1\n",  # shape mismatch
        "A 1 1 -1\nA 1 1 -1\nB 1 1 1\nCp 1 1 1\nCr 1 1 1\n",
    ],
)
def test_malformed_plant_text(text):
    with pytest.raises(PlantFormatError):
        parse_plant(text)


def test_format_uses_round_trip_decimals(rng):
    p = random_plant(rng, n=2, m=1, pp=1, pr=1)
    assert parse_plant(format_plant(p)) == p
