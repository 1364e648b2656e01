"""State-space systems, frequency responses and the plant text format."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg as la

from .errors import EigenFailure, NotStable, PlantFormatError, SingularResolvent


def _as_matrix(name, value, shape=None):
    arr = np.array(value, dtype=float, copy=True)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got ndim={arr.ndim}")
    if shape is not None and arr.shape != shape:
        raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateSpace:
    """Continuous-time system ``x' = Ax + Bu, y = Cx + Du``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = _as_matrix("A", self.A)
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError(f"A must be square, got {A.shape}")
        B = _as_matrix("B", self.B)
        if B.shape[0] != n:
            raise ValueError(f"B must have {n} rows, got {B.shape}")
        C = _as_matrix("C", self.C)
        if C.shape[1] != n:
            raise ValueError(f"C must have {n} columns, got {C.shape}")
        D = _as_matrix("D", self.D, (C.shape[0], B.shape[1]))
        for k, v in zip("ABCD", (A, B, C, D)):
            object.__setattr__(self, k, v)

    @property
    def nstates(self) -> int:
        return self.A.shape[0]

    @property
    def ninputs(self) -> int:
        return self.B.shape[1]

    @property
    def noutputs(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True, eq=False)
class TwoOutputPlant:
    """System ``(A, B)`` with a performance output ``(Cp, Dp)`` and a
    residual output ``(Cr, Dr)``.

    ``Dp`` and ``Dr`` may be omitted and default to zeros.
    """

    A: np.ndarray
    B: np.ndarray
    Cp: np.ndarray
    Cr: np.ndarray
    Dp: np.ndarray | None = None
    Dr: np.ndarray | None = None

    def __post_init__(self):
        A = _as_matrix("A", self.A)
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError(f"A must be square, got {A.shape}")
        B = _as_matrix("B", self.B)
        if B.shape[0] != n:
            raise ValueError(f"B must have {n} rows, got {B.shape}")
        m = B.shape[1]
        Cp = _as_matrix("Cp", self.Cp)
        Cr = _as_matrix("Cr", self.Cr)
        for name, C in (("Cp", Cp), ("Cr", Cr)):
            if C.shape[1] != n:
                raise ValueError(f"{name} must have {n} columns, got {C.shape}")
        Dp = np.zeros((Cp.shape[0], m)) if self.Dp is None else self.Dp
        Dr = np.zeros((Cr.shape[0], m)) if self.Dr is None else self.Dr
        Dp = _as_matrix("Dp", Dp, (Cp.shape[0], m))
        Dr = _as_matrix("Dr", Dr, (Cr.shape[0], m))
        for k, v in zip(("A", "B", "Cp", "Cr", "Dp", "Dr"), (A, B, Cp, Cr, Dp, Dr)):
            object.__setattr__(self, k, v)

    @property
    def nstates(self) -> int:
        return self.A.shape[0]

    @property
    def ninputs(self) -> int:
        return self.B.shape[1]

    @property
    def performance(self) -> StateSpace:
        return StateSpace(self.A, self.B, self.Cp, self.Dp)

    @property
    def residual(self) -> StateSpace:
        return StateSpace(self.A, self.B, self.Cr, self.Dr)

    def stability_margin(self, tau_stab: float = 1e-8) -> float:
        """Scale-aware margin ``tau_stab * (1 + ||A||_F)``."""
        return tau_stab * (1.0 + np.linalg.norm(self.A, "fro"))

    def require_stable(self, tau_stab: float = 1e-8) -> float:
        """Raise :class:`NotStable` unless ``max Re eig(A) <= -margin``.

        Returns the spectral abscissa.
        """
        alpha = spectral_abscissa(self.A)
        if alpha > -self.stability_margin(tau_stab):
            raise NotStable(
                f"system is not stable within margin (spectral abscissa {alpha:.3e})"
            )
        return alpha

    def __eq__(self, other):
        if not isinstance(other, TwoOutputPlant):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, k), getattr(other, k))
            for k in ("A", "B", "Cp", "Dp", "Cr", "Dr")
        )

    __hash__ = None


def spectral_abscissa(A) -> float:
    """Largest real part over the eigenvalues of ``A``."""
    A = np.asarray(A, dtype=float)
    try:
        lam = la.eigvals(A, check_finite=True)
    except (la.LinAlgError, ValueError) as exc:
        raise EigenFailure(str(exc)) from exc
    return float(np.max(lam.real))


def _resolvent_solve(A, B, omega):
    # Solve (i w I - A) X = B via LU; a tiny pivot means an eigenvalue of A sits at i*w.
    n = A.shape[0]
    Z = 1j * omega * np.eye(n) - A
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", la.LinAlgWarning)
        lu, piv = la.lu_factor(Z, check_finite=False)
    d = np.abs(np.diag(lu))
    if d.min() <= n * np.finfo(float).eps * max(d.max(), 1.0):
        raise SingularResolvent(f"iwI - A is singular at omega={omega}")
    return la.lu_solve((lu, piv), B.astype(complex), check_finite=False)


def freq_response(sys: StateSpace, omega: float) -> np.ndarray:
    """Evaluate ``C (i omega I - A)^{-1} B + D``."""
    if not np.any(sys.B) or sys.nstates == 0:
        return sys.D.astype(complex)
    X = _resolvent_solve(sys.A, sys.B, float(omega))
    return sys.C @ X + sys.D


def freq_response_pair(plant: TwoOutputPlant, omega: float):
    """``(G_p(i omega), G_r(i omega))`` sharing one resolvent solve."""
    if not np.any(plant.B):
        return plant.Dp.astype(complex), plant.Dr.astype(complex)
    X = _resolvent_solve(plant.A, plant.B, float(omega))
    return plant.Cp @ X + plant.Dp, plant.Cr @ X + plant.Dr


def freq_response_batch(A, B, Cs, Ds, omegas, chunk: int = 256):
    """Stacked responses for many frequencies.

    Returns one array of shape ``(len(omegas), p_k, m)`` per ``(C_k, D_k)``
    pair, plus a boolean mask of frequencies whose solve failed (those rows
    are NaN).
    """
    omegas = np.asarray(omegas, dtype=float)
    n, m = B.shape
    K = omegas.size
    outs = [np.empty((K, C.shape[0], m), dtype=complex) for C in Cs]
    failed = np.zeros(K, dtype=bool)
    eye = np.eye(n)
    Bc = B.astype(complex)
    for start in range(0, K, chunk):
        w = omegas[start:start + chunk]
        Z = 1j * w[:, None, None] * eye - A
        try:
            X = np.linalg.solve(Z, np.broadcast_to(Bc, (w.size, n, m)))
        except np.linalg.LinAlgError:
            X = np.full((w.size, n, m), np.nan, dtype=complex)
            for k, wk in enumerate(w):
                try:
                    X[k] = _resolvent_solve(A, B, wk)
                except SingularResolvent:
                    failed[start + k] = True
        for out, C, D in zip(outs, Cs, Ds):
            out[start:start + w.size] = C @ X + D
    return outs, failed


# -- plant text format -------------------------------------------------------

PLANT_SECTIONS = ("A", "B", "Cp", "Dp", "Cr", "Dr")
_REQUIRED = ("A", "B", "Cp", "Cr")


def parse_plant(text: str) -> TwoOutputPlant:
    """Parse the plant text format.

    Each section is a name (``A``, ``B``, ``Cp``, ``Dp``, ``Cr``, ``Dr``),
    then ``rows cols``, then ``rows*cols`` row-major numbers. Everything
    after ``#`` on a line is ignored.
    """
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    mats = {}
    pos = 0
    while pos < len(tokens):
        name = tokens[pos]
        if name not in PLANT_SECTIONS:
            raise PlantFormatError(f"unknown section {name!r}")
        if name in mats:
            raise PlantFormatError(f"duplicate section {name!r}")
        try:
            rows, cols = int(tokens[pos + 1]), int(tokens[pos + 2])
        except (IndexError, ValueError):
            raise PlantFormatError(f"section {name}: expected 'rows cols'") from None
        if rows < 0 or cols < 0:
            raise PlantFormatError(f"section {name}: negative dimension")
        pos += 3
        count = rows * cols
        vals = tokens[pos:pos + count]
        if len(vals) != count:
            raise PlantFormatError(
                f"section {name}: expected {count} values, got {len(vals)}"
            )
        try:
            data = np.array([float(v) for v in vals], dtype=float)
        except ValueError as exc:
            raise PlantFormatError(f"section {name}: {exc}") from None
        mats[name] = data.reshape(rows, cols)
        pos += count
    missing = [k for k in _REQUIRED if k not in mats]
    if missing:
        raise PlantFormatError(f"missing sections: {', '.join(missing)}")
    try:
        return TwoOutputPlant(**mats)
    except ValueError as exc:
        raise PlantFormatError(str(exc)) from None


def read_plant(path) -> TwoOutputPlant:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise PlantFormatError(f"cannot read {path}: {exc}") from None
    return parse_plant(text)


def format_plant(plant: TwoOutputPlant, header: str | None = None) -> str:
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    for name in PLANT_SECTIONS:
        M = getattr(plant, name)
        lines.append(name)
        lines.append(f"{M.shape[0]} {M.shape[1]}")
        for row in M:
            lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def write_plant(path, plant: TwoOutputPlant, header: str | None = None) -> None:
    Path(path).write_text(format_plant(plant, header), encoding="utf-8")
