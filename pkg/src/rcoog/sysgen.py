"""Seeded generators for the two experiment families.

All randomness comes from ``numpy.random.Generator(PCG64(seed))``; normals
use numpy's ziggurat sampler. Same ``(spec, seed)`` gives bit-identical
plants for a given numpy release.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import GenerationFailed
from .sslib import TwoOutputPlant, write_plant


@dataclass(frozen=True)
class RandomSystemSpec:
    n_x: int
    seed: int
    pole_range: tuple = (-1.5, -0.5)
    max_cond: float = 1e6

    def __post_init__(self):
        if self.n_x < 5 or self.n_x % 5:
            raise ValueError("n_x must be a positive multiple of 5")
        lo, hi = self.pole_range
        if not lo <= hi < 0:
            raise ValueError("pole_range must be a strictly negative interval")


@dataclass(frozen=True)
class NetworkSpec:
    N: int
    seed: int
    n_edges: int | None = None  # defaults to N
    weight_range: tuple = (0.8, 1.2)
    residual_fraction: float = 0.02

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be at least 2")
        n_edges = self.N if self.n_edges is None else self.n_edges
        if not 0 <= n_edges <= self.N * (self.N - 1):
            raise ValueError("n_edges out of range")
        object.__setattr__(self, "n_edges", n_edges)

    @property
    def n_residuals(self) -> int:
        return max(1, int(round(self.residual_fraction * self.N)))


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def random_stable_plant(spec: RandomSystemSpec) -> TwoOutputPlant:
    """``A = T^{-1} Lambda T`` with real poles, standard-normal ``B, C, D``.

    Inputs and both output channels have dimension ``n_x / 5``.
    """
    rng = _rng(spec.seed)
    n = spec.n_x
    m = n // 5
    lo, hi = spec.pole_range
    poles = rng.uniform(lo, hi, size=n)
    for _ in range(100):
        T = rng.standard_normal((n, n))
        if np.linalg.cond(T) <= spec.max_cond:
            break
    else:
        raise GenerationFailed("could not draw a well-conditioned similarity transform")
    A = np.linalg.solve(T, poles[:, None] * T)
    B = rng.standard_normal((n, m))
    Cp = rng.standard_normal((m, n))
    Dp = rng.standard_normal((m, m))
    Cr = rng.standard_normal((m, n))
    Dr = rng.standard_normal((m, m))
    return TwoOutputPlant(A=A, B=B, Cp=Cp, Dp=Dp, Cr=Cr, Dr=Dr)


def random_digraph(N: int, n_edges: int, rng) -> list:
    """Uniform simple digraph with ``n_edges`` edges, stitched to be strongly
    connected by a cycle through one random node of each component."""
    codes = rng.choice(N * (N - 1), size=n_edges, replace=False)
    src = codes // (N - 1)
    dst = codes % (N - 1)
    dst = dst + (dst >= src)  # skip the diagonal
    edges = sorted(zip(src.tolist(), dst.tolist()))

    n_comp, labels = _scc(N, edges)
    if n_comp > 1:
        reps = [int(rng.choice(np.flatnonzero(labels == c))) for c in range(n_comp)]
        stitched = set(edges)
        stitched.update(zip(reps, reps[1:] + reps[:1]))
        edges = sorted(stitched)
        n_comp, _ = _scc(N, edges)
        if n_comp != 1:
            raise GenerationFailed("graph is not strongly connected after stitching")
    return edges


def _scc(N, edges):
    if edges:
        s, d = zip(*edges)
    else:
        s, d = (), ()
    G = csr_matrix((np.ones(len(edges)), (s, d)), shape=(N, N))
    return connected_components(G, directed=True, connection="strong")


def in_degree_laplacian(N: int, edges, weights) -> np.ndarray:
    """``L = D_in - W`` where ``W[i, j]`` is the weight of edge ``j -> i``."""
    W = np.zeros((N, N))
    for (a, b), w in zip(edges, weights):
        W[b, a] = w
    return np.diag(W.sum(axis=1)) - W


def networked_plant(spec: NetworkSpec) -> TwoOutputPlant:
    """Positive networked system ``A = -(L + I)``.

    Every node is an input channel (``B = I``). The performance output is
    the sum of all states; the residual output reads ``d`` random nodes.
    """
    rng = _rng(spec.seed)
    N = spec.N
    edges = random_digraph(N, spec.n_edges, rng)
    lo, hi = spec.weight_range
    weights = rng.uniform(lo, hi, size=len(edges))
    L = in_degree_laplacian(N, edges, weights)
    A = -(L + np.eye(N))
    nodes = np.sort(rng.choice(N, size=spec.n_residuals, replace=False))
    Cr = np.zeros((nodes.size, N))
    Cr[np.arange(nodes.size), nodes] = 1.0
    return TwoOutputPlant(A=A, B=np.eye(N), Cp=np.ones((1, N)), Cr=Cr)


def make_plant(suite: str, size: int, seed: int) -> TwoOutputPlant:
    if suite == "random":
        return random_stable_plant(RandomSystemSpec(n_x=size, seed=seed))
    if suite == "network":
        return networked_plant(NetworkSpec(N=size, seed=seed))
    raise ValueError(f"unknown suite {suite!r}")


def instance_seed(base_seed: int, size: int, index: int) -> int:
    """Independent 64-bit seed for instance ``index`` of a given size."""
    ss = np.random.SeedSequence([base_seed, size, index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def write_batch(outdir, suite: str, size: int, count: int, base_seed: int) -> Path:
    """Write ``instance_<seed>.plant`` files and a ``manifest.csv``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = outdir / "manifest.csv"
    with manifest.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["file", "suite", "size", "index", "seed"])
        for i in range(count):
            seed = instance_seed(base_seed, size, i)
            path = outdir / f"instance_{seed}.plant"
            write_plant(path, make_plant(suite, size, seed), header=f"{suite} size={size} seed={seed}")
            writer.writerow([path.name, suite, size, i, seed])
    return manifest
