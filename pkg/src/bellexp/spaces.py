"""Hidden-variable spaces: sampling streams and quadrature rules.

Every space exposes ``sample(rng, n)`` returning an ``(n, k)`` array of
points drawn from its measure, and ``quadrature(nodes)`` returning
``(points, weights)`` with weights summing to one.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CHUNK_SIZE = 4096


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    """Counter-based stream for one chunk of samples.

    The stream depends only on ``(seed, chunk)``, so the samples in a chunk
    are the same however the chunks are scheduled.
    """
    key = np.random.SeedSequence([int(seed) % 2**64, int(chunk)])
    return np.random.Generator(np.random.Philox(key))


def chunk_bounds(n: int, chunk_size: int = CHUNK_SIZE):
    """``(index, start, stop)`` for each fixed-size chunk of ``range(n)``."""
    return [
        (k, start, min(n, start + chunk_size))
        for k, start in enumerate(range(0, n, chunk_size))
    ]


@dataclass(frozen=True)
class SphereSpace:
    """Unit sphere in three-space with the uniform (normalized) measure."""

    name: str = "sphere"
    atol: float = 1e-9

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        # uniform cos(theta) and phi give the uniform measure on the sphere
        u = rng.random((n, 2))
        cz = 2.0 * u[:, 0] - 1.0
        phi = 2.0 * np.pi * u[:, 1]
        s = np.sqrt(np.clip(1.0 - cz * cz, 0.0, None))
        return np.column_stack([s * np.cos(phi), s * np.sin(phi), cz])

    def quadrature(self, nodes: int):
        """Gauss-Legendre in ``cos(theta)`` times periodic trapezoid in ``phi``."""
        if nodes < 8:
            raise ValueError(f"sphere quadrature needs >= 8 nodes per dimension, got {nodes}")
        x, w = np.polynomial.legendre.leggauss(nodes)
        # half-step offset keeps nodes off the xz-plane, where coordinate-aligned
        # settings put the discontinuities of sign-type outcomes
        phi = 2.0 * np.pi * (np.arange(nodes) + 0.5) / nodes
        s = np.sqrt(1.0 - x * x)
        pts = np.empty((nodes, nodes, 3))
        pts[..., 0] = np.outer(s, np.cos(phi))
        pts[..., 1] = np.outer(s, np.sin(phi))
        pts[..., 2] = x[:, None]
        weights = np.outer(w / 2.0, np.full(nodes, 1.0 / nodes))
        return pts.reshape(-1, 3), weights.reshape(-1)

    def validate(self, points: np.ndarray) -> None:
        norms = np.linalg.norm(points, axis=-1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > self.atol)
        if bad.size:
            raise ValueError(f"hidden variable {points[bad[0]]} is not a unit vector")


@dataclass(frozen=True)
class DiscreteSpace:
    """Finite set of hidden-variable values labelled ``0..k-1``.

    ``weights`` are the raw printed coefficients and need not sum to one;
    sampling and quadrature use the normalized probabilities.
    """

    weights: tuple[float, ...]
    name: str = "discrete"
    probabilities: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0 or np.any(w < 0) or w.sum() <= 0:
            raise ValueError(f"invalid discrete weights {self.weights!r}")
        p = w / w.sum()
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def total_weight(self) -> float:
        return float(sum(self.weights))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        idx = rng.choice(self.size, size=n, p=self.probabilities)
        return idx.reshape(n, 1)

    def quadrature(self, nodes: int = 0):
        # enumeration is exact; the node count is irrelevant
        return np.arange(self.size).reshape(-1, 1), self.probabilities.copy()

    def validate(self, points: np.ndarray) -> None:
        idx = np.asarray(points).reshape(-1)
        if np.any((idx < 0) | (idx >= self.size)):
            raise ValueError(f"hidden variable index outside 0..{self.size - 1}")
