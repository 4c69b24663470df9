"""Seeded random objects: kets, unitaries, states, effects, channels."""

from __future__ import annotations

import numpy as np

from .linalg import dag


def rng_from(seed) -> np.random.Generator:
    """Pass generators through, build one from anything else."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_ket(d: int, rng) -> np.ndarray:
    rng = rng_from(rng)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return (v / np.linalg.norm(v)).reshape(d, 1)


def haar_unitary(d: int, rng) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix."""
    rng = rng_from(rng)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phase = np.diag(r) / np.abs(np.diag(r))
    return q * phase.conj()


def random_density(d: int, rng, rank: int | None = None) -> np.ndarray:
    """Random mixed state; full rank unless a smaller rank is requested."""
    rng = rng_from(rng)
    r = d if rank is None else rank
    g = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    m = g @ dag(g)
    return m / np.trace(m).real


def random_hermitian(d: int, rng) -> np.ndarray:
    rng = rng_from(rng)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + dag(g)) / 2


def random_effect(d: int, rng) -> np.ndarray:
    """Random operator with spectrum inside [0, 1]."""
    rng = rng_from(rng)
    u = haar_unitary(d, rng)
    vals = rng.uniform(0.0, 1.0, size=d)
    return u @ np.diag(vals).astype(complex) @ dag(u)


def random_kraus_ops(d: int, rng, count: int | None = None) -> list[np.ndarray]:
    """Kraus operators of a random CPTP channel (Stinespring slicing)."""
    rng = rng_from(rng)
    n = count if count is not None else d
    big = haar_unitary(d * n, rng)
    # Isometry columns: input ket |b> goes to U |b, 0>; slice out the
    # environment index to read off the Kraus operators.
    v = big[:, [b * n for b in range(d)]]
    return [v.reshape(d, n, d)[:, k, :] for k in range(n)]
