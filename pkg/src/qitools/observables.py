"""POVMs: validation, sharpness, informational completeness, coarse-graining,
statistics, and photon counting at a Fock cutoff."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .linalg import ATOL, asarray, dag, eigh, is_effect, is_hermitian, is_projection, psd_sqrt
from .states import _as_matrix


@dataclass(frozen=True)
class Effect:
    """Operator E with O <= E <= I."""

    matrix: np.ndarray

    def __post_init__(self):
        m = asarray(self.matrix)
        if not is_effect(m):
            evals = np.linalg.eigvalsh((m + dag(m)) / 2) if is_hermitian(m) else None
            detail = f" (spectrum {evals})" if evals is not None else " (not Hermitian)"
            raise ValueError("matrix is not an effect: O <= E <= I fails" + detail)
        m = (m + dag(m)) / 2
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Povm:
    """Finite labeled family of effects summing to the identity."""

    outcomes: tuple
    effects: tuple = field(repr=False)

    def __post_init__(self):
        effs = tuple(e if isinstance(e, Effect) else Effect(asarray(e)) for e in self.effects)
        outs = tuple(self.outcomes)
        if len(outs) != len(effs):
            raise ValueError("outcomes and effects must have the same length")
        if len(set(outs)) != len(outs):
            raise ValueError("outcome labels must be distinct")
        total = sum(e.matrix for e in effs)
        d = effs[0].dim
        if np.max(np.abs(total - np.eye(d))) > ATOL * d:
            raise ValueError(
                f"effects do not sum to the identity (max deviation "
                f"{np.max(np.abs(total - np.eye(d))):.3e})"
            )
        object.__setattr__(self, "outcomes", outs)
        object.__setattr__(self, "effects", effs)

    @property
    def dim(self) -> int:
        return self.effects[0].dim

    def effect(self, outcome) -> np.ndarray:
        return self.effects[self.outcomes.index(outcome)].matrix

    def subset_effect(self, outcomes) -> np.ndarray:
        """Effect of a subset of outcomes (discrete sigma-algebra)."""
        m = np.zeros((self.dim, self.dim), dtype=complex)
        for x in outcomes:
            m = m + self.effect(x)
        return m

    @classmethod
    def from_basis(cls, kets, outcomes=None) -> "Povm":
        """Sharp observable associated to an orthonormal basis."""
        kets = [asarray(v).reshape(-1, 1) for v in kets]
        effs = [v @ dag(v) for v in kets]
        outs = tuple(range(len(kets))) if outcomes is None else tuple(outcomes)
        return cls(outs, tuple(effs))

    @classmethod
    def trivial(cls, d: int, probabilities=(1.0,), outcomes=None) -> "Povm":
        """Trivial observable: every effect a multiple of the identity."""
        outs = tuple(range(len(probabilities))) if outcomes is None else tuple(outcomes)
        effs = tuple(p * np.eye(d, dtype=complex) for p in probabilities)
        return cls(outs, effs)


def outcome_distribution(a: Povm, rho) -> np.ndarray:
    """Probabilities tr[rho A(x)], clamped to [0, 1]."""
    m = _as_matrix(rho)
    if m.shape[0] != a.dim:
        raise ValueError("state and POVM dimensions do not match")
    p = np.array([np.trace(m @ e.matrix).real for e in a.effects])
    if p.min() < -ATOL * a.dim or abs(p.sum() - 1) > ATOL * a.dim:
        raise ValueError("outcome probabilities are inconsistent")
    return np.clip(p, 0.0, 1.0)


def is_sharp(a: Povm, tol: float = ATOL) -> bool:
    """True iff every effect is a projection; orthogonality is then verified."""
    if not all(is_projection(e.matrix, tol) for e in a.effects):
        return False
    for i, e in enumerate(a.effects):
        for f in a.effects[i + 1:]:
            if np.max(np.abs(e.matrix @ f.matrix)) > 1e-7:
                raise AssertionError("projective effects found non-orthogonal")
    return True


def _hermitian_to_real_vector(m: np.ndarray) -> np.ndarray:
    d = m.shape[0]
    parts = [np.diag(m).real]
    iu = np.triu_indices(d, k=1)
    parts.append(np.sqrt(2) * m[iu].real)
    parts.append(np.sqrt(2) * m[iu].imag)
    return np.concatenate(parts)


def is_informationally_complete(a: Povm, tol: float = ATOL) -> bool:
    """True iff the effects span the full d^2-dimensional Hermitian space."""
    rows = np.stack([_hermitian_to_real_vector(e.matrix) for e in a.effects])
    s = np.linalg.svd(rows, compute_uv=False)
    rank = int((s > tol * s[0]).sum()) if s.size and s[0] > 0 else 0
    return rank == a.dim**2


def minimal_ic_povm(d: int) -> Povm:
    """Minimal informationally complete POVM with d^2 rank-one effects.

    Built from projections onto basis kets, real superpositions (j > k)
    and imaginary superpositions (j < k), renormalized by the inverse
    square root of their sum.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    eye = np.eye(d, dtype=complex)
    projections = {}
    for j in range(d):
        for k in range(d):
            if j == k:
                v = eye[:, [j]]
            elif j > k:
                v = (eye[:, [j]] + eye[:, [k]]) / np.sqrt(2)
            else:
                v = (eye[:, [j]] + 1j * eye[:, [k]]) / np.sqrt(2)
            projections[(j, k)] = v @ dag(v)
    t = sum(projections.values())
    vals, vecs = eigh(t)
    inv_root = (vecs / np.sqrt(vals)) @ dag(vecs)
    outcomes = tuple(sorted(projections))
    effects = tuple(inv_root @ projections[o] @ inv_root for o in outcomes)
    return Povm(outcomes, effects)


def coarse_grain(a: Povm, nu: np.ndarray, outcomes=None) -> Povm:
    """Post-process with a stochastic matrix: B(b_j) = sum_i nu[i, j] A(a_i)."""
    nu = np.asarray(nu, dtype=float)
    if nu.ndim != 2 or nu.shape[0] != len(a.outcomes):
        raise ValueError("stochastic matrix rows must match the POVM outcomes")
    if nu.min() < -ATOL or np.max(np.abs(nu.sum(axis=1) - 1)) > ATOL:
        raise ValueError("matrix is not stochastic (rows must be probability vectors)")
    m = nu.shape[1]
    outs = tuple(range(m)) if outcomes is None else tuple(outcomes)
    effs = []
    for j in range(m):
        e = sum(nu[i, j] * a.effects[i].matrix for i in range(nu.shape[0]))
        effs.append(e)
    return Povm(outs, tuple(effs))


def photon_counting(eps: float, cutoff: int) -> Povm:
    """Photon counting with detector efficiency eps on span{|0>..|K>}.

    Effects are diagonal with <k|N(n)|k> = C(k, n) eps^n (1-eps)^(k-n);
    on the truncated space they sum to the identity exactly.
    """
    if not 0 <= eps <= 1:
        raise ValueError("efficiency must lie in [0, 1]")
    dim = cutoff + 1
    effs = []
    for n in range(dim):
        diag = np.zeros(dim)
        for k in range(n, dim):
            diag[k] = comb(k, n) * eps**n * (1 - eps) ** (k - n)
        effs.append(np.diag(diag).astype(complex))
    return Povm(tuple(range(dim)), tuple(effs))


def efficiency_coarse_matrix(eps1: float, eps2: float, cutoff: int) -> np.ndarray:
    """Stochastic matrix turning the eps2 counter into the eps1 counter.

    mu[k, n] = C(k, n) eps1^n eps2^(-k) (eps2 - eps1)^(k - n); requires
    eps1 <= eps2 (otherwise the coarse-graining is impossible).
    """
    if not 0 < eps1 <= eps2 <= 1:
        raise ValueError("coarse-graining impossible: need 0 < eps1 <= eps2 <= 1")
    dim = cutoff + 1
    mu = np.zeros((dim, dim))
    for k in range(dim):
        for n in range(k + 1):
            mu[k, n] = comb(k, n) * eps1**n * (eps2 - eps1) ** (k - n) / eps2**k
    return mu


def mean_variance(a: Povm, rho) -> tuple[float, float]:
    """Mean and variance of a real-outcome observable in a state."""
    try:
        xs = np.array([float(x) for x in a.outcomes])
    except (TypeError, ValueError) as err:
        raise ValueError("outcome labels must parse as real numbers") from err
    p = outcome_distribution(a, rho)
    mean = float((xs * p).sum())
    var = float(((xs - mean) ** 2 * p).sum())
    return mean, var


def sharp_operator(a: Povm) -> np.ndarray:
    """Selfadjoint operator sum_j x_j A(x_j) of a real observable."""
    xs = [float(x) for x in a.outcomes]
    return sum(x * e.matrix for x, e in zip(xs, a.effects))


def commuting_joint(a, b) -> Povm:
    """Four-outcome joint observable of two commuting effects.

    Effects are {AB, (I-A)B, A(I-B), (I-A)(I-B)} with outcomes 1..4;
    the margins {1, 3} and {1, 2} recover A and B.
    """
    am = a.matrix if isinstance(a, Effect) else asarray(a)
    bm = b.matrix if isinstance(b, Effect) else asarray(b)
    if np.max(np.abs(am @ bm - bm @ am)) > ATOL * max(1.0, np.linalg.norm(am @ bm, 2)):
        raise ValueError("effects do not commute; no joint observable is constructed")
    eye = np.eye(am.shape[0], dtype=complex)
    prods = [am @ bm, (eye - am) @ bm, am @ (eye - bm), (eye - am) @ (eye - bm)]
    effs = tuple((p + dag(p)) / 2 for p in prods)
    return Povm((1, 2, 3, 4), effs)


def luders_effect_root(e: np.ndarray) -> np.ndarray:
    return psd_sqrt(asarray(e))


def has_unit_eigenvalue(e: np.ndarray, tol: float = 1e-7) -> bool:
    """True when the largest eigenvalue of an effect is 1 within tol."""
    return bool(abs(np.linalg.eigvalsh(asarray(e)).max() - 1) < tol)


def stern_gerlach(direction) -> Povm:
    """Ideal two-outcome qubit observable along a unit Bloch direction."""
    from .states import PAULIS

    n = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(n) - 1) > 1e-9:
        raise ValueError("direction must be a unit vector")
    sig = n[0] * PAULIS[1] + n[1] * PAULIS[2] + n[2] * PAULIS[3]
    up = (np.eye(2, dtype=complex) + sig) / 2
    down = (np.eye(2, dtype=complex) - sig) / 2
    return Povm((1, -1), (up, down))
