"""State distances and optimal two-state discrimination schemes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import ATOL, asarray, dag, eigh, inner, matrix_rank, outer, psd_sqrt, trace_norm
from .observables import Povm
from .states import _as_matrix


@dataclass(frozen=True)
class DiscriminationResult:
    """Measurement plus bookkeeping for a two-state discrimination scheme.

    ``conclusions`` maps each POVM outcome to "1", "2" or "?".
    """

    povm: Povm
    p_success: float
    p_error: float
    conclusions: dict


def prob_distances(p, q) -> tuple[float, float, float]:
    """(max difference, Kolmogorov distance, Bhattacharyya coefficient)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("probability vectors must have the same length")
    for v in (p, q):
        if abs(v.sum() - 1) > 1e-7 or v.min() < -1e-12:
            raise ValueError("inputs must be probability vectors")
    diff = np.abs(p - q)
    return float(diff.max()), float(diff.sum() / 2), float(np.sqrt(p * q).sum())


def trace_distance(rho1, rho2) -> float:
    """(1/2) tr|rho1 - rho2|."""
    m1, m2 = _as_matrix(rho1), _as_matrix(rho2)
    if m1.shape != m2.shape:
        raise ValueError("states must share a dimension")
    evals = np.linalg.eigvalsh(m1 - m2)
    return float(np.abs(evals).sum() / 2)


def fidelity(rho1, rho2) -> float:
    """tr sqrt(sqrt(rho1) rho2 sqrt(rho1)) = tr|sqrt(rho1) sqrt(rho2)|, in [0, 1].

    Computed as the trace norm of the product of square roots, which is
    numerically stable for rank-deficient states.
    """
    m1, m2 = _as_matrix(rho1), _as_matrix(rho2)
    if m1.shape != m2.shape:
        raise ValueError("states must share a dimension")
    return trace_norm(psd_sqrt(m1) @ psd_sqrt(m2))


def helstrom(rho1, rho2, eta: float = 0.5) -> DiscriminationResult:
    """Minimum-error discrimination of two states with prior (eta, 1-eta).

    The "1" effect projects onto the positive part of eta*rho1 -
    (1-eta)*rho2; zero eigenvalues are split half-half between the two
    conclusions.
    """
    if not 0 < eta < 1:
        raise ValueError("prior must satisfy 0 < eta < 1")
    m1, m2 = _as_matrix(rho1), _as_matrix(rho2)
    gap = eta * m1 - (1 - eta) * m2
    vals, vecs = eigh(gap)
    d = m1.shape[0]
    scale = max(1.0, float(np.abs(vals).max()))
    c1 = np.zeros((d, d), dtype=complex)
    for j, v in enumerate(vals):
        p = outer(vecs[:, j].reshape(-1, 1))
        if v > ATOL * scale:
            c1 += p
        elif abs(v) <= ATOL * scale:
            c1 += p / 2
    c2 = np.eye(d) - c1
    p_err = float(eta * np.trace(m1 @ c2).real + (1 - eta) * np.trace(m2 @ c1).real)
    povm = Povm(("1", "2"), (c1, c2))
    return DiscriminationResult(povm, 1 - p_err, p_err, {"1": "1", "2": "2"})


def _span_projector(kets) -> np.ndarray:
    stack = np.hstack(kets)
    q, _ = np.linalg.qr(stack)
    keep = matrix_rank(stack)
    q = q[:, :keep]
    return q @ dag(q)


def unambiguous_two_pure(psi1, psi2, eta: float = 0.5) -> DiscriminationResult:
    """Optimal unambiguous discrimination of two pure states.

    Conclusive effects are c (Q - P_other) with c = 1 / (1 + |overlap|)
    and Q the projector onto span{psi1, psi2}; conclusions are
    error-free and, for eta = 1/2, the success probability is
    1 - |<psi1|psi2>|.
    """
    v1 = asarray(psi1).reshape(-1, 1)
    v2 = asarray(psi2).reshape(-1, 1)
    v1 = v1 / np.linalg.norm(v1)
    v2 = v2 / np.linalg.norm(v2)
    overlap = abs(inner(v1, v2))
    if overlap > 1 - 1e-12:
        raise ValueError("states identical - nothing to discriminate")
    q_perp = _span_projector([v1, v2])
    c = 1 / (1 + overlap)
    d1 = c * (q_perp - outer(v2))
    d2 = c * (q_perp - outer(v1))
    dq = np.eye(v1.shape[0]) - d1 - d2
    povm = Povm(("1", "2", "?"), (d1, d2, dq))
    rho1, rho2 = outer(v1), outer(v2)
    p_succ = float(eta * np.trace(rho1 @ d1).real + (1 - eta) * np.trace(rho2 @ d2).real)
    p_inc = float(eta * np.trace(rho1 @ dq).real + (1 - eta) * np.trace(rho2 @ dq).real)
    return DiscriminationResult(povm, p_succ, p_inc, {"1": "1", "2": "2", "?": "?"})


def unambiguous_mixture_povm(psi1, psi2, q: float, eta: float = 0.5) -> DiscriminationResult:
    """Suboptimal unambiguous scheme mixing the two single-state identifiers.

    C(1) = q (I - rho2), C(2) = (1-q)(I - rho1), C(?) = q rho2 +
    (1-q) rho1.  For q = eta = 1/2 the success probability equals
    (1 - tr[rho1 rho2]) / 2.
    """
    if not 0 < q < 1:
        raise ValueError("mixing weight must satisfy 0 < q < 1")
    v1 = asarray(psi1).reshape(-1, 1)
    v2 = asarray(psi2).reshape(-1, 1)
    v1 = v1 / np.linalg.norm(v1)
    v2 = v2 / np.linalg.norm(v2)
    rho1, rho2 = outer(v1), outer(v2)
    eye = np.eye(v1.shape[0])
    c1 = q * (eye - rho2)
    c2 = (1 - q) * (eye - rho1)
    cq = q * rho2 + (1 - q) * rho1
    povm = Povm(("1", "2", "?"), (c1, c2, cq))
    p_succ = float(eta * np.trace(rho1 @ c1).real + (1 - eta) * np.trace(rho2 @ c2).real)
    p_inc = float(eta * np.trace(rho1 @ cq).real + (1 - eta) * np.trace(rho2 @ cq).real)
    return DiscriminationResult(povm, p_succ, p_inc, {"1": "1", "2": "2", "?": "?"})


def idp_bound(rho1, rho2, eta: float = 0.5) -> float:
    """Upper bound on unambiguous success: 1 - 2 sqrt(eta(1-eta)) tr|sqrt(rho1) sqrt(rho2)|.

    The cross term is the trace norm of the product of square roots (the
    fidelity); for a pure pair at even prior this is 1 - |<psi1|psi2>|.
    """
    if not 0 < eta < 1:
        raise ValueError("prior must satisfy 0 < eta < 1")
    cross = trace_norm(psd_sqrt(_as_matrix(rho1)) @ psd_sqrt(_as_matrix(rho2)))
    return float(1 - 2 * np.sqrt(eta * (1 - eta)) * cross)


def unambiguous_feasible(rho1, rho2, tol: float = ATOL) -> tuple[bool, bool]:
    """Which of the two states can be unambiguously identified.

    State 1 is identifiable iff its support is not contained in the
    support of state 2 (and symmetrically).
    """
    m1, m2 = _as_matrix(rho1), _as_matrix(rho2)

    def support_cols(m):
        vals, vecs = eigh(m)
        keep = vals > tol * max(1.0, float(vals.max()))
        return vecs[:, keep]

    s1, s2 = support_cols(m1), support_cols(m2)

    def contained(inner_cols, outer_cols):
        joint = np.hstack([outer_cols, inner_cols])
        return matrix_rank(joint, tol) == matrix_rank(outer_cols, tol)

    return (not contained(s1, s2), not contained(s2, s1))
