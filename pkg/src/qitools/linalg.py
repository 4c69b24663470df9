"""Dense complex linear algebra used throughout the toolkit.

Matrices are plain complex ``numpy`` arrays; kets are ``(d, 1)`` column
vectors and inner products are conjugate-linear in the first argument.
"""

from __future__ import annotations

import numpy as np

# Global absolute tolerance.  Hermitian/PSD predicates scale it by the
# operator norm of the argument so that large matrices are not judged
# more strictly than small ones.
ATOL = 1e-9


class NumericError(RuntimeError):
    """An iterative or numerical procedure failed to deliver a result."""


def _scale(a: np.ndarray) -> float:
    norm = np.linalg.norm(a, 2) if a.size else 0.0
    return max(1.0, float(norm))


def asarray(a) -> np.ndarray:
    return np.asarray(a, dtype=complex)


def dag(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def ket(entries) -> np.ndarray:
    """Column vector from a 1-d sequence of amplitudes (not normalized)."""
    v = asarray(entries).reshape(-1, 1)
    return v


def unit_ket(entries) -> np.ndarray:
    """Normalized column vector."""
    v = ket(entries)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def inner(phi: np.ndarray, psi: np.ndarray) -> complex:
    """<phi|psi>, conjugate-linear in the first argument."""
    return complex((dag(phi) @ psi)[0, 0])


def outer(phi: np.ndarray, psi: np.ndarray | None = None) -> np.ndarray:
    """|phi><psi| (|phi><phi| if psi is omitted)."""
    if psi is None:
        psi = phi
    return np.asarray(phi) @ dag(psi)


def projector(phi: np.ndarray) -> np.ndarray:
    """Projector onto the ray of a (normalized first) vector."""
    v = np.asarray(phi, dtype=complex).reshape(-1, 1)
    v = v / np.linalg.norm(v)
    return v @ dag(v)


def basis_ket(d: int, j: int) -> np.ndarray:
    v = np.zeros((d, 1), dtype=complex)
    v[j, 0] = 1.0
    return v


def is_hermitian(a: np.ndarray, tol: float = ATOL) -> bool:
    a = asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - dag(a))) <= tol * _scale(a))


def is_psd(a: np.ndarray, tol: float = ATOL) -> bool:
    a = asarray(a)
    if not is_hermitian(a, tol):
        return False
    evals = np.linalg.eigvalsh((a + dag(a)) / 2)
    return bool(evals.min() >= -tol * _scale(a))


def is_unitary(a: np.ndarray, tol: float = ATOL) -> bool:
    a = asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(dag(a) @ a - np.eye(a.shape[0]))) <= tol * _scale(a))


def is_projection(a: np.ndarray, tol: float = ATOL) -> bool:
    a = asarray(a)
    return is_hermitian(a, tol) and bool(np.max(np.abs(a @ a - a)) <= tol * _scale(a))


def is_effect(a: np.ndarray, tol: float = ATOL) -> bool:
    """O <= a <= I within tol."""
    a = asarray(a)
    if not is_hermitian(a, tol):
        return False
    evals = np.linalg.eigvalsh((a + dag(a)) / 2)
    s = _scale(a)
    return bool(evals.min() >= -tol * s and evals.max() <= 1 + tol * s)


def tensor(*ops) -> np.ndarray:
    """Kronecker product; the first factor indexes the coarse blocks."""
    out = asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, asarray(op))
    return out


def partial_trace(t: np.ndarray, dA: int, dB: int, side: str = "A") -> np.ndarray:
    """Trace out one tensor factor of an operator on a dA*dB space.

    ``side="A"`` returns the dB x dB operator tr_A[t]; ``side="B"`` the
    dA x dA operator tr_B[t].
    """
    t = asarray(t)
    if t.shape != (dA * dB, dA * dB):
        raise ValueError(f"expected a {dA * dB} x {dA * dB} matrix, got {t.shape}")
    r = t.reshape(dA, dB, dA, dB)
    if side == "A":
        return np.einsum("ijik->jk", r)
    if side == "B":
        return np.einsum("ijkj->ik", r)
    raise ValueError("side must be 'A' or 'B'")


def eigh(t: np.ndarray, tol: float = ATOL):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(values, vectors)`` with orthonormal eigenvector columns.
    Degenerate eigenspaces come with an arbitrary orthonormal basis.
    """
    t = asarray(t)
    if not is_hermitian(t, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh((t + dag(t)) / 2)
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


def psd_sqrt(t: np.ndarray, tol: float = ATOL) -> np.ndarray:
    """Unique PSD square root; eigenvalues in [-tol*||t||, 0) are clamped."""
    vals, vecs = eigh(t, tol)
    floor = -tol * _scale(t)
    if vals.min() < floor:
        raise ValueError(f"matrix is not PSD: eigenvalue {vals.min():.3e} below {floor:.3e}")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ dag(vecs)


def polar(t: np.ndarray):
    """Polar decomposition t = v @ abs_t with abs_t = sqrt(t^dag t).

    ``v`` is unitary (hence a partial isometry); built from the SVD.
    """
    t = asarray(t)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise ValueError("polar decomposition requires a square matrix")
    u, s, wh = np.linalg.svd(t)
    abs_t = dag(wh) @ np.diag(s).astype(complex) @ wh
    v = u @ wh
    return v, abs_t


def operator_norm(t: np.ndarray) -> float:
    return float(np.linalg.norm(asarray(t), 2))


def trace_norm(t: np.ndarray) -> float:
    return float(np.linalg.svd(asarray(t), compute_uv=False).sum())


def hs_norm(t: np.ndarray) -> float:
    return float(np.linalg.norm(asarray(t)))


def norms(t: np.ndarray):
    """(operator norm, trace norm, Hilbert-Schmidt norm) of a square matrix."""
    t = asarray(t)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise ValueError("norms are defined here for square matrices")
    s = np.linalg.svd(t, compute_uv=False)
    return float(s.max(initial=0.0)), float(s.sum()), float(np.sqrt((s**2).sum()))


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product tr[a^dag b]."""
    return complex(np.trace(dag(a) @ b))


def support_projector(t: np.ndarray, tol: float = ATOL) -> np.ndarray:
    """Projector onto the support (range) of a Hermitian matrix."""
    vals, vecs = eigh(t, tol)
    keep = np.abs(vals) > tol * _scale(t)
    v = vecs[:, keep]
    return v @ dag(v)


def matrix_rank(a: np.ndarray, tol: float = ATOL) -> int:
    """Rank with singular values below tol * s_max counted as zero."""
    s = np.linalg.svd(asarray(a), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int((s > tol * s[0]).sum())


def gram_schmidt_complete(cols: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Complete orthonormal columns to a full unitary, deterministically.

    Candidate vectors are the canonical basis kets, taken in order and
    orthogonalized against everything accepted so far.
    """
    cols = asarray(cols)
    dim = cols.shape[0]
    basis = [cols[:, j] for j in range(cols.shape[1])]
    for j in range(dim):
        v = np.zeros(dim, dtype=complex)
        v[j] = 1.0
        for b in basis:
            v = v - b * (b.conj() @ v)
        n = np.linalg.norm(v)
        if n > tol:
            basis.append(v / n)
        if len(basis) == dim:
            break
    if len(basis) != dim:
        raise NumericError("failed to complete an orthonormal basis")
    return np.stack(basis, axis=1)
