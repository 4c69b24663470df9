"""Quantum operations and channels.

Four interchangeable representations (Kraus, Choi, chi-matrix, affine),
CPTP certification, Stinespring dilations, conjugate and dual maps,
channel distances, fixed points, the qubit normal form and a family of
named constructors.

Choi convention: Omega = (E (x) I)[P+] with the map acting on the FIRST
tensor factor; the chi-normalized matrix is Phi = d * Omega.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    ATOL,
    NumericError,
    asarray,
    dag,
    eigh,
    gram_schmidt_complete,
    is_unitary,
    partial_trace,
    tensor,
    trace_norm,
)
from .rand import random_ket, rng_from
from .states import PAULIS, State, _as_matrix, traceless_hermitian_basis


# ---------------------------------------------------------------------------
# Representations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KrausChannel:
    """Completely positive map written as T -> sum_k A_k T A_k^dag."""

    kraus_ops: tuple
    in_dim: int = field(init=False)
    out_dim: int = field(init=False)

    def __post_init__(self):
        ops = tuple(asarray(a) for a in self.kraus_ops)
        if not ops:
            raise ValueError("at least one Kraus operator is required")
        shape = ops[0].shape
        if any(a.shape != shape for a in ops):
            raise ValueError("Kraus operators must share a shape")
        for a in ops:
            a.flags.writeable = False
        object.__setattr__(self, "kraus_ops", ops)
        object.__setattr__(self, "out_dim", shape[0])
        object.__setattr__(self, "in_dim", shape[1])

    def normalization(self) -> np.ndarray:
        return sum(dag(a) @ a for a in self.kraus_ops)

    def is_trace_preserving(self, tol: float = ATOL) -> bool:
        n = self.normalization()
        return bool(np.max(np.abs(n - np.eye(self.in_dim))) <= tol * self.in_dim)

    def is_trace_decreasing(self, tol: float = ATOL) -> bool:
        evals = np.linalg.eigvalsh(self.normalization())
        return bool(evals.max() <= 1 + tol * self.in_dim)

    def is_unital(self, tol: float = ATOL) -> bool:
        m = sum(a @ dag(a) for a in self.kraus_ops)
        return bool(np.max(np.abs(m - np.eye(self.out_dim))) <= tol * self.out_dim)


@dataclass(frozen=True)
class ChoiMatrix:
    """Omega = (E (x) I)[P+]; PSD iff the map is completely positive."""

    matrix: np.ndarray
    in_dim: int
    out_dim: int

    def __post_init__(self):
        m = asarray(self.matrix)
        if m.shape != (self.out_dim * self.in_dim,) * 2:
            raise ValueError("Choi matrix shape does not match the declared dimensions")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def min_eigenvalue(self) -> float:
        h = (self.matrix + dag(self.matrix)) / 2
        return float(np.linalg.eigvalsh(h).min())

    def is_cp(self, tol: float = ATOL) -> bool:
        return self.min_eigenvalue() >= -tol * max(1.0, np.linalg.norm(self.matrix, 2))


@dataclass(frozen=True)
class ChiMatrix:
    """Channel coefficients in an orthonormal operator basis; PSD, trace d."""

    matrix: np.ndarray
    basis: tuple


@dataclass(frozen=True)
class AffineRep:
    """Bloch-space action r -> T r + t of a trace-preserving map."""

    T: np.ndarray
    t: np.ndarray
    dim: int


@dataclass(frozen=True)
class LinearMap:
    """General linear map on operators via its superoperator matrix.

    ``superop`` acts on row-major vectorized operators; this carrier also
    holds maps that are not completely positive (e.g. transposition).
    """

    superop: np.ndarray
    in_dim: int
    out_dim: int


# ---------------------------------------------------------------------------
# Action and conversions
# ---------------------------------------------------------------------------

def apply(ch, t) -> np.ndarray:
    """Apply a map in any representation to an operator."""
    t = _as_matrix(t)
    if isinstance(ch, KrausChannel):
        if t.shape != (ch.in_dim, ch.in_dim):
            raise ValueError("operator dimension does not match the channel input")
        return sum(a @ t @ dag(a) for a in ch.kraus_ops)
    if isinstance(ch, LinearMap):
        if t.shape != (ch.in_dim, ch.in_dim):
            raise ValueError("operator dimension does not match the map input")
        v = ch.superop @ t.reshape(-1)
        return v.reshape(ch.out_dim, ch.out_dim)
    if isinstance(ch, ChoiMatrix):
        if t.shape != (ch.in_dim, ch.in_dim):
            raise ValueError("operator dimension does not match the Choi input")
        big = tensor(np.eye(ch.out_dim), t.T) @ ch.matrix
        return ch.in_dim * partial_trace(big, ch.out_dim, ch.in_dim, side="B")
    raise TypeError(f"cannot apply object of type {type(ch).__name__}")


def kraus_to_linear_map(ch: KrausChannel) -> LinearMap:
    s = sum(tensor(a, a.conj()) for a in ch.kraus_ops)
    return LinearMap(s, ch.in_dim, ch.out_dim)


def compose(outer_map, inner_map) -> LinearMap | KrausChannel:
    """Map applying ``inner_map`` first, then ``outer_map``."""
    if isinstance(outer_map, KrausChannel) and isinstance(inner_map, KrausChannel):
        ops = tuple(a @ b for a in outer_map.kraus_ops for b in inner_map.kraus_ops)
        return KrausChannel(ops)
    s2 = outer_map.superop if isinstance(outer_map, LinearMap) else kraus_to_linear_map(outer_map).superop
    s1 = inner_map.superop if isinstance(inner_map, LinearMap) else kraus_to_linear_map(inner_map).superop
    out_dim = outer_map.out_dim
    in_dim = inner_map.in_dim
    return LinearMap(s2 @ s1, in_dim, out_dim)


def tensor_channels(ch1: KrausChannel, ch2: KrausChannel) -> KrausChannel:
    ops = tuple(tensor(a, b) for a in ch1.kraus_ops for b in ch2.kraus_ops)
    return KrausChannel(ops)


def to_choi(ch) -> ChoiMatrix:
    """Choi matrix Omega = (E (x) I)[P+] of a map in any representation."""
    if isinstance(ch, ChoiMatrix):
        return ch
    d_in = ch.in_dim
    d_out = ch.out_dim
    omega = np.zeros((d_out * d_in,) * 2, dtype=complex)
    for j in range(d_in):
        for k in range(d_in):
            ejk = np.zeros((d_in, d_in), dtype=complex)
            ejk[j, k] = 1.0
            omega += tensor(apply(ch, ejk), ejk)
    return ChoiMatrix(omega / d_in, d_in, d_out)


def from_choi(choi: ChoiMatrix, tol: float = ATOL) -> KrausChannel:
    """Kraus operators from a PSD Choi matrix (count = numerical Choi rank)."""
    phi = choi.in_dim * choi.matrix
    vals, vecs = eigh(phi)
    scale = max(1.0, float(np.abs(vals).max()))
    if vals.min() < -tol * scale:
        raise ValueError(
            f"not completely positive: Choi eigenvalue {vals.min() / choi.in_dim:.3e}"
        )
    ops = []
    for j, v in enumerate(vals):
        if v > tol * scale:
            ops.append(np.sqrt(v) * vecs[:, j].reshape(choi.out_dim, choi.in_dim))
    if not ops:
        ops = [np.zeros((choi.out_dim, choi.in_dim), dtype=complex)]
    return KrausChannel(tuple(ops))


def certify(ch, tol: float = ATOL) -> dict:
    """Report {cp, tp, unital, trace_decreasing, choi_min_eig} for a map."""
    choi = to_choi(ch)
    d_in, d_out = choi.in_dim, choi.out_dim
    min_eig = choi.min_eigenvalue()
    cp = choi.is_cp(tol)
    tr_first = partial_trace(choi.matrix, d_out, d_in, side="A")
    tp = bool(np.max(np.abs(tr_first - np.eye(d_in) / d_in)) <= tol)
    td = bool(np.linalg.eigvalsh(d_in * tr_first).max() <= 1 + tol * d_in)
    tr_second = partial_trace(choi.matrix, d_out, d_in, side="B")
    unital = bool(np.max(np.abs(tr_second - np.eye(d_out) / d_in)) <= tol)
    return {
        "cp": cp,
        "tp": tp,
        "unital": unital,
        "trace_decreasing": td,
        "choi_min_eig": min_eig,
    }


def normalized_operator_basis(d: int) -> tuple[np.ndarray, ...]:
    """Hilbert-Schmidt orthonormal basis {I, E_1, ...} / sqrt(d)."""
    ops = [np.eye(d, dtype=complex) / np.sqrt(d)]
    ops.extend(e / np.sqrt(d) for e in traceless_hermitian_basis(d))
    return tuple(ops)


def to_chi(ch, basis=None) -> ChiMatrix:
    """chi-matrix of a channel over an orthonormal operator basis."""
    kraus = ch if isinstance(ch, KrausChannel) else from_choi(to_choi(ch))
    d = kraus.in_dim
    if kraus.out_dim != d:
        raise ValueError("chi representation requires equal input and output dimensions")
    basis = normalized_operator_basis(d) if basis is None else tuple(asarray(b) for b in basis)
    gram = np.array([[np.trace(dag(a) @ b) for b in basis] for a in basis])
    if np.max(np.abs(gram - np.eye(len(basis)))) > 1e-9:
        raise ValueError("operator basis is not Hilbert-Schmidt orthonormal")
    coeff = np.array([[np.trace(dag(b) @ a) for b in basis] for a in kraus.kraus_ops])
    chi = np.einsum("nr,ns->rs", coeff, coeff.conj())
    return ChiMatrix(chi, basis)


def chi_to_kraus(chi: ChiMatrix, tol: float = ATOL) -> KrausChannel:
    vals, vecs = eigh(chi.matrix)
    ops = []
    scale = max(1.0, float(np.abs(vals).max()))
    for j, v in enumerate(vals):
        if v > tol * scale:
            op = sum(vecs[r, j] * chi.basis[r] for r in range(len(chi.basis)))
            ops.append(np.sqrt(v) * op)
    return KrausChannel(tuple(ops))


def to_affine(ch) -> AffineRep:
    """Bloch-space affine form of a trace-preserving map."""
    report = certify(ch)
    if not report["tp"]:
        raise ValueError("affine representation requires a trace-preserving map")
    if ch.in_dim != ch.out_dim:
        raise ValueError("affine representation requires equal dimensions")
    d = ch.in_dim
    es = traceless_hermitian_basis(d)
    image_id = apply(ch, np.eye(d, dtype=complex))
    t = np.array([np.trace(e @ image_id).real / d for e in es])
    n = d * d - 1
    big_t = np.zeros((n, n))
    for k, ek in enumerate(es):
        image = apply(ch, ek)
        for j, ej in enumerate(es):
            big_t[j, k] = np.trace(ej @ image).real / d
    return AffineRep(big_t, t, d)


def affine_apply(aff: AffineRep, r: np.ndarray) -> np.ndarray:
    return aff.T @ np.asarray(r, dtype=float) + aff.t


def affine_to_choi(aff: AffineRep) -> ChoiMatrix:
    """Choi matrix of the map defined by a Bloch affine action."""
    d = aff.dim
    es = traceless_hermitian_basis(d)
    image_id = np.eye(d, dtype=complex) + sum(tj * ej for tj, ej in zip(aff.t, es))
    images = []
    for k in range(len(es)):
        images.append(sum(aff.T[j, k] * es[j] for j in range(len(es))))
    omega = np.zeros((d * d, d * d), dtype=complex)
    for j in range(d):
        for k in range(d):
            ejk = np.zeros((d, d), dtype=complex)
            ejk[j, k] = 1.0
            out = (1 if j == k else 0) / d * image_id
            for m, em in enumerate(es):
                out = out + (em[k, j] / d) * images[m]
            omega += tensor(out, ejk)
    return ChoiMatrix(omega / d, d, d)


def kraus_equivalent(k1: KrausChannel, k2: KrausChannel, tol: float = 1e-8,
                     return_witness: bool = False):
    """Whether two Kraus lists define the same map (Choi uniqueness).

    When they do and a witness is requested, the partial-isometry matrix
    u with A_j = sum_k u[j, k] B_k is recovered by least squares.
    """
    if (k1.in_dim, k1.out_dim) != (k2.in_dim, k2.out_dim):
        raise ValueError("channels must share dimensions")
    same = trace_norm(to_choi(k1).matrix - to_choi(k2).matrix) < tol
    if not return_witness:
        return same
    if not same:
        return False, None
    a = np.stack([op.reshape(-1) for op in k1.kraus_ops])
    b = np.stack([op.reshape(-1) for op in k2.kraus_ops])
    u = a @ np.linalg.pinv(b)
    return True, u


def stinespring(ch: KrausChannel, tol: float = ATOL):
    """(env_dim, U, env_ket) with tr_E[U (rho (x) |e0><e0|) U^dag] = E(rho).

    The isometry phi -> sum_k A_k phi (x) |k> is completed to a unitary
    by deterministic Gram-Schmidt over the canonical basis.
    """
    if not ch.is_trace_preserving(tol):
        raise ValueError("Stinespring dilation implemented for trace-preserving channels")
    ops = [a for a in ch.kraus_ops if np.max(np.abs(a)) > tol]
    if not ops:
        raise ValueError("channel has no nonzero Kraus operators")
    d = ch.in_dim
    n = len(ops)
    v = np.zeros((d * n, d), dtype=complex)
    for k, a in enumerate(ops):
        for out_idx in range(d):
            v[out_idx * n + k, :] = a[out_idx, :]
    # Columns of U at positions b*n (system b, environment 0) are V's columns.
    full = gram_schmidt_complete(v)
    u = np.zeros((d * n, d * n), dtype=complex)
    for b in range(d):
        u[:, b * n] = full[:, b]
    extra = iter(range(d, d * n))
    for col in range(d * n):
        if col % n != 0:
            u[:, col] = full[:, next(extra)]
    env_ket = np.zeros((n, 1), dtype=complex)
    env_ket[0, 0] = 1.0
    if not is_unitary(u, 1e-8):
        raise NumericError("failed to complete the dilation unitary")
    return n, u, env_ket


def dilation_apply(env_dim: int, u: np.ndarray, env_ket: np.ndarray, rho) -> np.ndarray:
    """Replay a Stinespring dilation on a state."""
    m = _as_matrix(rho)
    big = u @ tensor(m, env_ket @ dag(env_ket)) @ dag(u)
    return partial_trace(big, m.shape[0], env_dim, side="B")


def conjugate(ch: KrausChannel) -> KrausChannel:
    """Complementary (system-to-environment) channel of a TP channel.

    E'(T) = sum_jk tr[R_j T R_k^dag] |j><k| over the environment basis.
    """
    if not ch.is_trace_preserving():
        raise ValueError("conjugate channel implemented for trace-preserving channels")
    ops = [a for a in ch.kraus_ops if np.max(np.abs(a)) > ATOL]
    n = len(ops)
    d = ch.in_dim
    # Kraus operators of the conjugate: B_m maps |phi> to the environment
    # vector with components <m|R_j phi> ... i.e. B_m[j, :] = row m of R_j.
    bs = []
    for m in range(d):
        b = np.zeros((n, d), dtype=complex)
        for j, r in enumerate(ops):
            b[j, :] = r[m, :]
        bs.append(b)
    return KrausChannel(tuple(bs))


def random_unitary_conjugate(pairs) -> KrausChannel:
    """Conjugate of a random-unitary channel via its controlled-unitary dilation.

    With the environment prepared in the diagonal mixed state diag(p),
    the system-to-environment map is the contraction onto diag(p): the
    environment learns nothing about the input.
    """
    probs = [p for p, _ in pairs]
    if any(p < 0 for p in probs) or abs(sum(probs) - 1) > 1e-12:
        raise ValueError("weights must form a probability vector")
    d = asarray(pairs[0][1]).shape[0]
    n = len(pairs)
    ops = []
    for j, p in enumerate(probs):
        if p == 0:
            continue
        for k in range(d):
            op = np.zeros((n, d), dtype=complex)
            op[j, k] = np.sqrt(p)
            ops.append(op)
    return KrausChannel(tuple(ops))


def heisenberg_dual(ch: KrausChannel) -> KrausChannel:
    """Dual map E_*(T) = sum_k A_k^dag T A_k in the same Kraus carrier."""
    return KrausChannel(tuple(dag(a) for a in ch.kraus_ops))


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def matrix_units(d: int) -> list[np.ndarray]:
    out = []
    for j in range(d):
        for k in range(d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = 1.0
            out.append(m)
    return out


def transposition_map(d: int) -> LinearMap:
    """Transposition: positive but not completely positive."""
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            s[i * d + j, j * d + i] = 1.0
    return LinearMap(s.astype(complex), d, d)


def make(kind: str, **params):
    """Named channel constructors.

    kinds: ``depolarizing(d, p)``, ``pauli(q0, q1, q2, q3)``,
    ``random_unitary(pairs)``, ``contraction(xi)``, ``transposition(d)``
    (returned as a non-CP ``LinearMap``), ``phase_damping(eta, axis)``.
    """
    if kind == "depolarizing":
        d, p = params["d"], params["p"]
        if not 0 <= p <= 1:
            raise ValueError("depolarizing strength must lie in [0, 1]")
        ops = []
        if p < 1:
            ops.append(np.sqrt(1 - p) * np.eye(d, dtype=complex))
        if p > 0:
            ops.extend(np.sqrt(p / d) * m for m in matrix_units(d))
        return KrausChannel(tuple(ops))
    if kind == "pauli":
        q = np.asarray(params["q"], dtype=float)
        if q.shape != (4,) or q.min() < 0 or abs(q.sum() - 1) > 1e-12:
            raise ValueError("pauli channel needs a probability 4-vector")
        ops = tuple(np.sqrt(qj) * s for qj, s in zip(q, PAULIS) if qj > 0)
        return KrausChannel(ops)
    if kind == "random_unitary":
        pairs = params["pairs"]
        total = sum(p for p, _ in pairs)
        if any(p < 0 for p, _ in pairs) or abs(total - 1) > 1e-12:
            raise ValueError("weights must form a probability vector")
        return KrausChannel(tuple(np.sqrt(p) * asarray(u) for p, u in pairs if p > 0))
    if kind == "contraction":
        xi = _as_matrix(params["xi"])
        d = xi.shape[0]
        vals, vecs = eigh(xi)
        ops = []
        for j, lam in enumerate(vals):
            if lam <= ATOL:
                continue
            for k in range(d):
                op = np.zeros((d, d), dtype=complex)
                op[:, k] = np.sqrt(lam) * vecs[:, j]
                ops.append(op)
        return KrausChannel(tuple(ops))
    if kind == "transposition":
        return transposition_map(params["d"])
    if kind == "phase_damping":
        eta = params["eta"]
        if not 0 <= eta <= 1:
            raise ValueError("damping parameter must lie in [0, 1]")
        axis = params.get("axis", "z")
        if isinstance(axis, str):
            n = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}[axis]
        else:
            n = np.asarray(axis, dtype=float)
            n = n / np.linalg.norm(n)
        u = n[0] * PAULIS[1] + n[1] * PAULIS[2] + n[2] * PAULIS[3]
        ops = []
        if eta > 0:
            ops.append(np.sqrt(eta) * np.eye(2, dtype=complex))
        if eta < 1:
            ops.append(np.sqrt(1 - eta) * u)
        return KrausChannel(tuple(ops))
    raise ValueError(f"unknown channel kind {kind!r}")


def unitary_channel(u) -> KrausChannel:
    u = asarray(u)
    if not is_unitary(u):
        raise ValueError("operator is not unitary")
    return KrausChannel((u,))


# ---------------------------------------------------------------------------
# Qubit specifics
# ---------------------------------------------------------------------------

def qubit_diagonal_choi(lmbda, t) -> np.ndarray:
    """Chi-normalized Choi matrix of the qubit map r -> diag(lmbda) r + t."""
    l1, l2, l3 = (float(x) for x in lmbda)
    t1, t2, t3 = (float(x) for x in t)
    return 0.5 * np.array(
        [
            [1 + t3 + l3, t1 - 1j * t2, 0, l1 + l2],
            [t1 + 1j * t2, 1 - t3 - l3, l1 - l2, 0],
            [0, l1 - l2, 1 + t3 - l3, t1 - 1j * t2],
            [l1 + l2, 0, t1 + 1j * t2, 1 - t3 + l3],
        ],
        dtype=complex,
    )


def qubit_cp_check(lmbda, t) -> dict:
    """Complete-positivity verdict for the diagonal qubit affine map.

    The PSD test on the explicit 4x4 Choi matrix is authoritative; the
    three closed-form inequalities are reported as diagnostics only (the
    third is known to be unreliable in print).
    """
    l1, l2, l3 = (float(x) for x in lmbda)
    t1, t2, t3 = (float(x) for x in t)
    phi = qubit_diagonal_choi(lmbda, t)
    min_eig = float(np.linalg.eigvalsh(phi).min())
    lam2 = l1 * l1 + l2 * l2 + l3 * l3
    tnorm2 = t1 * t1 + t2 * t2 + t3 * t3
    ineqs = {
        "sum": (l1 + l2) ** 2 <= (1 + l3) ** 2 - t3 * t3 + 1e-12,
        "difference": (l1 - l2) ** 2 <= (1 - l3) ** 2 - t3 * t3 + 1e-12,
        "quartic": (1 - lam2 - tnorm2) ** 2 + 1e-12
        >= 4
        * (
            l1 * l1 * (t1 * t1 + t2 * t2)
            + l2 * l2 * (t2 * t2 + t3 * t3)
            + l3 * l3 * (t3 * t3 + t1 * t1)
            - 2 * l1 * l2 * l3
        ),
    }
    return {
        "cp": min_eig >= -ATOL,
        "choi_min_eig": min_eig,
        "choi": phi,
        "inequalities": ineqs,
    }


def bloch_rotation(u: np.ndarray) -> np.ndarray:
    """SO(3) action of a qubit unitary on Bloch vectors."""
    u = asarray(u)
    r = np.zeros((3, 3))
    for j in range(3):
        for k in range(3):
            r[j, k] = 0.5 * np.trace(PAULIS[j + 1] @ u @ PAULIS[k + 1] @ dag(u)).real
    return r


def su2_from_rotation(r: np.ndarray) -> np.ndarray:
    """Qubit unitary whose Bloch action is the given proper rotation."""
    r = np.asarray(r, dtype=float)
    if abs(np.linalg.det(r) - 1) > 1e-6:
        raise ValueError("matrix is not a proper rotation")
    tr = np.trace(r)
    if tr > 0:
        s = 2 * np.sqrt(1 + tr)
        q = np.array([s / 4, (r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s,
                      (r[1, 0] - r[0, 1]) / s])
    else:
        i = int(np.argmax(np.diag(r)))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = 2 * np.sqrt(max(1 + r[i, i] - r[j, j] - r[k, k], 0.0))
        q = np.zeros(4)
        q[i + 1] = s / 4
        q[0] = (r[k, j] - r[j, k]) / s
        q[j + 1] = (r[j, i] + r[i, j]) / s
        q[k + 1] = (r[k, i] + r[i, k]) / s
    q = q / np.linalg.norm(q)
    u = q[0] * PAULIS[0] - 1j * (q[1] * PAULIS[1] + q[2] * PAULIS[2] + q[3] * PAULIS[3])
    if np.max(np.abs(bloch_rotation(u) - r)) > 1e-7:
        raise NumericError("quaternion extraction failed to reproduce the rotation")
    return u


def qubit_normal_form(ch):
    """Decompose a qubit TP channel as sigma_U . D . sigma_V.

    Returns (U, lmbda, t, V) where D acts on Bloch vectors as
    r -> diag(lmbda) r + t, |lmbda| are the singular values of the
    affine block and lmbda_1 lmbda_2 lmbda_3 = det T.
    """
    if ch.in_dim != 2 or ch.out_dim != 2:
        raise ValueError("normal form is defined for qubit channels")
    aff = to_affine(ch)
    w1, sing, w2t = np.linalg.svd(aff.T)
    lam = sing.copy()
    if np.linalg.det(w1) < 0:
        w1[:, 2] *= -1
        lam[2] *= -1
    w2 = w2t.T
    if np.linalg.det(w2) < 0:
        w2[:, 2] *= -1
        lam[2] *= -1
    r_u = w1
    r_v = w2.T
    t = r_u.T @ aff.t
    u = su2_from_rotation(r_u)
    v = su2_from_rotation(r_v)
    return u, lam, t, v


# ---------------------------------------------------------------------------
# Distances, fixed points, structure checks
# ---------------------------------------------------------------------------

def _refine_ket(objective, ket0: np.ndarray, steps: int = 60, step0: float = 0.5,
                window: float = 1e-8):
    """Greedy coordinate refinement of a ket-valued objective (maximization)."""
    z = np.concatenate([ket0.real.ravel(), ket0.imag.ravel()])
    d = ket0.shape[0]

    def to_ket(vec):
        v = vec[:d] + 1j * vec[d:]
        n = np.linalg.norm(v)
        if n == 0:
            return None
        return (v / n).reshape(-1, 1)

    best = objective(to_ket(z))
    step = step0
    for _ in range(steps):
        improved = False
        for i in range(2 * d):
            for sign in (1.0, -1.0):
                cand = z.copy()
                cand[i] += sign * step
                k = to_ket(cand)
                if k is None:
                    continue
                val = objective(k)
                if val > best + window:
                    best, z, improved = val, cand, True
        if not improved:
            step /= 2
            if step < 1e-6:
                break
    return best, to_ket(z)


def sup_distance(ch1, ch2, rng=0, restarts: int = 64):
    """Maximal trace distance between channel outputs over pure states.

    The objective is convex on the state space, so the supremum is
    attained on pure states; a seeded multi-restart optimizer with
    coordinate refinement is used (reported tolerance 1e-3).
    Returns (value, argmax ket).
    """
    if (ch1.in_dim, ch1.out_dim) != (ch2.in_dim, ch2.out_dim):
        raise ValueError("channels must share dimensions")
    rng = rng_from(rng)
    d = ch1.in_dim

    def objective(k):
        rho = k @ dag(k)
        return trace_norm(apply(ch1, rho) - apply(ch2, rho)) / 2

    best_val, best_ket = -1.0, None
    for _ in range(restarts):
        val, k = _refine_ket(objective, random_ket(d, rng))
        if val > best_val:
            best_val, best_ket = val, k
    return best_val, best_ket


def noise_distance(ch, rng=0, restarts: int = 64) -> float:
    """Distance from the identity channel (Delta_sup)."""
    ident = KrausChannel((np.eye(ch.in_dim, dtype=complex),))
    return sup_distance(ch, ident, rng, restarts)[0]


def fixed_point(ch: KrausChannel, rho0, max_iter: int = 20000, tol: float = ATOL) -> State:
    """Iterate a TP channel until the trace-norm increment drops below tol."""
    if not ch.is_trace_preserving():
        raise ValueError("fixed-point iteration requires a trace-preserving channel")
    rho = _as_matrix(rho0)
    for _ in range(max_iter):
        nxt = apply(ch, rho)
        if trace_norm(nxt - rho) < tol:
            return State((nxt + dag(nxt)) / 2)
        rho = nxt
    raise NumericError(f"no fixed point found within {max_iter} iterations "
                       "(the channel may not be strictly contractive)")


def contraction_factor(ch: KrausChannel, sample_pairs: int = 50, rng=0) -> float:
    """Sampled lower bound on the contraction constant of a TP channel."""
    from .discrimination import trace_distance

    rng = rng_from(rng)
    d = ch.in_dim
    best = 0.0
    for _ in range(sample_pairs):
        k1, k2 = random_ket(d, rng), random_ket(d, rng)
        r1, r2 = k1 @ dag(k1), k2 @ dag(k2)
        denom = trace_distance(r1, r2)
        if denom < 1e-12:
            continue
        best = max(best, trace_distance(apply(ch, r1), apply(ch, r2)) / denom)
    return best


def is_pure_decoherence(ch: KrausChannel, basis, tol: float = 1e-8) -> bool:
    """True iff every Kraus operator commutes with every basis projector."""
    kets = [asarray(v).reshape(-1, 1) for v in basis]
    projs = [v @ dag(v) for v in kets]
    for a in ch.kraus_ops:
        for p in projs:
            if np.max(np.abs(a @ p - p @ a)) > tol:
                return False
    for i, a in enumerate(ch.kraus_ops):
        for b in ch.kraus_ops[i + 1:]:
            if np.max(np.abs(a @ b - b @ a)) > tol:
                raise AssertionError("pure decoherence Kraus operators must commute")
    return True


# ---------------------------------------------------------------------------
# Entanglement breaking
# ---------------------------------------------------------------------------

def _takagi(a: np.ndarray, tol: float = 1e-10):
    """Autonne-Takagi decomposition a = U diag(s) U^T of a symmetric matrix."""
    a = asarray(a)
    n = a.shape[0]
    scale = max(1.0, float(np.linalg.norm(a, 2)))
    b = np.block([[a.real, a.imag], [a.imag, -a.real]])
    vals, vecs = np.linalg.eigh((b + b.T) / 2)
    pos = [(vals[i], vecs[:, i]) for i in range(2 * n) if vals[i] > tol * scale]
    pos.sort(key=lambda p: -p[0])
    cols, sings = [], []
    for s, v in pos:
        u = v[:n] + 1j * v[n:]
        cols.append(u / np.linalg.norm(u))
        sings.append(s)
    zero_vecs = [vecs[:, i] for i in range(2 * n) if abs(vals[i]) <= tol * scale]
    for v in zero_vecs:
        u = v[:n] + 1j * v[n:]
        for c in cols:
            u = u - c * (np.conj(c) @ u)
        nrm = np.linalg.norm(u)
        if nrm > 1e-7:
            cols.append(u / nrm)
            sings.append(0.0)
        if len(cols) == n:
            break
    if len(cols) != n:
        raise NumericError("Takagi factorization failed to produce a full basis")
    u = np.stack(cols, axis=1)
    s = np.array(sings)
    if np.max(np.abs(u @ np.diag(s) @ u.T - a)) > 1e-7 * scale:
        raise NumericError("Takagi factorization residual too large")
    return u, s


def _close_polygon(lengths: np.ndarray) -> np.ndarray:
    """Unit phases w with lengths[0] w0 = sum_j lengths[j] w_j (j >= 1)."""
    l1, l2, l3, l4 = lengths
    if l1 <= 1e-14:
        return np.ones(4, dtype=complex)
    m = min(max(l1 - l2, l3 - l4), l3 + l4)

    def safe_arccos(x):
        return float(np.arccos(np.clip(x, -1.0, 1.0)))

    if l2 > 1e-14:
        beta = safe_arccos((l1 * l1 + l2 * l2 - m * m) / (2 * l1 * l2))
    else:
        beta = 0.0
    w2 = np.exp(1j * beta)
    mvec = l1 - l2 * w2
    mu = abs(mvec)
    delta = np.angle(mvec) if mu > 1e-14 else 0.0
    if mu <= 1e-14:
        w3, w4 = 1.0 + 0j, -1.0 + 0j
    elif l3 <= 1e-14:
        w3, w4 = 1.0 + 0j, np.exp(1j * delta)
    elif l4 <= 1e-14:
        w3, w4 = np.exp(1j * delta), 1.0 + 0j
    else:
        a3 = safe_arccos((mu * mu + l3 * l3 - l4 * l4) / (2 * mu * l3))
        w3 = np.exp(1j * (delta + a3))
        rest = mvec - l3 * w3
        w4 = rest / abs(rest) if abs(rest) > 1e-14 else 1.0 + 0j
    w = np.array([1.0, w2, w3, w4], dtype=complex)
    residual = l1 * w[0] - (l2 * w[1] + l3 * w[2] + l4 * w[3])
    if abs(residual) > 1e-7 * max(1.0, l1):
        raise NumericError("polygon closure failed; state may be entangled")
    return w


def product_decomposition_2x2(omega: np.ndarray, tol: float = 1e-9):
    """Decompose a separable two-qubit state into pure product terms.

    Uses the concurrence-optimal decomposition: for a separable state
    the optimal decomposition consists of product vectors.  Returns a
    list of subnormalized kets z_k with omega = sum_k z_k z_k^dag and
    each z_k of Schmidt rank one.
    """
    omega = asarray(omega)
    yy = tensor(PAULIS[2], PAULIS[2])
    vals, vecs = eigh(omega)
    subnorm = []
    for j, v in enumerate(vals):
        if v > tol:
            subnorm.append(np.sqrt(v) * vecs[:, j])
    r = len(subnorm)
    if r == 0:
        return []
    tau = np.zeros((r, r), dtype=complex)
    for i in range(r):
        for j in range(r):
            tau[i, j] = np.conj(subnorm[i]) @ yy @ np.conj(subnorm[j])
    tau = (tau + tau.T) / 2
    u, lam = _takagi(tau)
    xs = [sum(u[j, i] * subnorm[j] for j in range(r)) for i in range(r)]
    while len(xs) < 4:
        xs.append(np.zeros(4, dtype=complex))
        lam = np.append(lam, 0.0)
    lam = lam[:4]
    concurrence = lam[0] - lam[1:].sum()
    if concurrence > 1e-7:
        raise ValueError(f"state is entangled (concurrence {concurrence:.3e})")
    ys = [xs[0]] + [1j * x for x in xs[1:]]
    w = _close_polygon(lam)
    theta = np.angle(w) / 2
    hadamard = 0.5 * np.array(
        [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]], dtype=float
    )
    zs = []
    for k in range(4):
        z = sum(hadamard[k, j] * np.exp(1j * theta[j]) * ys[j] for j in range(4))
        if np.linalg.norm(z) > 1e-9:
            zs.append(z.reshape(-1, 1))
    return zs


def is_entanglement_breaking(ch: KrausChannel, tol: float = ATOL) -> dict:
    """Entanglement-breaking verdict {yes | no | inconclusive} via the Choi state.

    NPPT Choi means not entanglement breaking.  For qubit-to-qubit
    channels PPT is also sufficient and a measure-and-prepare form
    ``[(F_n, xi_n), ...]`` is extracted from a separable decomposition
    of the Choi state.
    """
    choi = to_choi(ch)
    d_in, d_out = choi.in_dim, choi.out_dim
    swapped = choi.matrix.reshape(d_out, d_in, d_out, d_in)
    pt = np.einsum("ijkl->ilkj", swapped).reshape(d_out * d_in, d_out * d_in)
    min_eig = float(np.linalg.eigvalsh((pt + dag(pt)) / 2).min())
    if min_eig < -tol * max(1.0, np.linalg.norm(choi.matrix, 2)):
        return {"verdict": "no", "pt_min_eig": min_eig, "measure_prepare": None}
    if d_in == 2 and d_out == 2:
        kets = product_decomposition_2x2(choi.matrix)
        pairs = []
        for z in kets:
            p = float(np.linalg.norm(z) ** 2)
            mat = z.reshape(2, 2)
            left, sing, right_h = np.linalg.svd(mat)
            out_ket = left[:, [0]]
            # The in-side factor enters the effect transposed: F_n = d p beta^T.
            in_ket = dag(right_h)[:, [0]]
            effect = d_in * p * (in_ket @ dag(in_ket))
            state = State(out_ket @ dag(out_ket))
            pairs.append((effect, state))
        return {"verdict": "yes", "pt_min_eig": min_eig, "measure_prepare": pairs}
    return {"verdict": "inconclusive", "pt_min_eig": min_eig, "measure_prepare": None}


def measure_prepare_channel(pairs) -> LinearMap:
    """Channel rho -> sum_n xi_n tr[rho F_n] from measure-and-prepare data."""
    d_in = pairs[0][0].shape[0]
    d_out = _as_matrix(pairs[0][1]).shape[0]
    s = np.zeros((d_out * d_out, d_in * d_in), dtype=complex)
    for effect, xi in pairs:
        xi_m = _as_matrix(xi)
        s += np.outer(xi_m.reshape(-1), effect.T.reshape(-1))
    return LinearMap(s, d_in, d_out)


def process_fidelity(ch1, ch2) -> float:
    """State fidelity of the trace-one Choi states of two channels."""
    from .discrimination import fidelity

    o1, o2 = to_choi(ch1), to_choi(ch2)
    return fidelity(o1.matrix, o2.matrix)
