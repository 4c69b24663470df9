"""Discrete instruments, measurement models, Lüders machinery, repeatability."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import ATOL, asarray, dag, is_unitary, partial_trace, psd_sqrt, tensor
from .channels import ChoiMatrix, KrausChannel, from_choi
from .observables import Povm, is_sharp
from .states import State, _as_matrix

# Repeatability hinges on exact unit eigenvalues; detection uses a looser
# threshold than the global tolerance because roundoff perturbs spectra.
UNIT_EIGENVALUE_TOL = 1e-7


def _hermitian_basis(d: int) -> list[np.ndarray]:
    """Matrix units symmetrized into d^2 Hermitian spanning operators."""
    ops = []
    for j in range(d):
        m = np.zeros((d, d), dtype=complex)
        m[j, j] = 1.0
        ops.append(m)
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = m[k, j] = 1.0
            ops.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = -1j
            m[k, j] = 1j
            ops.append(m)
    return ops


@dataclass(frozen=True)
class DiscreteInstrument:
    """Outcome-labeled trace-decreasing operations with trace-preserving total."""

    outcomes: tuple
    operations: tuple  # one Kraus list per outcome

    def __post_init__(self):
        outs = tuple(self.outcomes)
        ops = tuple(
            op if isinstance(op, KrausChannel) else KrausChannel(tuple(op))
            for op in self.operations
        )
        if len(outs) != len(ops):
            raise ValueError("need one operation per outcome")
        d = ops[0].in_dim
        total = sum(op.normalization() for op in ops)
        if np.max(np.abs(total - np.eye(d))) > 1e-8 * d:
            raise ValueError("total operation is not trace-preserving")
        object.__setattr__(self, "outcomes", outs)
        object.__setattr__(self, "operations", ops)

    @property
    def dim(self) -> int:
        return self.operations[0].in_dim

    def operation(self, outcome) -> KrausChannel:
        return self.operations[self.outcomes.index(outcome)]

    def apply(self, outcome, rho) -> np.ndarray:
        m = _as_matrix(rho)
        return sum(a @ m @ dag(a) for a in self.operation(outcome).kraus_ops)

    def total_channel(self) -> KrausChannel:
        ops = []
        for op in self.operations:
            ops.extend(op.kraus_ops)
        return KrausChannel(tuple(ops))


@dataclass(frozen=True)
class MeasurementModel:
    """Probe space, probe state, unitary coupling, pointer observable."""

    probe_dim: int
    probe_state: State
    coupling: np.ndarray = field(repr=False)
    pointer: Povm

    def __post_init__(self):
        u = asarray(self.coupling)
        if not is_unitary(u, 1e-8):
            raise ValueError("coupling must be unitary")
        if self.probe_state.dim != self.probe_dim or self.pointer.dim != self.probe_dim:
            raise ValueError("probe state and pointer must live on the probe space")
        if u.shape[0] % self.probe_dim != 0:
            raise ValueError("coupling dimension must be system*probe")
        u.flags.writeable = False
        object.__setattr__(self, "coupling", u)

    @property
    def system_dim(self) -> int:
        return self.coupling.shape[0] // self.probe_dim


def induced_observable(ins: DiscreteInstrument) -> Povm:
    """POVM with effects sum_k A_{x,k}^dag A_{x,k} (dual of each operation at I)."""
    effs = tuple(op.normalization() for op in ins.operations)
    return Povm(ins.outcomes, effs)


def luders(a: Povm) -> DiscreteInstrument:
    """Lüders instrument: I_x(rho) = A(x)^(1/2) rho A(x)^(1/2)."""
    ops = tuple(KrausChannel((psd_sqrt(e.matrix),)) for e in a.effects)
    return DiscreteInstrument(a.outcomes, ops)


def trivial_instrument(a: Povm, xi: State) -> DiscreteInstrument:
    """I_x(rho) = tr[rho A(x)] xi."""
    terms = []
    xi_terms = [(lam, phi) for lam, phi in _state_decomposition(xi)]
    for e in a.effects:
        root = psd_sqrt(e.matrix)
        kraus = []
        for lam, phi in xi_terms:
            for j in range(a.dim):
                kraus.append(np.sqrt(lam) * phi @ root[[j], :])
        terms.append(KrausChannel(tuple(kraus)))
    return DiscreteInstrument(a.outcomes, tuple(terms))


def _state_decomposition(xi: State):
    from .states import canonical_decomposition

    return canonical_decomposition(xi)


def memo_to_instrument(m: MeasurementModel, tol: float = 1e-8) -> DiscreteInstrument:
    """Instrument induced by a measurement model.

    I_x(rho) = tr_probe[V (rho (x) rho_0) V^dag (I (x) F(x))], converted
    to Kraus form through the Choi matrix of each outcome map.
    """
    d = m.system_dim
    k = m.probe_dim
    ops = []
    for eff in m.pointer.effects:
        omega = np.zeros((d * d, d * d), dtype=complex)
        for j in range(d):
            for kk in range(d):
                ejk = np.zeros((d, d), dtype=complex)
                ejk[j, kk] = 1.0
                big = m.coupling @ tensor(ejk, m.probe_state.matrix) @ dag(m.coupling)
                out = partial_trace(big @ tensor(np.eye(d), eff.matrix), d, k, side="B")
                omega += tensor(out, ejk)
        ops.append(from_choi(ChoiMatrix(omega / d, d, d), tol))
    ins = DiscreteInstrument(m.pointer.outcomes, tuple(ops))
    return ins


def instrument_to_normal_memo(ins: DiscreteInstrument) -> MeasurementModel:
    """Constructive normal measurement model realizing a discrete instrument.

    The outcome-tagged total channel rho -> sum_x I_x(rho) (x) |x><x| is
    dilated; the probe is pointer (x) environment with a sharp pointer
    reading out the outcome tag.
    """
    d = ins.dim
    n_out = len(ins.outcomes)
    tagged = []
    for x_idx, op in enumerate(ins.operations):
        tag = np.zeros((n_out, 1), dtype=complex)
        tag[x_idx, 0] = 1.0
        for a in op.kraus_ops:
            tagged.append(tensor(a, tag))
    total = KrausChannel(tuple(tagged))  # maps system -> system (x) tag
    # Stinespring by hand: phi -> sum_m B_m phi (x) |m>, with the tag space
    # folded into the probe.
    n_env = len(total.kraus_ops)
    probe_dim = n_out * n_env
    v = np.zeros((d * probe_dim, d), dtype=complex)
    for m_idx, b in enumerate(total.kraus_ops):
        # b maps C^d -> C^d (x) C^{n_out}; probe index = tag (x) environment
        for a_idx in range(d):
            for t_idx in range(n_out):
                v[a_idx * probe_dim + t_idx * n_env + m_idx, :] = b[
                    a_idx * n_out + t_idx, :
                ]
    from .linalg import gram_schmidt_complete

    full = gram_schmidt_complete(v)
    u = np.zeros((d * probe_dim, d * probe_dim), dtype=complex)
    for b_idx in range(d):
        u[:, b_idx * probe_dim] = full[:, b_idx]
    extra = iter(range(d, d * probe_dim))
    for col in range(d * probe_dim):
        if col % probe_dim != 0:
            u[:, col] = full[:, next(extra)]
    probe0 = np.zeros((probe_dim, probe_dim), dtype=complex)
    probe0[0, 0] = 1.0
    pointer_effects = []
    for t_idx in range(n_out):
        diag = np.zeros(probe_dim)
        diag[t_idx * n_env:(t_idx + 1) * n_env] = 1.0
        pointer_effects.append(np.diag(diag).astype(complex))
    pointer = Povm(ins.outcomes, tuple(pointer_effects))
    return MeasurementModel(probe_dim, State(probe0), u, pointer)


def outcome_probability(ins: DiscreteInstrument, rho, x) -> float:
    return float(np.trace(ins.apply(x, rho)).real)


def conditional_output(ins: DiscreteInstrument, rho, x, tol: float = ATOL) -> State:
    """Normalized post-measurement state for an observed outcome."""
    out = ins.apply(x, rho)
    p = np.trace(out).real
    if p <= tol:
        raise ValueError(f"conditional state undefined: outcome {x!r} has probability {p:.3e}")
    return State(out / p)


def is_repeatable(ins: DiscreteInstrument, tol: float = UNIT_EIGENVALUE_TOL) -> bool:
    """tr[I_x(I_x(rho))] = tr[I_x(rho)] checked on a spanning operator basis."""
    for basis_op in _hermitian_basis(ins.dim):
        for x in ins.outcomes:
            once = ins.apply(x, basis_op)
            twice = ins.apply(x, once)
            if abs(np.trace(twice).real - np.trace(once).real) > tol:
                return False
    return True


def repeatable_instrument(a: Povm) -> DiscreteInstrument:
    """A-compatible repeatable instrument I_x(rho) = tr[rho A(x)] P_{psi_x}.

    Exists iff every nonzero effect has eigenvalue 1; otherwise raises
    with the offending maximal eigenvalue.
    """
    ops = []
    for e in a.effects:
        mat = e.matrix
        if np.max(np.abs(mat)) <= ATOL:
            ops.append(KrausChannel((np.zeros_like(mat),)))
            continue
        vals, vecs = np.linalg.eigh(mat)
        if abs(vals[-1] - 1) >= UNIT_EIGENVALUE_TOL:
            raise ValueError(
                "impossible: repeatable instruments need every nonzero effect to "
                f"have eigenvalue 1 (max eigenvalue {vals[-1]:.6f})"
            )
        psi = vecs[:, [-1]]
        root = psd_sqrt(mat)
        kraus = tuple(psi @ root[[j], :] for j in range(a.dim))
        ops.append(KrausChannel(kraus))
    return DiscreteInstrument(a.outcomes, tuple(ops))


def luders_disturbs(a: Povm, b: Povm, tol: float = 1e-8) -> bool:
    """Whether a sharp Lüders measurement of A disturbs the statistics of B.

    Disturbance occurs exactly when some pair [A(x), B(y)] fails to
    commute; both characterizations are evaluated and must agree.
    """
    if not is_sharp(a):
        raise ValueError("the measured observable must be sharp")
    disturbed = False
    for eb in b.effects:
        total = sum(ea.matrix @ eb.matrix @ ea.matrix for ea in a.effects)
        if np.max(np.abs(total - eb.matrix)) > tol:
            disturbed = True
            break
    noncommuting = any(
        np.max(np.abs(ea.matrix @ eb.matrix - eb.matrix @ ea.matrix)) > tol
        for ea in a.effects
        for eb in b.effects
    )
    if disturbed != noncommuting:
        raise AssertionError("disturbance and commutation checks disagree")
    return disturbed


def no_information_no_disturbance_check(ins: DiscreteInstrument, tol: float = 1e-8) -> dict:
    """Check the no-information-without-disturbance trade-off.

    If every operation acts as I_x(rho) = c_x rho on a spanning basis,
    the induced observable must be trivial; the report states which side
    holds.
    """
    basis = _hermitian_basis(ins.dim)
    non_disturbing = True
    for x in ins.outcomes:
        c = np.trace(ins.apply(x, np.eye(ins.dim, dtype=complex) / ins.dim)).real
        for op in basis:
            if np.max(np.abs(ins.apply(x, op) - c * op)) > tol:
                non_disturbing = False
                break
        if not non_disturbing:
            break
    obs = induced_observable(ins)
    trivial = all(
        np.max(np.abs(e.matrix - np.trace(e.matrix) / ins.dim * np.eye(ins.dim))) <= tol
        for e in obs.effects
    )
    if non_disturbing and not trivial:
        raise AssertionError("non-disturbing instrument induced a nontrivial observable")
    return {"non_disturbing": non_disturbing, "observable_trivial": trivial}
