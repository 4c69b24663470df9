"""Executable protocol simulations exercising the toolkit end to end."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import asarray, dag, inner, outer, partial_trace, tensor
from .channels import KrausChannel, LinearMap, stinespring
from .discrimination import fidelity, unambiguous_two_pure
from .observables import Povm, outcome_distribution
from .rand import random_ket, rng_from
from .states import PAULIS, State, _as_matrix


def _seed_repr(rng_arg) -> object:
    """JSON-friendly record of the randomness source."""
    if isinstance(rng_arg, np.random.Generator):
        return "external-generator"
    return rng_arg


@dataclass(frozen=True)
class ProtocolReport:
    """Simulation record: per-round data plus summary statistics and the seed."""

    protocol: str
    rounds: int
    records: tuple
    summary: dict
    seed: object

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "rounds": self.rounds,
            "seed": self.seed,
            "summary": self.summary,
            "records": list(self.records),
        }


@dataclass(frozen=True)
class ShiftMultiplyBasis:
    """Shift-multiply unitaries U_rs and the Bell kets (U_rs (x) I) psi+."""

    d: int
    unitaries: dict = field(repr=False)
    bell_kets: dict = field(repr=False)

    @classmethod
    def build(cls, d: int) -> "ShiftMultiplyBasis":
        from .entanglement import maximally_entangled_ket

        psi_plus = maximally_entangled_ket(d)
        us, kets = {}, {}
        for r in range(d):
            for s in range(d):
                u = np.zeros((d, d), dtype=complex)
                for l in range(d):
                    u[(l - r) % d, l] = np.exp(-2j * np.pi * s * l / d)
                us[(r, s)] = u
                kets[(r, s)] = tensor(u, np.eye(d)) @ psi_plus
        return cls(d, us, kets)

    def bell_povm(self) -> Povm:
        effs = tuple(outer(self.bell_kets[k]) for k in sorted(self.bell_kets))
        return Povm(tuple(sorted(self.bell_kets)), effs)


# ---------------------------------------------------------------------------
# Teleportation and superdense coding
# ---------------------------------------------------------------------------

def teleport(rho_in, rng=0) -> ProtocolReport:
    """Teleport a d-dimensional state through a maximally entangled pair.

    All d^2 Bell outcomes are enumerated: each occurs with probability
    1/d^2 and, after the matching correction, reproduces the input with
    fidelity 1.
    """
    from .entanglement import maximally_entangled_ket

    rho = _as_matrix(rho_in)
    d = rho.shape[0]
    basis = ShiftMultiplyBasis.build(d)
    psi_plus = maximally_entangled_ket(d)
    total = tensor(rho, outer(psi_plus))
    records = []
    for (r, s), ket in sorted(basis.bell_kets.items()):
        proj = tensor(outer(ket), np.eye(d))
        branch = proj @ total @ proj
        prob = float(np.trace(branch).real)
        cond_b = partial_trace(branch, d * d, d, side="A") / prob
        u = basis.unitaries[(r, s)]
        corrected = u @ cond_b @ dag(u)
        records.append(
            {
                "outcome": [r, s],
                "probability": prob,
                "fidelity": fidelity(corrected, rho),
            }
        )
    seed = _seed_repr(rng)
    rng = rng_from(rng)
    sampled = rng.choice(len(records), p=[rec["probability"] for rec in records])
    summary = {
        "probabilities": [rec["probability"] for rec in records],
        "min_fidelity": min(rec["fidelity"] for rec in records),
        "sampled_outcome": records[sampled]["outcome"],
    }
    return ProtocolReport("teleport", len(records), tuple(records), summary, seed)


def teleport_channel(d: int) -> LinearMap:
    """The composed teleportation map (measure, correct, average): identity."""
    from .entanglement import maximally_entangled_ket

    basis = ShiftMultiplyBasis.build(d)
    psi_plus = maximally_entangled_ket(d)
    p_plus = outer(psi_plus)
    s = np.zeros((d * d, d * d), dtype=complex)
    for j in range(d):
        for k in range(d):
            ejk = np.zeros((d, d), dtype=complex)
            ejk[j, k] = 1.0
            total = tensor(ejk, p_plus)
            out = np.zeros((d, d), dtype=complex)
            for (r, ss), ket in basis.bell_kets.items():
                proj = tensor(outer(ket), np.eye(d))
                branch = proj @ total @ proj
                cond = partial_trace(branch, d * d, d, side="A")
                u = basis.unitaries[(r, ss)]
                out += u @ cond @ dag(u)
            s[:, j * d + k] = out.reshape(-1)
    return LinearMap(s, d, d)


def superdense(message: int, rng=0) -> ProtocolReport:
    """Send two classical bits through one qubit and a shared Bell pair."""
    if message not in range(4):
        raise ValueError("message must encode two bits (0..3)")
    from .entanglement import maximally_entangled_ket

    psi_plus = maximally_entangled_ket(2)
    encoded = tensor(PAULIS[message], np.eye(2)) @ psi_plus
    bell_kets = [tensor(PAULIS[j], np.eye(2)) @ psi_plus for j in range(4)]
    probs = [abs(inner(b, encoded)) ** 2 for b in bell_kets]
    marginal = partial_trace(outer(encoded), 2, 2, side="B")
    records = [
        {"message": message, "decoded": int(np.argmax(probs)), "probabilities": probs}
    ]
    summary = {
        "decoded": int(np.argmax(probs)),
        "decode_probability": float(max(probs)),
        "intercepted_marginal": marginal.tolist(),
    }
    return ProtocolReport("superdense", 1, tuple(records), summary, _seed_repr(rng))


# ---------------------------------------------------------------------------
# Key distribution
# ---------------------------------------------------------------------------

def _bb84_kets():
    e0 = np.array([[1.0], [0.0]], dtype=complex)
    e1 = np.array([[0.0], [1.0]], dtype=complex)
    plus = (e0 + e1) / np.sqrt(2)
    minus = (e0 - e1) / np.sqrt(2)
    return {(0, 0): e0, (1, 0): e1, (0, 1): plus, (1, 1): minus}


def bb84(rounds: int, eve: str = "none", rng=0, sample_fraction: float = 0.25) -> ProtocolReport:
    """BB84 key distribution, optionally with an intercept-resend attacker.

    Reports the sift rate, the error rate on a released sample of the
    sifted key, and the fraction of sifted bits the attacker holds
    correctly.
    """
    if rounds < 1:
        raise ValueError("at least one round is required")
    if eve not in ("none", "intercept_resend"):
        raise ValueError("eve must be 'none' or 'intercept_resend'")
    seed = _seed_repr(rng)
    rng = rng_from(rng)
    kets = _bb84_kets()
    bases = {b: Povm.from_basis([kets[(0, b)], kets[(1, b)]]) for b in (0, 1)}
    records = []
    for _ in range(rounds):
        a_basis = int(rng.integers(2))
        b_basis = int(rng.integers(2))
        x = int(rng.integers(2))
        flying = kets[(x, a_basis)]
        eve_bit = None
        if eve == "intercept_resend":
            e_basis = int(rng.integers(2))
            p = outcome_distribution(bases[e_basis], State.from_ket(flying))
            eve_bit = int(rng.choice(2, p=p))
            flying = kets[(eve_bit, e_basis)]
        p = outcome_distribution(bases[b_basis], State.from_ket(flying))
        y = int(rng.choice(2, p=p))
        records.append(
            {
                "alice_basis": a_basis,
                "bob_basis": b_basis,
                "alice_bit": x,
                "bob_bit": y,
                "eve_bit": eve_bit,
                "sifted": a_basis == b_basis,
                "released": False,
            }
        )
    sifted = [r for r in records if r["sifted"]]
    released = [r for r in sifted if rng.random() < sample_fraction]
    for r in released:
        r["released"] = True
    qber = (
        float(np.mean([r["alice_bit"] != r["bob_bit"] for r in released]))
        if released
        else 0.0
    )
    eve_fraction = (
        float(np.mean([r["eve_bit"] == r["alice_bit"] for r in sifted]))
        if eve == "intercept_resend" and sifted
        else None
    )
    summary = {
        "sift_rate": len(sifted) / rounds,
        "released_count": len(released),
        "qber": qber,
        "eve_correct_fraction": eve_fraction,
    }
    return ProtocolReport("bb84", rounds, tuple(records), summary, seed)


def b92(rounds: int, overlap: float, rng=0) -> ProtocolReport:
    """B92 key distribution via optimal unambiguous discrimination.

    Conclusive rounds are error-free and occur at asymptotic rate
    1 - overlap.
    """
    if rounds < 1:
        raise ValueError("at least one round is required")
    if not 0 <= overlap < 1:
        raise ValueError("overlap must lie in [0, 1)")
    seed = _seed_repr(rng)
    rng = rng_from(rng)
    theta = np.arccos(overlap)
    psi0 = np.array([[np.cos(theta / 2)], [np.sin(theta / 2)]], dtype=complex)
    psi1 = np.array([[np.cos(theta / 2)], [-np.sin(theta / 2)]], dtype=complex)
    scheme = unambiguous_two_pure(psi0, psi1)
    records = []
    conclusive = 0
    errors = 0
    for _ in range(rounds):
        x = int(rng.integers(2))
        state = State.from_ket(psi0 if x == 0 else psi1)
        p = outcome_distribution(scheme.povm, state)
        outcome = scheme.povm.outcomes[int(rng.choice(len(p), p=p))]
        y = None
        if outcome != "?":
            conclusive += 1
            y = int(outcome) - 1
            if y != x:
                errors += 1
        records.append({"alice_bit": x, "outcome": outcome, "bob_bit": y})
    summary = {
        "conclusive_rate": conclusive / rounds,
        "conclusive_errors": errors,
        "expected_rate": 1 - overlap,
    }
    return ProtocolReport("b92", rounds, tuple(records), summary, seed)


# ---------------------------------------------------------------------------
# Private quantum channel
# ---------------------------------------------------------------------------

def private_quantum_channel(d: int, n_messages: int, rng=0) -> ProtocolReport:
    """One-time-pad encryption of quantum states with shift-multiply keys.

    Bob decodes exactly with the shared key; without the key the average
    channel is the contraction to the total mixture, so the ciphertext
    carries no information.  The key costs 2 log2(d) bits per message.
    """
    from .channels import make, to_choi as choi_of
    seed = _seed_repr(rng)
    rng = rng_from(rng)
    basis = ShiftMultiplyBasis.build(d)
    keys = sorted(basis.unitaries)
    records = []
    for _ in range(n_messages):
        key = keys[int(rng.integers(len(keys)))]
        u = basis.unitaries[key]
        message = random_ket(d, rng)
        cipher = u @ outer(message) @ dag(u)
        decoded = dag(u) @ cipher @ u
        records.append(
            {
                "key": list(key),
                "decode_fidelity": fidelity(decoded, outer(message)),
            }
        )
    average = KrausChannel(tuple(basis.unitaries[k] / d for k in keys))
    contraction = make("contraction", xi=State.maximally_mixed(d))
    omega_avg = choi_of(average).matrix
    omega_con = choi_of(contraction).matrix
    choi_gap = float(np.abs(omega_avg - omega_con).max())
    summary = {
        "keyless_choi_deviation": choi_gap,
        "min_decode_fidelity": min(r["decode_fidelity"] for r in records) if records else 1.0,
        "key_bits_total": 2 * n_messages * np.log2(d),
    }
    return ProtocolReport("private_quantum_channel", n_messages, tuple(records), summary, seed)


# ---------------------------------------------------------------------------
# Mean king
# ---------------------------------------------------------------------------

def _mean_king_basis() -> list[np.ndarray]:
    up = np.array([[1.0], [0.0]], dtype=complex)
    dn = np.array([[0.0], [1.0]], dtype=complex)
    e = lambda a, b: tensor(a, b)
    p = np.exp(1j * np.pi / 4)
    m = np.exp(-1j * np.pi / 4)
    s2 = 1 / np.sqrt(2)
    theta1 = s2 * e(up, dn) + 0.5 * m * e(up, up) - 0.5 * p * e(dn, dn)
    theta2 = s2 * e(up, dn) - 0.5 * m * e(up, up) + 0.5 * p * e(dn, dn)
    theta3 = s2 * e(dn, up) + 0.5 * p * e(up, up) - 0.5 * m * e(dn, dn)
    theta4 = s2 * e(dn, up) - 0.5 * p * e(up, up) + 0.5 * m * e(dn, dn)
    return [theta1, theta2, theta3, theta4]


def _king_eigenkets():
    up = np.array([[1.0], [0.0]], dtype=complex)
    dn = np.array([[0.0], [1.0]], dtype=complex)
    s2 = 1 / np.sqrt(2)
    return {
        "x": {1: s2 * (up + dn), -1: s2 * (up - dn)},
        "y": {1: s2 * (up + 1j * dn), -1: s2 * (up - 1j * dn)},
        "z": {1: up, -1: dn},
    }


def mean_king(rng=None) -> ProtocolReport:
    """Retrodict the king's spin outcome from a singlet and a clever basis.

    Rebuilds the 4 x 6 overlap table, simulates all six measurement
    settings with Lüders collapses, and applies the table-based decoding
    rule, which succeeds with certainty.
    """
    thetas = _mean_king_basis()
    eig = _king_eigenkets()
    settings = [(b, o) for b in ("x", "y", "z") for o in (1, -1)]
    # Conditional post-measurement states of (Alice kept (x) returned) system.
    table = np.zeros((4, 6))
    records = []
    for col, (b, o) in enumerate(settings):
        phi = tensor(eig[b][-o], eig[b][o])  # king outcome o collapses the singlet
        for k, theta in enumerate(thetas):
            table[k, col] = abs(inner(theta, phi)) ** 2
        outcomes = [k for k in range(4) if table[k, col] > 1e-12]
        # Decoding: told b, outcome k points to the unique compatible result.
        correct = True
        for k in outcomes:
            other = -o
            other_col = settings.index((b, other))
            if table[k, other_col] > 1e-12:
                correct = False
        records.append(
            {
                "setting": f"{b}{'+' if o == 1 else '-'}",
                "alice_outcomes": outcomes,
                "guess_correct": correct,
            }
        )
    summary = {
        "table": table.tolist(),
        "success_probability": float(all(r["guess_correct"] for r in records)),
    }
    return ProtocolReport("mean_king", len(settings), tuple(records), summary, _seed_repr(rng))


# ---------------------------------------------------------------------------
# Programmable processors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Processor:
    """Fixed unitary coupling with a program register: <K, G>."""

    system_dim: int
    program_dim: int
    unitary: np.ndarray = field(repr=False)

    def apply(self, rho, program_ket: np.ndarray) -> np.ndarray:
        m = _as_matrix(rho)
        xi = asarray(program_ket).reshape(-1, 1)
        big = self.unitary @ tensor(m, outer(xi)) @ dag(self.unitary)
        return partial_trace(big, self.system_dim, self.program_dim, side="B")

    def kraus_for_program(self, program_ket: np.ndarray) -> list[np.ndarray]:
        """Kraus operators A_j = sum_k E_jk <k|Xi> of the programmed channel."""
        xi = asarray(program_ket).reshape(-1)
        d, k = self.system_dim, self.program_dim
        g = self.unitary.reshape(d, k, d, k)
        return [np.einsum("abm,m->ab", g[:, j, :, :], xi) for j in range(k)]


def processor_pair(ch1: KrausChannel, ch2: KrausChannel):
    """Direct-sum processor realizing two channels from orthogonal programs.

    Returns (processor, program_ket_1, program_ket_2).
    """
    d = ch1.in_dim
    if ch2.in_dim != d or ch1.out_dim != d or ch2.out_dim != d:
        raise ValueError("both channels must share the system dimension")
    n1, u1, _ = stinespring(ch1)
    n2, u2, _ = stinespring(ch2)
    k = n1 + n2
    g = np.zeros((d * k, d * k), dtype=complex)
    for a in range(d):
        for b in range(d):
            for e1 in range(n1):
                for e2 in range(n1):
                    g[a * k + e1, b * k + e2] = u1[a * n1 + e1, b * n1 + e2]
            for e1 in range(n2):
                for e2 in range(n2):
                    g[a * k + n1 + e1, b * k + n1 + e2] = u2[a * n2 + e1, b * n2 + e2]
    xi1 = np.zeros((k, 1), dtype=complex)
    xi1[0, 0] = 1.0
    xi2 = np.zeros((k, 1), dtype=complex)
    xi2[n1, 0] = 1.0
    return Processor(d, k, g), xi1, xi2


def controlled_unitary_processor(unitaries) -> Processor:
    """G = sum_j U_j (x) |j><j| over a program basis."""
    us = [asarray(u) for u in unitaries]
    d = us[0].shape[0]
    k = len(us)
    g = np.zeros((d * k, d * k), dtype=complex)
    for j, u in enumerate(us):
        proj = np.zeros((k, k), dtype=complex)
        proj[j, j] = 1.0
        g += tensor(u, proj)
    return Processor(d, k, g)


def processor_identity_check(kraus1, kraus2):
    """(sum_j A_j^dag B_j, extracted scalar) for aligned Kraus lists.

    For channels realized on one processor with pure programs the sum
    equals <Xi_1|Xi_2> I.
    """
    a = list(kraus1)
    b = list(kraus2)
    d = a[0].shape[1] if a else b[0].shape[1]
    while len(a) < len(b):
        a.append(np.zeros_like(b[0]))
    while len(b) < len(a):
        b.append(np.zeros_like(a[0]))
    total = sum(dag(x) @ y for x, y in zip(a, b))
    scalar = complex(np.trace(total) / d)
    return total, scalar


def phase_damping_processor(axis="z") -> tuple[Processor, np.ndarray, np.ndarray]:
    """Two-dimensional program space realizing every phase damping channel."""
    from .channels import make

    u = make("phase_damping", eta=0.0, axis=axis).kraus_ops[0]
    proc = controlled_unitary_processor([np.eye(2, dtype=complex), u])
    xi_ident = np.array([[1.0], [0.0]], dtype=complex)
    xi_u = np.array([[0.0], [1.0]], dtype=complex)
    return proc, xi_ident, xi_u


def probabilistic_processor(d: int, target_u, rng=0, n_inputs: int = 3) -> ProtocolReport:
    """Probabilistic universal programming of a target unitary.

    A controlled-U processor over the shift-multiply basis implements any
    unitary with success probability exactly 1/d^2; conditional outputs
    match U rho U^dag with fidelity 1.
    """
    target_u = asarray(target_u)
    seed = _seed_repr(rng)
    rng = rng_from(rng)
    basis = ShiftMultiplyBasis.build(d)
    keys = sorted(basis.unitaries)
    proc = controlled_unitary_processor([basis.unitaries[key] for key in keys])
    k = d * d
    phi = np.full((k, 1), 1.0 / d, dtype=complex)
    amps = np.array([np.trace(dag(basis.unitaries[key]) @ target_u) / d for key in keys])
    xi = amps.reshape(-1, 1)
    f_success = outer(phi)
    records = []
    for _ in range(n_inputs):
        ket = random_ket(d, rng)
        rho = outer(ket)
        big = proc.unitary @ tensor(rho, outer(xi)) @ dag(proc.unitary)
        selected = tensor(np.eye(d), f_success)
        branch = selected @ big @ selected
        p = float(np.trace(branch).real)
        cond = partial_trace(branch, d, k, side="B") / p
        target = target_u @ rho @ dag(target_u)
        records.append({"p_success": p, "fidelity": fidelity(cond, target)})
    summary = {
        "p_success": records[0]["p_success"] if records else 1 / d**2,
        "amplitude_norm": float(np.linalg.norm(amps) ** 2),
        "min_fidelity": min(r["fidelity"] for r in records) if records else 1.0,
    }
    return ProtocolReport("probabilistic_processor", n_inputs, tuple(records), summary, seed)
