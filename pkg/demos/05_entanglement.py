"""Entanglement detection: Schmidt, PPT, witnesses, Werner states, tiles."""

import numpy as np

from qitools.entanglement import (
    BipartiteState,
    chsh_value,
    chsh_witness,
    majorization_convertible,
    max_entangled_fraction,
    maximally_entangled_ket,
    ppt,
    reduction_criterion,
    schmidt,
    tiles_upb,
    twirl,
    upb_state,
    upb_witness,
    werner_report,
    witness_evaluate,
)
from qitools.linalg import tensor, unit_ket
from qitools.rand import random_ket
from qitools.states import State

print("== Schmidt decomposition ==")
psi = random_ket(6, np.random.default_rng(0))
data = schmidt(psi, 2, 3)
print(f"random 2x3 ket: coefficients {np.round(data.coefficients, 4)}, "
      f"entangled? {data.is_entangled()}")
prod = tensor(random_ket(2, 1), random_ket(3, 2))
print(f"product ket:    rank {schmidt(prod, 2, 3).rank}")

print("\n== Werner family (separable exactly for mu >= 1/2) ==")
for mu in (0.2, 0.5, 0.8):
    rep = werner_report(2, mu)
    print(f"mu={mu}: swap expectation {rep['swap_expectation']:+.2f}, "
          f"ppt={rep['ppt']}, reduction detects={rep['reduction_detects']}")
print("d=3, mu=0.1: entangled but invisible to the reduction criterion ->",
      werner_report(3, 0.1)["reduction_detects"])

print("\n== CHSH on the singlet ==")
singlet = BipartiteState(State.from_ket(unit_ket([0, 1, -1, 0])), 2, 2)
s2 = 1 / np.sqrt(2)
value = chsh_value(singlet, (1, 0, 0), (0, 1, 0), (s2, s2, 0), (s2, -s2, 0))
print(f"2 - |<B>| = {value:.9f}  (= 2 - 2 sqrt(2))")
w = chsh_witness((1, 0, 0), (0, 1, 0), (s2, s2, 0), (s2, -s2, 0), rng=0)
print(f"as a certified witness: {witness_evaluate(w, singlet)}")

print("\n== Maximally entangled fraction (> 1/d certifies entanglement) ==")
bell = BipartiteState(State.from_ket(maximally_entangled_ket(2)), 2, 2)
print(f"Bell state: {max_entangled_fraction(bell, rng=0, restarts=16):.6f}")

print("\n== Twirling projects onto the Werner family ==")
from qitools.entanglement import werner

twirled = twirl(bell.matrix)
deviation = np.abs(twirled - werner(2, 1.0).matrix).max()
print(f"twirl(P+) equals the mu=1 Werner state (deviation {deviation:.1e})")

print("\n== LOCC convertibility by majorization ==")
print("psi+ -> anything:", majorization_convertible(
    maximally_entangled_ket(3), random_ket(9, 3), 3, 3))
print("product -> psi+: ", majorization_convertible(
    tensor(random_ket(3, 4), random_ket(3, 5)), maximally_entangled_ket(3), 3, 3))

print("\n== The tiles UPB: bound entanglement ==")
kets = tiles_upb()
print(f"5 orthonormal product kets in 3x3 (Gram deviation "
      f"{np.abs(np.array([[complex((a.conj().T @ b)[0, 0]) for b in kets] for a in kets]) - np.eye(5)).max():.1e})")
rho = upb_state()
print(f"complement state PPT? {ppt(rho)[0]}  "
      f"reduction detects? {reduction_criterion(rho)[0]}")
witness = upb_witness(rng=0, restarts=100)
value, verdict = witness_evaluate(witness, rho)
print(f"tailored witness value {value:.6f} -> {verdict} (PPT entanglement)")
