"""States, Bloch geometry and POVMs: a guided tour.

Run with ``python demos/01_states_and_observables.py``.
"""

import numpy as np

from qitools.observables import (
    is_informationally_complete,
    is_sharp,
    mean_variance,
    minimal_ic_povm,
    outcome_distribution,
    photon_counting,
    stern_gerlach,
)
from qitools.states import (
    State,
    canonical_decomposition,
    purity,
    qubit_state,
    to_bloch,
    von_neumann_entropy,
)

print("== Qubit states on the Bloch ball ==")
r = np.array([0.3, -0.1, 0.5])
rho = qubit_state(r)
print(f"Bloch vector      {r}")
print(f"eigenvalues       {np.linalg.eigvalsh(rho.matrix)}  (expect (1 +- |r|)/2)")
print(f"purity            {purity(rho):.6f}  (expect {(1 + r @ r) / 2:.6f})")
print(f"entropy (nats)    {von_neumann_entropy(rho):.6f}")

print("\n== Canonical convex decomposition ==")
for weight, ket in canonical_decomposition(rho):
    print(f"weight {weight:.4f}  ket {np.round(ket.ravel(), 4)}")

print("\n== A pure state in d = 3 sits on the sphere of radius sqrt(2) ==")
psi = np.array([[1], [1j], [0]], dtype=complex) / np.sqrt(2)
print(f"Bloch norm        {to_bloch(State.from_ket(psi)).norm:.9f}")

print("\n== Stern-Gerlach statistics ==")
apparatus = stern_gerlach([0, 0, 1])
p = outcome_distribution(apparatus, rho)
print(f"outcomes {apparatus.outcomes} with probabilities {np.round(p, 4)}")
mean, var = mean_variance(apparatus, rho)
print(f"mean {mean:.4f} (= r_z), variance {var:.4f}")

print("\n== Sharpness vs informational completeness ==")
print(f"basis observable sharp?         {is_sharp(apparatus)}")
print(f"basis observable IC?            {is_informationally_complete(apparatus)}")
ic = minimal_ic_povm(2)
print(f"minimal IC POVM: {len(ic.outcomes)} effects, sharp? {is_sharp(ic)}, "
      f"IC? {is_informationally_complete(ic)}")

print("\n== Photon counting with a lossy detector (cutoff 6) ==")
for eps in (1.0, 0.5):
    obs = photon_counting(eps, 6)
    two_photons = np.zeros(7)
    two_photons[2] = 1
    p = outcome_distribution(obs, State(np.diag(two_photons).astype(complex)))
    print(f"efficiency {eps}: P(n | 2 photons) = {np.round(p[:4], 4)} ...")
