"""Telling two states apart: minimum error vs unambiguous schemes."""

import numpy as np

from qitools.discrimination import (
    fidelity,
    helstrom,
    idp_bound,
    trace_distance,
    unambiguous_mixture_povm,
    unambiguous_two_pure,
)
from qitools.linalg import unit_ket
from qitools.states import State

# Two pure states with overlap 1/2.
psi1 = unit_ket([1, 0])
psi2 = unit_ket([0.5, np.sqrt(0.75)])
rho1, rho2 = State.from_ket(psi1), State.from_ket(psi2)

print("== Distances ==")
print(f"trace distance   {trace_distance(rho1, rho2):.6f}")
print(f"fidelity         {fidelity(rho1, rho2):.6f}")

print("\n== Minimum-error (Helstrom) measurement ==")
res = helstrom(rho1, rho2, eta=0.5)
print(f"p_error          {res.p_error:.9f}  (closed form {(1 - np.sqrt(3) / 2) / 2:.9f})")

print("\n== Optimal unambiguous discrimination ==")
res = unambiguous_two_pure(psi1, psi2)
print(f"p_success        {res.p_success:.6f}  (= 1 - overlap)")
print(f"no-error checks  tr[rho2 D1] = {np.trace(rho2.matrix @ res.povm.effect('1')).real:.2e}, "
      f"tr[rho1 D2] = {np.trace(rho1.matrix @ res.povm.effect('2')).real:.2e}")

print("\n== The simpler mixture strategy is strictly weaker ==")
res = unambiguous_mixture_povm(psi1, psi2, q=0.5)
print(f"p_success        {res.p_success:.6f}  (= (1 - overlap^2)/2)")
print(f"upper bound      {idp_bound(rho1, rho2):.6f}   (both schemes respect it)")
