"""Instruments and measurement models: what happens to the system."""

import numpy as np

from qitools.instruments import (
    conditional_output,
    induced_observable,
    instrument_to_normal_memo,
    is_repeatable,
    luders,
    luders_disturbs,
    memo_to_instrument,
    no_information_no_disturbance_check,
    repeatable_instrument,
    trivial_instrument,
)
from qitools.linalg import unit_ket
from qitools.observables import Povm
from qitools.states import State

z_basis = Povm.from_basis([unit_ket([1, 0]), unit_ket([0, 1])])
x_basis = Povm.from_basis([unit_ket([1, 1]), unit_ket([1, -1])])
plus = State.from_ket(unit_ket([1, 1]))

print("== Lüders measurement of the z basis on |+> ==")
ins = luders(z_basis)
for outcome in ins.outcomes:
    out = conditional_output(ins, plus, outcome)
    print(f"outcome {outcome}: conditional state diag {np.round(np.diag(out.matrix).real, 3)}")
print(f"repeatable? {is_repeatable(ins)}")

print("\n== Trivial instruments forget the input and are never repeatable ==")
triv = trivial_instrument(z_basis, State.maximally_mixed(2))
print(f"repeatable? {is_repeatable(triv)}; induced observable still the z basis: "
      f"{np.allclose(induced_observable(triv).effect(0), z_basis.effect(0))}")

print("\n== Repeatability needs eigenvalue-1 effects ==")
print(f"unsharp POVM {{I/2, I/2}}: ", end="")
try:
    repeatable_instrument(Povm((0, 1), (np.eye(2) / 2, np.eye(2) / 2)))
except ValueError as err:
    print(err)

print("\n== Lüders disturbance (commutation is the whole story) ==")
print(f"z then x disturbed?  {luders_disturbs(z_basis, x_basis)}")
diag_b = Povm((0, 1), (np.diag([0.6, 0.1]).astype(complex), np.diag([0.4, 0.9]).astype(complex)))
print(f"z then diagonal unsharp observable disturbed? {luders_disturbs(z_basis, diag_b)}")

print("\n== No information without disturbance ==")
report = no_information_no_disturbance_check(luders(Povm.trivial(2, (0.3, 0.7))))
print(f"trivial observable:  {report}")
report = no_information_no_disturbance_check(luders(z_basis))
print(f"z-basis observable:  {report}")

print("\n== Every instrument comes from a normal measurement model ==")
memo = instrument_to_normal_memo(luders(z_basis))
print(f"probe dimension {memo.probe_dim}, probe pure? {memo.probe_state.is_pure()}")
rebuilt = memo_to_instrument(memo)
residual = max(
    np.abs(rebuilt.apply(x, plus) - luders(z_basis).apply(x, plus)).max()
    for x in z_basis.outcomes
)
print(f"induced instrument matches the original within {residual:.2e}")
