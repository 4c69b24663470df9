"""Channel representations, dilations and structure checks."""

import numpy as np

from qitools.channels import (
    apply,
    certify,
    conjugate,
    contraction_factor,
    dilation_apply,
    fixed_point,
    from_choi,
    is_entanglement_breaking,
    make,
    qubit_cp_check,
    qubit_normal_form,
    stinespring,
    to_affine,
    to_chi,
    to_choi,
    transposition_map,
)
from qitools.rand import random_density
from qitools.states import State

dep = make("depolarizing", d=2, p=0.3)
rho = random_density(2, np.random.default_rng(1))

print("== Four faces of the depolarizing channel ==")
print(f"certification     {certify(dep)}")
print(f"chi diagonal      {np.round(np.diag(to_chi(dep).matrix).real, 4)}")
aff = to_affine(dep)
print(f"affine block      diag{tuple(np.round(np.diag(aff.T), 3))}, shift {aff.t}")
back = from_choi(to_choi(dep))
print(f"Kraus<->Choi residual {np.abs(apply(dep, rho) - apply(back, rho)).max():.2e}")

print("\n== Transposition is positive but not completely positive ==")
rep = certify(transposition_map(2))
print(f"cp={rep['cp']}, Choi minimum eigenvalue {rep['choi_min_eig']:+.3f}  (= -1/d)")

print("\n== Stinespring dilation of the full depolarizing channel ==")
full = make("depolarizing", d=2, p=1.0)
env_dim, u, env_ket = stinespring(full)
replay = dilation_apply(env_dim, u, env_ket, rho)
print(f"environment dim {env_dim}, replay residual {np.abs(replay - np.eye(2) / 2).max():.2e}")
print(f"conjugate channel output on the environment:\n{np.round(apply(conjugate(full), rho), 4)}")

print("\n== Qubit normal form ==")
ch = make("pauli", q=(0.55, 0.2, 0.15, 0.1))
u, lam, t, v = qubit_normal_form(ch)
print(f"singular values {np.round(np.abs(lam), 4)}, signs give det T = {np.prod(lam):.4f}")

print("\n== CP region of diagonal qubit maps ==")
for lmbda in ((1, 1, 1), (-1, -1, -1), (-1 / 3, -1 / 3, -1 / 3)):
    rep = qubit_cp_check(lmbda, (0, 0, 0))
    print(f"lambda {lmbda}: cp={rep['cp']} (Choi min eig {rep['choi_min_eig']:+.4f})")

print("\n== Contraction and fixed points ==")
print(f"depolarizing(0.3) contraction factor ~ {contraction_factor(dep, 30, rng=0):.6f}")
print(f"fixed point:\n{np.round(fixed_point(dep, State(rho)).matrix, 6)}")

print("\n== Entanglement breaking threshold (qubit depolarizing: p >= 2/3) ==")
for p in (0.5, 0.7):
    print(f"p={p}: {is_entanglement_breaking(make('depolarizing', d=2, p=p))['verdict']}")
