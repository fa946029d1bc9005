"""Unpreconditioned GMRES needs O(N) iterations on the coupled system; with
the Laplacian preconditioner the count depends only on the atomistic region."""

from qcspectra import (
    ChainModel,
    RegionMask,
    random_mean_zero,
    solve_qcf_pgmres_energy,
    solve_qcf_pgmres_left,
    solve_qcf_plain,
)

phi = (1.0, -0.05, -0.02, -0.01)
print("   N  #A   plain  left  energy   gamma")
for n in (64, 128, 256):
    for n_a in (8, 32):
        model, mask = ChainModel(n, phi), RegionMask.block(n, n_a)
        f = random_mean_zero(n, seed=0)
        plain = solve_qcf_plain(model, mask, f)
        left = solve_qcf_pgmres_left(model, mask, f)
        energy = solve_qcf_pgmres_energy(model, mask, f)
        print(f"{n:4d} {n_a:3d}  {plain.iterations:6d} {left.iterations:5d} {energy.iterations:7d}"
              f"   {plain.extras['gamma']:.2e}")

env = plain.extras["envelope"]
print("plain residuals stay under the envelope:", bool((plain.residual_norms <= env).all()))
