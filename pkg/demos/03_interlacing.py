"""Real spectrum, interlacing between continuum and atomistic eigenvalues, and
the eigenvalue window, for a third-neighbour chain."""

import numpy as np

from qcspectra import ChainModel, RegionMask, eigenvalue_window_check, interlacing_check

model = ChainModel(48, (1.0, -0.1, -0.05))
mask = RegionMask.fraction(48, 0.5, seed=0)

rep = interlacing_check(model, mask)
lam, lam_c, lam_a = rep.eigenvalues, rep.metrics["lambda_c"], rep.metrics["lambda_a"]
print("largest imaginary part:", rep.max_imag)
print(" j   continuum       qcf      atomistic")
for j in np.linspace(0, 47, 8, dtype=int):
    print(f"{j:2d}  {lam_c[j]:9.5f}  {lam[j]:9.5f}  {lam_a[j]:9.5f}")
print("interlacing holds:", rep.passed)

win = eigenvalue_window_check(model, mask)
lo, hi = win.metrics["window"]
print(f"window [{lo:.5f}, {hi:.5f}] contains lambda_2..lambda_N: {win.passed}")
