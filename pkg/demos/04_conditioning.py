"""How the eigenbasis conditioning behaves as the chain grows, with and
without the Laplacian preconditioner."""

from qcspectra import (
    ChainModel,
    RegionMask,
    build_vqcf_fr,
    prec_eigen_analysis,
    u22_bound,
    u22_stability,
)
from qcspectra.experiments import emit_slope_fit

phi = (1.0, -0.05, -0.02, -0.01)
sizes = (32, 64, 128, 256)
rows = []
for n in sizes:
    model, mask = ChainModel(n, phi), RegionMask.block(n, n // 4)
    v = build_vqcf_fr(model, mask)
    p = prec_eigen_analysis(model, mask)
    rows.append((n, v.cond_eigenbasis, p.metrics["cond_leftright"], p.metrics["cond_left"],
                 u22_stability(model, mask)))
    print(f"N={n:4d}  cond(V)={rows[-1][1]:.3f}  leftright={rows[-1][2]:10.1f}  "
          f"left={rows[-1][3]:12.1f}  u22={rows[-1][4]:.4f}")

print("bound on cond(V):", v.metrics["cond_bound"], " bound on u22:", u22_bound(model))
for k, name in ((1, "cond(V)"), (2, "leftright basis"), (3, "left basis")):
    slope, r2 = emit_slope_fit(sizes, [r[k] for r in rows])
    print(f"log-log slope of {name}: {slope:.3f} (r^2 = {r2:.4f})")
