"""Propagate a squeezed coherent state through loss and read off its moments."""

import math

from sqinterf import gaussian as g

state = g.vacuum(1)
state = g.displace(state, 0, math.sqrt(2) * 3.0, 0.0)  # alpha = 3
state = g.squeeze(state, 0, 1.15)
print("after squeezing, cov =\n", state.cov)

lossy = g.loss(state, 0, 0.9)
print("after 10% loss, cov =\n", lossy.cov)
print("purity det:", g.mode_purity_det(lossy, 0), "(0.25 for a pure state)")

for quad in ("cosine", "sine"):
    rep = g.homodyne_stats(lossy, 0, quad)
    print(f"{quad:>6} quadrature: mean {rep.mean:.4f}, variance {rep.variance:.4f}")

n = g.photon_stats(lossy, 0)
print(f"photon number: mean {n.mean:.4f}, variance {n.variance:.4f}")

# two-mode squeezed vacuum splits into a +r and a -r single-mode squeezer
tms = g.squeeze_two_mode(g.vacuum(2), 0, 1, 0.5)
print("two-mode total photons:", g.photon_stats_total(tms, [0, 1]).mean, "=", 2 * math.sinh(0.5) ** 2)
