"""Compare the closed-form sensitivity of each interferometer layout at one working point."""

from sqinterf import analytic as an
from sqinterf import metrology as mt
from sqinterf.schemes import Scheme, SchemeConfig

base = SchemeConfig()  # r1=1.15, r2=-3, mu=0.9, eta=0.3, alpha=100
print("shot-noise limit:", an.snl_for(base))

layouts = {
    Scheme.SU2_HOMODYNE: base,
    Scheme.SU11_SEEDED_HOMODYNE: base.with_(scheme=Scheme.SU11_SEEDED_HOMODYNE),
    Scheme.SU11_SEEDED_DIRECT: base.with_(scheme=Scheme.SU11_SEEDED_DIRECT, psi=0.2),
    Scheme.SU11_UNSEEDED_DIRECT: base.with_(scheme=Scheme.SU11_UNSEEDED_DIRECT),
    Scheme.SU11_NONDEGENERATE: base.with_(scheme=Scheme.SU11_NONDEGENERATE, seed_split=(70.0, 30.0)),
}
phi = 0.1
print(f"\n{'layout':<24}{'closed form':>14}{'numeric':>14}")
for scheme, cfg in layouts.items():
    closed = an.closed_form(cfg, phi).dphi
    numeric = mt.numeric_sensitivity(cfg, phi, linearized=scheme is Scheme.SU11_SEEDED_DIRECT)
    print(f"{scheme.value:<24}{closed:>14.6g}{numeric:>14.6g}")

# the unseeded layout carries an extra interference term missing from the printed variance
cfg = layouts[Scheme.SU11_UNSEEDED_DIRECT]
print("\nunseeded, phi=0.3:")
print("  with cross term   ", an.su11_direct_unseeded_exact(cfg, 0.3).dphi)
print("  printed variance  ", an.su11_direct_unseeded_exact(cfg, 0.3, printed=True).dphi)
print("  Gaussian engine   ", mt.numeric_sensitivity(cfg, 0.3))
