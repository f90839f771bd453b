"""Optimum working points, supersensitive ranges and the benefit of unbalancing the gains."""

from sqinterf import analytic as an
from sqinterf import metrology as mt
from sqinterf.schemes import Scheme, SchemeConfig

base = SchemeConfig()

for n in (1, 4, 10, 100):
    opt = mt.optimize_r1(n)
    print(f"N={n:>3}: best r1 {opt.r1:.4f}, dphi {opt.dphi_min:.5f}, bound {an.heisenberg_exact(n):.5f}")

print()
for scheme in (Scheme.SU2_HOMODYNE, Scheme.SU11_SEEDED_HOMODYNE, Scheme.SU11_SEEDED_DIRECT):
    res = mt.supersensitive_range(base.with_(scheme=scheme))
    intervals = ", ".join(f"[{lo:+.4f}, {hi:+.4f}]" for lo, hi in res.intervals)
    print(f"{scheme.value:<22} width {res.total_width:.4f}  {intervals}")

print("\nrecovery gain r2 for 99% loss suppression at eta=0.3:", mt.recovery_gain(base))

print("\nSU(1,1) direct detection as |r2| grows (eta=0.3):")
sweep = mt.SweepSpec("r2", mt.frange(1.15, 5.0, 0.5), base.with_(scheme=Scheme.SU11_SEEDED_DIRECT))
for row in mt.run_sweep(sweep):
    print(f"  |r2|={row.value:.2f}: dphi/snl {row.dphi_min_over_snl:.4f}, range {row.range_width:.4f}")

wp = mt.optimal_working_point(base.with_(scheme=Scheme.SU11_UNSEEDED_DIRECT, delta_n_d=100.0))
print(f"\nunseeded with 100 photons of detector noise: best phi {wp.phi0:.4f}, dphi {wp.dphi_min:.4f}")
