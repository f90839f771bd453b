"""Cross-check the Gaussian engine against a truncated number-basis simulation."""

from sqinterf import fock

steps = [("displace", 0, 0.8, -0.4), ("squeeze", 0, 0.35), ("rotate", 0, 0.7), ("loss", 0, 0.8)]
state = fock.run_fock_adaptive(steps)
moments = fock.fock_moments(state)
reference = fock.run_gaussian(steps)
print("truncation:", state.dims, "leakage:", state.leakage())
print("Fock cov:\n", moments.cov)
print("engine cov:\n", reference.cov)
print("largest scaled discrepancy:", fock.moment_error(moments, reference))

report = fock.oracle_suite(n_cases=50)
print(f"\n{len(report.cases)} random chains, all passed: {report.passed}, worst {report.max_error:.2e}")

try:
    fock.fock_squeeze(fock.fock_vacuum(1, 12), 1.2)
except fock.FockTruncationError as exc:
    print("\ntoo small a basis is refused:", exc)
