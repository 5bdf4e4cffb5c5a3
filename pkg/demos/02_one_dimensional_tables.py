"""
Self-convergence in one space dimension
=======================================

There is no closed-form solution for these problems, so the error at N steps is
the L2 distance between the final-time solutions with N and N/2 steps. We
reproduce a row from each 1D benchmark on a mesh with h = 1/128.
"""

from subcrank import harness
from subcrank.mesh_fem import assemble, build_mesh

system = assemble(build_mesh(1, 128))
Ns = [80, 160, 320, 640]

# smooth-ish source (1 + t^0.5) x^(-1/4), CN-I
report = harness.run_study("1a", "cn1", alpha=0.5, mu=0.5, N_list=Ns, system=system)
print(report.to_markdown())

# singular source t^(-1/2) x^(-1/4) switched off at t = 1/2; CN-II handles it
report = harness.run_study("2a", "cn2", alpha=0.5, mu=-0.5, N_list=Ns, system=system)
print(report.to_markdown())

# nonsmooth initial datum, no source; both schemes agree exactly here
report = harness.run_study("2b", "cn2", alpha=0.5, N_list=Ns, system=system)
print(report.to_markdown())

# every pairwise rate, not just the fitted summary
print("pairwise rates:", [f"{r:.3f}" for r in report.rates[1:]])
print()
print(report.to_csv())
