"""
Two-dimensional study on the unit square
========================================

Friedrichs-Keller triangulation with M = 64 cells per side. The spatial error
is frozen, so the self-convergence error measures the time discretization.
Pass M = 128 to see the finer-mesh magnitudes (about ten times slower).
"""

import sys

from subcrank import harness
from subcrank.mesh_fem import assemble, build_mesh

M = int(sys.argv[1]) if len(sys.argv) > 1 else 64
system = assemble(build_mesh(2, M))
print(f"{system.num_dofs} unknowns, h = 1/{M}")

for alpha in (0.1, 0.5, 0.9):
    rep = harness.run_study("3a", "cn2", alpha, mu=-0.5, system=system)
    print(f"alpha={alpha}  errors={[f'{e:.3e}' for e in rep.errors]}  rate={rep.summary_rate:.3f}"
          f"  ({rep.metadata['runtime_s']} s)")

rep = harness.run_study("3b", "cn2", 0.5, system=system)
print("\nhomogeneous problem, box initial datum")
print(rep.to_markdown())
