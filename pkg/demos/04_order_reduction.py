"""
Why CN-II exists: order reduction of CN-I
=========================================

For a source t^mu g(x) with mu < 0, CN-I uses the running integral P at the
grid points and loses accuracy: its error behaves like tau^(2 + mu). CN-II
uses the double integral instead and keeps second order.

On (0, 1) the slowest mode has eigenvalue about pi^2, and at T = 1 the
tau^(2 + mu) term is hidden behind the tau^2 term for any practical N. A short
horizon T = 0.01 makes the reduced order visible.
"""

from dataclasses import replace

from subcrank import harness
from subcrank.mesh_fem import assemble, build_mesh

system = assemble(build_mesh(1, 128))
for T in (1.0, 0.01):
    ex = replace(harness.EXAMPLES["1a"], id="1a-power", time_kind="power", T=T)
    print(f"T = {T}")
    for mu in (-0.5, -0.25):
        r1 = harness.run_study(ex, "cn1", 0.5, mu, system=system)
        r2 = harness.run_study(ex, "cn2", 0.5, mu, system=system)
        print(f"  mu={mu:+.2f}   CN-I rate {r1.summary_rate:.3f}   CN-II rate {r2.summary_rate:.3f}"
              f"   (2 + mu = {2 + mu})")
