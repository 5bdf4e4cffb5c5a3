"""
Grunwald-Letnikov weights and generating symbols
=================================================

The fractional difference behind both schemes is a convolution with the
weights sigma_j = (-1)^j binom(alpha, j). This script looks at them and at the
two generating symbols whose second-order consistency drives the analysis.
"""

import numpy as np

from subcrank import kernels

alpha = 0.5
w = kernels.gl_weights(alpha, 10)
print("sigma_0..sigma_10 for alpha = 0.5")
print(np.array2string(w.sigma, precision=6))

# the weights decay like j^(-1-alpha) and their partial sums tend to zero
big = kernels.gl_weights(alpha, 4096)
print("\nsigma_4096 * 4096^1.5 =", big.sigma[-1] * 4096**1.5)
print("sum of all 4097 weights =", big.partial_sums()[-1])

# generating function: sum sigma_j z^j = (1 - z)^alpha
z = 0.9
print(f"\nseries at z={z}:", kernels.gl_weights(alpha, 512).series(z), " exact:", (1 - z) ** alpha)

# with z = exp(-tau), omega(z)^alpha approximates 1 to second order in tau
print("\n tau        |1 - omega2^0.5|   |1 - omega_cn^alpha|")
for k in range(4, 11):
    tau = 2.0**-k
    z = np.exp(-tau)
    e2 = abs(1 - kernels.omega2(z, tau) ** 0.5)
    ecn = abs(1 - kernels.omega_cn(z, tau, alpha) ** alpha)
    print(f" 2^-{k:<2d}      {e2:.3e}          {ecn:.3e}")

print("\nGamma(2.5) =", kernels.gamma_fn(2.5), " 3 sqrt(pi)/4 =", 0.75 * np.sqrt(np.pi))
