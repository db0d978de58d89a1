"""The most informative pair of states allowed by (eps, delta)-DP.

Builds the four-level diagonal pair, checks that it sits exactly on the DP
boundary, and compares its type-II error curve with the trade-off function.
"""

import math

import numpy as np

from qdpkit import PrivacyParams, certify_dp, f_tradeoff, hockey_stick_q, type2_error, weakest_pair

p = PrivacyParams(epsilon=math.log(2), delta=0.1)
pair = weakest_pair(p)
print("rho   diag:", np.round(np.diag(pair.rho.matrix).real, 4))
print("sigma diag:", np.round(np.diag(pair.sigma.matrix).real, 4))

# The tight delta at e^eps is exactly the delta we asked for.
cert = certify_dp(pair, p)
print(f"is DP: {cert.is_dp}, tight delta at eps: {cert.delta_star:.6f}")

# Hockey-stick profile: it decreases linearly until e^eps, then stays at delta.
for g in (1.0, 1.5, 2.0, 3.0):
    print(f"  E_{g:<4} = {hockey_stick_q(pair, g):.4f}")

# The best test against this pair meets the trade-off function everywhere.
alphas = np.linspace(0, 1, 11)
beta = type2_error(pair, alphas)
bound = f_tradeoff(p, alphas)
print("\n alpha   beta(pair)  f(alpha)")
for a, b, f in zip(alphas, beta, bound):
    print(f" {a:5.2f}   {b:9.6f}  {f:9.6f}")
