"""Local privacy: channels, contraction and KL bounds.

A measure-and-prepare channel that outputs the weakest pair is (eps, delta)-LDP.
Its hockey-stick contraction meets the upper bound, while a depolarised
measurement sits strictly inside. The classical part bounds the KL divergence
after a randomised-response kernel.
"""

import math

from qdpkit import PrivacyParams, QuantumChannel, certify_ldp, empirical_contraction, eta_bounds, weakest_pair
from qdpkit.classical import kl_bound_ldp, randomized_response

p = PrivacyParams(1.0, 0.0)
w = weakest_pair(p)
tight = QuantumChannel.measure_prepare([w.rho, w.sigma])
soft = QuantumChannel.depolarized_measurement(2, 0.3)

for name, ch in (("weakest-pair channel", tight), ("depolarised measurement", soft)):
    est = certify_ldp(ch, p, trials=100)
    print(f"{name}: sampled worst delta {est.worst_delta:.3e}, LDP: {est.certified_up_to_sampling}")

print("\n gamma  lower    upper    tight    soft")
for g in (1.0, 1.5, 2.0, 2.5):
    lo, up = eta_bounds(p, g)
    print(f" {g:4.1f}   {lo:.4f}   {up:.4f}   {empirical_contraction(tight, g, 100):.4f}   {empirical_contraction(soft, g, 100):.4f}")

eps = 0.8
K = randomized_response(3, eps)
P, Q = [0.6, 0.3, 0.1], [0.2, 0.3, 0.5]
b = kl_bound_ldp(K, P, Q, eps, 0.0)
print(f"\nrandomised response, eps={eps}: KL after the kernel {b.actual:.4f}, bound {b.bound_main:.4f}")
print(f"bound equals TV * eps * tanh(eps/2): {b.leading_term:.4f} ({0.5 * 0.8 * eps * math.tanh(eps / 2):.4f})")
