"""How much Fisher information can a DP mixture family carry?

For the family theta*rho + (1-theta)*sigma the SLD Fisher information of any
(eps, delta)-DP pair is capped by a closed form, attained by the weakest pair.
"""

import math

import numpy as np

from qdpkit import PrivacyParams, StatePair, fisher_max, make_dp, sld_fisher, weakest_pair
from qdpkit.sampling import random_mixed

print(" eps    delta  theta  J_max      J(weakest)")
for eps, delta in ((math.log(2), 0.0), (1.0, 0.1), (3.0, 0.0)):
    p = PrivacyParams(eps, delta)
    for theta in (0.2, 0.5):
        print(f" {eps:4.2f}   {delta:4.2f}   {theta:3.1f}   {fisher_max(p, theta):9.6f}  {sld_fisher(weakest_pair(p), theta):9.6f}")

# A random DP pair stays below the cap.
p = PrivacyParams(1.0, 0.1)
rng = np.random.default_rng(3)
pair = make_dp(StatePair(random_mixed(3, rng), random_mixed(3, rng)), p)
print(f"\nrandom DP qutrit pair at theta=0.5: J = {sld_fisher(pair, 0.5):.4f} <= {fisher_max(p, 0.5):.4f}")

# With very large eps the cap approaches the unconstrained 1/(theta(1-theta)).
print(f"eps=20, theta=0.3: {fisher_max(PrivacyParams(20.0, 0.0), 0.3):.6f} vs {1 / 0.21:.6f}")
