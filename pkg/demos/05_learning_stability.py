"""A private learner cannot memorise its training data.

A toy learner maps n training bits to a qubit state depending only on how many
ones it saw. The Holevo information between data and output, measured under
random priors, stays below the stability bound in each privacy regime.
"""

import numpy as np

from qdpkit.stability import ToyLearner, audit_toy_learner

rng = np.random.default_rng(11)
for n in (2, 4):
    learner = ToyLearner(n, contrast=0.6)
    priors = [rng.dirichlet(np.ones(2**n)) for _ in range(10)]
    for eps in (0.5 / n, 0.8, 2.0):
        res = audit_toy_learner(learner, eps, priors)
        r = res.report
        print(
            f"n={n} eps={eps:5.3f} regime={r.regime:<8} delta={res.delta:.2e} "
            f"holevo<={max(res.holevo_values):.4f} bound={r.bound:.4f} ok={res.ok}"
        )
