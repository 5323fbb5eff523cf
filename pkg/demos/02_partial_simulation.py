"""
Full versus partial simulation
==============================

The partial engine runs the algorithm until the local optimum, samples the
stay there from its exact law, then resumes. On small instances both engines
can be compared directly.
"""

import numpy as np

from jumpbench import JumpInstance, theory
from jumpbench.simulator import JumpPhaseModel, cross_validate, simulate

inst = JumpInstance(20, 4, 2)

# 500 runs per engine is enough to see agreement
cv = cross_validate("ea", inst, {"p": 0.1}, 500, seed=1)
print(cv.summary())

# the stay on the local optimum is geometric for the (1+1) EA
model = JumpPhaseModel("ea", inst, p=0.1)
mean, var = model.waiting_moments()
print("stay: mean", f"{mean:.4g}", "variance", f"{var:.4g}")

# large instances are cheap with the partial engine
big = JumpInstance(1000, 8, 4)
recs = simulate("ea", big, {"p": 4 / 1000}, range(200), engine="partial")
evals = np.array([r.evaluations for r in recs], dtype=float)
print("n=1000 mean", f"{evals.mean():.4g}", "1/F", f"{1 / theory.big_f(big, 0.004).value:.4g}")
