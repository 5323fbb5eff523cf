"""
Stagnation detection on a jump
==============================

SD-RLS* raises the flip strength after C(n, s) ln R failures and sweeps it
back down, so the expected time to cross is close to C(n, delta) / C(k, delta)
plus the cost of the smaller strengths.
"""

import numpy as np

from jumpbench import JumpInstance, theory
from jumpbench.algorithms import step_length
from jumpbench.simulator import JumpPhaseModel, simulate

n = 100
inst = JumpInstance(n, 12, 6)
R = float(n) ** 3

# iterations spent at each strength before moving on
print("step lengths:", [int(step_length(n, s, R)) for s in range(1, 7)])

lower, upper, tight = theory.sdrls_runtime_estimate(inst, R)
print("tight estimate", f"{tight.value:.5g}")

model = JumpPhaseModel("sdrls-star", inst, R=R)
print("exact expected stay", f"{model.expected_waiting():.5g}")

recs = simulate("sdrls-star", inst, {"R": R}, range(300), engine="partial")
evals = np.array([r.evaluations for r in recs], dtype=float)
print("simulated mean", f"{evals.mean():.5g}", "+-", f"{evals.std(ddof=1) / np.sqrt(evals.size):.2g}")
