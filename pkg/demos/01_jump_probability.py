"""
Crossing the valley in one mutation
===================================

F(p) is the chance that standard bit mutation at rate p takes the local
optimum of Jump_{k,delta} past the valley.
"""

import numpy as np

from jumpbench import JumpInstance, theory

inst = JumpInstance(100, 6, 4)
print(inst)

# scan rates around delta/n; the peak sits close to delta/n
rates = np.linspace(0.005, 0.1, 20)
for p in rates:
    f = theory.big_f(inst, p)
    print(f"p={p:.4f}  F={f.value:.3e}  1/F={1 / f.value:.3e}")

# the optimal rate next to its asymptotic form
exact, asym = theory.optimal_rate_runtime(inst)
print("1/F(delta/n) =", f"{exact.value:.4g}", " asymptotic =", f"{asym.value:.4g}")

# runtime bounds for the (1+1) EA at three standard rates
for p in (1 / inst.n, inst.delta / (2 * inst.n), inst.delta / inst.n):
    lo, hi = theory.ea_runtime_bounds(inst, p)
    print(f"p={p:.3f}  lower={lo.value:.4g}  upper={hi.value:.4g}")

# missing delta/n by half costs at least a factor e when delta = 8
pen = theory.rate_deviation_penalty(JumpInstance(2000, 8, 8), 0.5)
print("penalty at eps=0.5:", f"{pen.ratio_minus:.3f}", ">=", f"{pen.bound_minus:.3f}")
