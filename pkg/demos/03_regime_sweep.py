"""
A small regime sweep
====================

Runs the default roster on the k = delta = 4 regime and writes a CSV plus a
gnuplot data file. Use more replications for smoother curves.
"""

from jumpbench.experiments import ExperimentPlan, emit_results, get_regime, run_plan

regime = get_regime("classic4")
plan = ExperimentPlan(regime, replications=100, seed=42, n_grid=(60, 80, 100))
stats = run_plan(plan)

for s in stats:
    print(f"{s.series:<24} n={s.n:<4} mean={s.mean_evals:.4g}  theory={s.theory_tight:.4g}")

for path in emit_results(stats, "demo-out"):
    print("wrote", path)

# in gnuplot:
#   set logscale y
#   plot for [i=0:5] "demo-out/results_classic4.tsv" index i using 1:2 with linespoints
