"""The composite benchmark problems.

Every problem returns both the intermediate output vector y and the
scalar reward f, with f always recomputable from y alone. This script
prints the dimensions, known reference points, and verifies the composite
structure on random inputs.
"""

import numpy as np

from joco.problems import get_problem, problem_names

rng = np.random.default_rng(0)

print(f"{'problem':15s} {'d':>4s} {'m':>6s}  domain")
for name in problem_names():
    p = get_problem(name)
    print(f"{p.name:15s} {p.d:4d} {p.m:6d}  [{p.lower[0]:g}, {p.upper[0]:g}]^{p.d}")

print("\nreference points:")
rosen = get_problem("rosenbrock")
print("  rosenbrock at all-ones (global max):", rosen.evaluate(np.ones(10))[1])
env = get_problem("environmental")
print("  environmental at true parameters:  ", env.evaluate(np.full(15, 0.5))[1])
rover = get_problem("rover")
t = np.linspace(0.05, 0.95, 20)
straight = np.stack([t, t], axis=1).reshape(-1)
print("  rover on the straight diagonal:    ", rover.evaluate(straight)[1])

print("\ncomposite consistency on random points:")
for name in problem_names():
    p = get_problem(name)
    worst = 0.0
    for _ in range(100):
        x = p.lower + rng.random(p.d) * (p.upper - p.lower)
        y, f = p.evaluate(x)
        worst = max(worst, abs(f - p.reward(y)))
    print(f"  {name:15s} max |f - g(y)| = {worst:.2e}")
