"""Exact GP regression with trained hyperparameters.

Fits a 1-d GP to noisy sine samples by gradient ascent on the marginal
likelihood, then prints the posterior along a grid and draws a joint
sample from it.
"""

import numpy as np

from joco import numgrad as ng
from joco.adam import Adam
from joco.models import ExactGp, posterior_joint_sample
from joco.rng import CounterRng

rng = np.random.default_rng(3)
x_train = np.sort(rng.uniform(-3, 3, size=20)).reshape(-1, 1)
y_train = np.sin(x_train[:, 0]) + 0.05 * rng.standard_normal(20)

gp = ExactGp(input_dim=1)
gp.condition(x_train, y_train)

params = gp.hyp.params
optimizer = Adam(params, lr=0.05)
for step in range(120):
    value, _ = ng.value_and_grad(lambda lv: -1.0 * gp.mll(leaves=lv), params)
    optimizer.step()
    if step % 30 == 0:
        print(f"step {step:3d}: negative marginal likelihood = {value:.4f}")

print(f"learned lengthscale: {gp.hyp.lengthscales()[0]:.3f}")
print(f"learned noise var:   {gp.hyp.noise_var():.5f}")

gp.condition(x_train, y_train)  # clear the cached factor after training
grid = np.linspace(-3, 3, 9).reshape(-1, 1)
post = gp.posterior(grid)
print("\n  x      truth    mean     sd")
for xg, mean, var in zip(grid[:, 0], post.mean, np.diag(post.cov)):
    print(f"{xg:+.2f}   {np.sin(xg):+.3f}   {mean:+.3f}   {np.sqrt(max(var, 0)):.3f}")

draw = posterior_joint_sample(post, CounterRng(7, "demo"))
print("\none joint posterior draw:", np.round(draw, 3))
