# %% [markdown]
# Sphere and ball quadrature
#
# Every rule declares the polynomial degree it integrates exactly.

# %%
import math

import numpy as np

from magucp import make_rules
from magucp.quadrature import integrate_ball, integrate_sphere, make_ball_rule

for n in (2, 3):
    rules = make_rules(n)
    print(f"N={n}: {len(rules.sphere)} sphere nodes (degree {rules.sphere.exact_degree}),"
          f" ball degree {rules.ball.exact_degree}")

# %% [markdown]
# The integral of x1^2 x2^4 over the unit sphere has a Gamma-function closed form.

# %%
rules = make_rules(3, sphere_order=23)
exact = 2 * math.gamma(1.5) * math.gamma(2.5) * math.gamma(0.5) / math.gamma(4.5)
got = integrate_sphere(lambda x: x[..., 0] ** 2 * x[..., 1] ** 4, 1.0, rules.sphere)
print(got, exact, abs(got - exact))

# %% [markdown]
# For an entire integrand the error collapses as radial nodes are added.

# %%
exact = math.pi * (1 - math.exp(-1))
for nodes in (2, 4, 8, 16):
    rule = make_ball_rule(2, nodes, 40)
    err = abs(integrate_ball(lambda x: np.exp(-np.sum(x * x, -1)), 1.0, rule) - exact)
    print(f"{nodes:3d} radial nodes: error {err:.2e}")
