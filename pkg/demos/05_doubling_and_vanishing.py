# %% [markdown]
# Doubling and vanishing order
#
# A bounded frequency gives Phi(2g) <= 2^(C + N - 1) Phi(g) with C = 2 max D.
# For z^k the bound is attained.

# %%
import numpy as np

from magucp import RadiiGrid, catalog, make_rules
from magucp.fields import flat_field
from magucp.verify import doubling_check, vanishing_order

rules = make_rules(2)
grid = RadiiGrid.uniform()
for k in (1, 2, 3):
    sphere, volume, short = doubling_check(catalog("harmonic2d", k=k), 0.2, grid, rules)
    print(f"k={k}: ratio {sphere.lhs / sphere.rhs:.9f}; volume form {volume.verdict.value},"
          f" exponent C+N-1 on balls {short.verdict.value} (not asserted)")

# %% [markdown]
# The growth of the ball mass reveals how fast a field vanishes at the origin.
# e^(-1/|x|^2) vanishes faster than any power and underflows.

# %%
radii = RadiiGrid.from_values(np.arange(1, 10) * 0.05)
for k in range(1, 6):
    print(f"z^{k}: order {vanishing_order(catalog('harmonic2d', k=k), radii, rules):.10f}")
print("flat:", vanishing_order(flat_field(2), radii, rules))
