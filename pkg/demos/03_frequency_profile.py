# %% [markdown]
# Frequency profiles
#
# The boundary mass, the energy and their ratio are sampled on a radii grid.
# For the homogeneous harmonic (x1 + i x2)^k the ratio is exactly k.

# %%
import numpy as np

from magucp import RadiiGrid, build_profile, catalog, make_rules
from magucp.functionals import profile_to_csv

rules = make_rules(2)
grid = RadiiGrid.uniform()

for k in (1, 3, 5):
    p = build_profile(catalog("harmonic2d", k=k), grid, rules)
    print(f"k={k}: frequency spans [{p.freq_vals.min():.12f}, {p.freq_vals.max():.12f}]")

# %% [markdown]
# The derivative formulas agree with 8th-order finite differences on the grid.

# %%
p = build_profile(catalog("rotational_gauss", b=1.0), grid, rules)
inner = slice(1, -1)
print("phi' gap", np.abs(p.phi_prime_formula_vals - p.phi_prime_fd_vals)[inner].max())
print("psi' gap", np.abs(p.psi_prime_formula_vals - p.psi_prime_fd_vals)[inner].max())

# %%
print("\n".join(profile_to_csv(p).splitlines()[:4]))
