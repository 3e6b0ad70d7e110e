# %% [markdown]
# Exact solutions of the magnetic Schroedinger equation
#
# A triple (w, A, phi) solves (i grad + A)^2 w = phi w. The catalog builds a
# few with closed-form derivatives; anything else can be assembled from the
# elementary fields and handed to `derive_phi`.

# %%
import numpy as np

from magucp import catalog, derive_phi, gauge_transform, mag_gradient, xi_matrix
from magucp.fields import bilinear_gauge, gaussian_field, rotational_potential

rng = np.random.default_rng(0)
x = rng.uniform(-0.7, 0.7, size=(5, 2))

# %%
t = catalog("rotational_gauss", b=1.0)
print(t.label)
print("phi at samples     ", np.round(t.potential_phi.value(x).real, 6))
print("4 - 3|x|^2         ", np.round(4 - 3 * np.sum(x * x, -1), 6))
print("max residual       ", t.residual(x).max())
print("sup |phi|, sup |Xi|", t.potential_phi.sup_norm, t.xi_frobenius_bound)

# %% [markdown]
# The field-strength matrix is antisymmetric and constant for a rotation.

# %%
print(xi_matrix(t.potential_a, x[:1])[0])

# %% [markdown]
# A gauge change multiplies the magnetic gradient by a phase and leaves the
# equation, and so the residual, untouched.

# %%
chi = bilinear_gauge(2)
g = gauge_transform(t, chi)
ratio = mag_gradient(g.omega, g.potential_a, x) / mag_gradient(t.omega, t.potential_a, x)
print("phase error", np.abs(ratio - np.exp(1j * chi.value(x))[:, None]).max())
print("residual   ", g.residual(x).max())

# %% [markdown]
# Potentials can be derived for any non-vanishing field. Zeros are refused,
# since phi would blow up there.

# %%
phi = derive_phi(gaussian_field(2), rotational_potential(0.3))
print("derived sup norm", phi.sup_norm)
