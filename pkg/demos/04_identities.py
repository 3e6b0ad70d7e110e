# %% [markdown]
# Integral identities at a single radius
#
# Each check returns an IdentityReport with both sides, a residual and a verdict.

# %%
from magucp import catalog, make_rules
from magucp.verify import boundary_flux_bound, comparison_check, pohozaev_residual, rellich_check
from magucp.quadrature import RadiiGrid

rules = make_rules(2)
t = catalog("rotational_gauss", b=1.0)
for r in (0.25, 0.5, 0.75):
    rep = rellich_check(t, r, rules)
    print(f"rellich r={r}: lhs={rep.lhs:+.15f} rhs={rep.rhs:+.15f} {rep.verdict.value}")

# %% [markdown]
# The multiplier identity with H = x/r needs the tangential boundary term.
# Without it the residual for a harmonic z^k is pi k^2 r^(2k-1).

# %%
h = catalog("harmonic2d", k=3)
for form in ("classical", "paper"):
    rep = pohozaev_residual(h, 0.5, rules, form)
    print(f"{form:9s} lhs={rep.lhs:+.6f} rhs={rep.rhs:+.6f} asserted={rep.asserted} {rep.verdict.value}")

# %% [markdown]
# The explicit bound on the normal flux holds for small frequencies and
# breaks once the frequency exceeds (N + 2) / 2.

# %%
for k in (2, 6):
    rep = boundary_flux_bound(catalog("harmonic2d", k=k), 0.5, rules)
    print(f"k={k}: flux/Psi = {rep.lhs:.6f}, bound = {rep.rhs:.6f}, {rep.verdict.value}")

# %%
reps = comparison_check(t, RadiiGrid.uniform(), rules)
print({v: sum(r.verdict.value == v for r in reps) for v in ("pass", "fail", "not-applicable")})
