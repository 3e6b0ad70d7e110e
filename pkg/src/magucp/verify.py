"""Identity and inequality checks producing structured reports.

Equalities report the scaled residual ``|lhs - rhs| / (1 + |lhs| + |rhs|)``.
Inequalities ``lhs <= rhs`` report the relative excess ``max(0, lhs/rhs - 1)``
so that in both cases ``verdict == pass`` iff ``residual <= tolerance``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigurationError, InternalConsistencyError, VanishingBoundaryMassError
from .fields import ComplexField, ManufacturedTriple
from .functionals import (
    PHI_FLOOR,
    FrequencyProfile,
    _abs2,
    on_ball,
    on_sphere,
    phi_of_r,
    psi_of_r,
    volume_mass,
    boundary_flux,
    frequency,
)
from .quadrature import BallRule, RadiiGrid, Rules

IDENTITY_TOLERANCE = 1e-8
DERIVATIVE_TOLERANCE = 1e-6
COMPARISON_SLACK = 1e-10
FLUX_SLACK = 1e-10
DOUBLING_SLACK = 1e-8
DOUBLING_MARGIN = 1e-6
MONOTONE_SLACK = 1e-6
MASS_FLOOR = 1e-300
BETH_MARGIN = 1e-10

#: returned by :func:`vanishing_order` when the mass underflows on the grid
INFINITE_ORDER = math.inf

TAGS = {
    "rellich": "-Re int_dB (grad|w|^2 - iA|w|^2).x/r = -2 Psi",
    "phi_prime": "Phi' = (N-1) Phi/r + 2 Psi",
    "psi_prime": "Psi' = eight-term divergence expansion",
    "comparison": "int_B |w|^2 <= r Phi, r < r0",
    "frequency_monotonicity": "D' >= -tau D on {D > 1}",
    "boundary_flux_bound": "int_dB |nu.H_A w|^2 / Psi <= C*(phi)/r",
    "pohozaev_normal_only": "multiplier x/r . H_A w, normal boundary term only",
    "pohozaev_classical": "multiplier x/r . H_A w, full boundary term",
    "doubling_sphere": "Phi(2g) <= 2^(C+N-1) Phi(g)",
    "doubling_volume": "int_B2g |w|^2 <= 2^(C+N) int_Bg |w|^2",
    "doubling_volume_short_exponent": "int_B2g |w|^2 <= 2^(C+N-1) int_Bg |w|^2",
    "vanishing_order": "int_BR |w|^2 ~ R^(2m+N)",
}


class Verdict(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not-applicable"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class IdentityReport:
    identity_name: str
    radius: float
    lhs: float
    rhs: float
    residual: float
    tolerance: float
    verdict: Verdict
    triple_label: str = ""
    equation_tag: str = ""
    asserted: bool = True
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    @property
    def failed(self) -> bool:
        """True only for an asserted check that failed."""
        return self.asserted and self.verdict is Verdict.FAIL

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["verdict"] = self.verdict.value
        for key in ("radius", "lhs", "rhs", "residual", "tolerance"):
            val = rec[key]
            rec[key] = None if val is None or not math.isfinite(val) else float(val)
        return rec


def scaled_residual(lhs: float, rhs: float) -> float:
    return abs(lhs - rhs) / (1.0 + abs(lhs) + abs(rhs))


def relative_excess(lhs: float, rhs: float) -> float:
    """``max(0, lhs/rhs - 1)``; for ``rhs <= 0`` it is 0 when ``lhs <= rhs`` and inf otherwise."""
    if rhs > 0:
        return max(0.0, lhs / rhs - 1.0)
    return 0.0 if lhs <= rhs else math.inf


def _equality(name, triple_label, r, lhs, rhs, tol, asserted=True, note="") -> IdentityReport:
    res = scaled_residual(lhs, rhs)
    verdict = Verdict.PASS if res <= tol else Verdict.FAIL
    return IdentityReport(name, float(r), float(lhs), float(rhs), res, tol, verdict, triple_label, TAGS[name], asserted, note)


def _inequality(name, triple_label, r, lhs, rhs, slack, asserted=True, note="") -> IdentityReport:
    res = relative_excess(lhs, rhs)
    verdict = Verdict.PASS if res <= slack else Verdict.FAIL
    return IdentityReport(name, float(r), float(lhs), float(rhs), res, slack, verdict, triple_label, TAGS[name], asserted, note)


def _not_applicable(name, triple_label, r, note, lhs=math.nan, rhs=math.nan, tol=math.nan, asserted=True):
    return IdentityReport(
        name, float(r), lhs, rhs, math.nan, tol, Verdict.NOT_APPLICABLE, triple_label, TAGS[name], asserted, note
    )


# --------------------------------------------------------------------------
# identities at a single radius
# --------------------------------------------------------------------------


def rellich_check(triple: ManufacturedTriple, r: float, rules: Rules, tolerance: float = IDENTITY_TOLERANCE):
    """Boundary flux of ``|w|^2`` against ``-2 Psi``."""
    s = on_sphere(triple, r, rules)
    nu = s.x / float(r)
    grad_abs2 = 2.0 * (np.conj(s.w)[:, None] * s.grad).real
    vec = grad_abs2 - 1j * s.a * _abs2(s.w)[:, None]
    lhs = -s.integrate(np.sum(vec * nu, axis=-1).real)
    rhs = -2.0 * psi_of_r(triple, r, rules)
    return _equality("rellich", triple.label, r, lhs, rhs, tolerance)


def derivative_check(
    profile: FrequencyProfile,
    tolerance_phi: float = DERIVATIVE_TOLERANCE,
    tolerance_psi: float = DERIVATIVE_TOLERANCE,
) -> list[IdentityReport]:
    """Formula derivatives against grid finite differences at every interior radius."""
    if len(profile) < 3:
        raise ConfigurationError("derivative_check needs a profile with at least 3 radii")
    out = []
    for name, formula, fd, tol in (
        ("phi_prime", profile.phi_prime_formula_vals, profile.phi_prime_fd_vals, tolerance_phi),
        ("psi_prime", profile.psi_prime_formula_vals, profile.psi_prime_fd_vals, tolerance_psi),
    ):
        for i in range(1, len(profile) - 1):
            r = profile.radii[i]
            if profile.flagged[i] or not (math.isfinite(formula[i]) and math.isfinite(fd[i])):
                out.append(_not_applicable(name, profile.label, r, "vanishing boundary mass near this radius", tol=tol))
            else:
                out.append(_equality(name, profile.label, r, formula[i], fd[i], tol))
    return out


def comparison_radius(triple: ManufacturedTriple) -> float:
    """``r0 = min(1/2, sqrt((N-1)/||Re phi||_inf))``, or 1/2 when ``Re phi`` vanishes."""
    sup = triple.potential_phi.sup_norm_real_part
    if sup == 0:
        return 0.5
    return min(0.5, math.sqrt((triple.dimension - 1) / sup))


def comparison_check(triple: ManufacturedTriple, grid: RadiiGrid, rules: Rules) -> list[IdentityReport]:
    """``int_B |w|^2 <= r Phi(r)`` for every grid radius below ``r0``."""
    r0 = comparison_radius(triple)
    out = []
    for r in grid.radii:
        if r >= r0:
            out.append(_not_applicable("comparison", triple.label, r, f"r >= r0 = {r0!r}", tol=COMPARISON_SLACK))
            continue
        lhs = volume_mass(triple, r, rules)
        rhs = float(r) * phi_of_r(triple, r, rules)
        out.append(_inequality("comparison", triple.label, r, lhs, rhs, COMPARISON_SLACK))
    return out


def flux_bound_constants(triple: ManufacturedTriple, r: float) -> dict[str, float]:
    """``alpha``, ``beta`` and the resulting bound on ``flux / Psi``."""
    n = triple.dimension
    sup = triple.potential_phi.sup_norm
    sup_re = triple.potential_phi.sup_norm_real_part
    xi = triple.xi_frobenius_bound
    beta = 0.5 * (sup + xi)
    alpha = (n + 2) / (2.0 * r) + beta
    q = r * r * sup_re
    bound = ((1 - q) / (1 - 2 * q)) * (2 * alpha + 2 * r * r * beta / (1 - q))
    return {"alpha": alpha, "beta": beta, "bound": bound}


def boundary_flux_bound(triple: ManufacturedTriple, r: float, rules: Rules) -> IdentityReport:
    """Normal magnetic flux over ``Psi`` against the explicit bound; needs frequency > 1."""
    r = float(r)
    phi = phi_of_r(triple, r, rules)
    if not phi > PHI_FLOOR:
        return _not_applicable("boundary_flux_bound", triple.label, r, "vanishing boundary mass", tol=FLUX_SLACK)
    psi = psi_of_r(triple, r, rules)
    freq = r * psi / phi
    q = r * r * triple.potential_phi.sup_norm_real_part
    if not freq > 1:
        return _not_applicable("boundary_flux_bound", triple.label, r, f"frequency {freq:.6g} <= 1", tol=FLUX_SLACK)
    if not q < 0.5:
        return _not_applicable("boundary_flux_bound", triple.label, r, "r^2 ||Re phi|| >= 1/2", tol=FLUX_SLACK)
    if psi <= 0:
        raise InternalConsistencyError(f"Psi({r}) = {psi} <= 0 although the frequency exceeds 1")
    lhs = boundary_flux(triple, r, rules) / psi
    rhs = flux_bound_constants(triple, r)["bound"]
    return _inequality("boundary_flux_bound", triple.label, r, lhs, rhs, FLUX_SLACK)


def pohozaev_terms(triple: ManufacturedTriple, r: float, rules: Rules) -> dict[str, float]:
    """Integrals of the multiplier identity with ``H(x) = x/r``."""
    r = float(r)
    n = triple.dimension
    b = on_ball(triple, r, rules, jacobian=True)
    v2 = np.sum(_abs2(b.v), axis=-1)
    energy = b.integrate(v2)
    h = b.x / r
    im_term = b.integrate((b.phi * b.w * np.sum(h * np.conj(b.v), axis=-1)).imag)
    xi = b.jac - np.swapaxes(b.jac, -1, -2)
    xi_h = np.einsum("pjk,pk->pj", xi, h)
    xi_term = b.integrate((np.conj(b.w) * np.sum(b.v * xi_h, axis=-1)).real)

    s = on_sphere(triple, r, rules)
    nu = s.x / r
    normal = s.integrate(_abs2(np.sum(nu * s.v, axis=-1)))
    full = s.integrate(np.sum(_abs2(s.v), axis=-1))
    # div H = N/r and DH = I/r; H.nu = 1 on the sphere
    rhs = 0.5 * (n / r) * energy - im_term - energy / r - xi_term
    return {"normal": normal, "full": full, "rhs": rhs}


def pohozaev_residual(
    triple: ManufacturedTriple, r: float, rules: Rules, form: str = "classical", tolerance: float = IDENTITY_TOLERANCE
) -> IdentityReport:
    """Multiplier identity for ``H = x/r``.

    ``form="paper"`` uses the boundary term ``-1/2 int |nu.v|^2`` alone and is
    reported without being asserted. ``form="classical"`` uses the complete
    boundary term ``-int |nu.v|^2 + 1/2 int |v|^2``.
    """
    t = pohozaev_terms(triple, r, rules)
    if form == "paper":
        lhs = -0.5 * t["normal"]
        return _equality("pohozaev_normal_only", triple.label, r, lhs, t["rhs"], tolerance, asserted=False)
    if form == "classical":
        lhs = -t["normal"] + 0.5 * t["full"]
        return _equality("pohozaev_classical", triple.label, r, lhs, t["rhs"], tolerance)
    raise ConfigurationError(f"unknown Pohozaev form {form!r}; expected 'paper' or 'classical'")


# --------------------------------------------------------------------------
# profile-level checks
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TauEstimate:
    tau_hat: float
    beth_set: np.ndarray
    grid: RadiiGrid
    vacuous: bool
    monotone: bool
    label: str = ""
    weighted: np.ndarray = field(default_factory=lambda: np.empty(0))

    def to_report(self) -> IdentityReport:
        ok = math.isfinite(self.tau_hat) and self.monotone
        note = "no radius with frequency > 1" if self.vacuous else f"{len(self.beth_set)} radii with frequency > 1"
        return IdentityReport(
            "frequency_monotonicity",
            float(self.beth_set[-1]) if len(self.beth_set) else math.nan,
            self.tau_hat,
            0.0,
            0.0 if ok else math.inf,
            MONOTONE_SLACK,
            Verdict.PASS if ok else Verdict.FAIL,
            self.label,
            TAGS["frequency_monotonicity"],
            True,
            note,
        )


def frequency_monotonicity(profile: FrequencyProfile) -> TauEstimate:
    """Empirical ``tau`` with ``D' >= -tau D`` on the grid radii where ``D > 1``."""
    freq = profile.freq_vals
    dfreq = profile.freq_prime_fd_vals
    radii = profile.radii
    # D == 1 up to rounding must stay outside the strict set
    mask = np.isfinite(freq) & (freq > 1 + BETH_MARGIN)
    beth = radii[mask]
    if not np.any(mask):
        return TauEstimate(0.0, beth, profile.grid, True, True, profile.label)
    interior = mask.copy()
    interior[0] = interior[-1] = False
    rates = -dfreq[interior] / freq[interior]
    rates = rates[np.isfinite(rates)]
    tau = float(max(0.0, rates.max())) if rates.size else 0.0
    weighted = np.exp(tau * (1 + 1e-6) * beth) * freq[mask]
    # neighbouring samples of a constant frequency differ only by rounding
    monotone = bool(np.all(np.diff(weighted) >= -1e-12 * np.abs(weighted[1:])))
    return TauEstimate(tau, beth, profile.grid, False, monotone, profile.label, weighted)


def doubling_check(
    triple: ManufacturedTriple, gamma: float, grid: RadiiGrid, rules: Rules
) -> list[IdentityReport]:
    """Doubling inequalities on spheres and on balls.

    ``C = max(0, 2 max D) + margin`` with ``D`` sampled on the grid points of
    ``[gamma, 2 gamma]`` and at both endpoints. The ball version integrates the
    sphere version over ``(0, gamma]`` and therefore uses ``D`` on ``(0, 2 gamma]``
    and the exponent ``C + N``; the exponent ``C + N - 1`` is reported alongside
    without being asserted.
    """
    gamma = float(gamma)
    if not (0 < gamma and 2 * gamma < 1):
        raise ConfigurationError(f"need gamma and 2*gamma inside (0, 1), got gamma={gamma}")
    n = triple.dimension
    phi_g = phi_of_r(triple, gamma, rules)
    if not phi_g > PHI_FLOOR:
        raise VanishingBoundaryMassError(gamma, phi_g)
    radii = grid.radii
    window = [gamma, *radii[(radii >= gamma) & (radii <= 2 * gamma)], 2 * gamma]
    inner = [*radii[radii <= 2 * gamma], gamma, 2 * gamma]
    freq = {float(r): frequency(triple, r, rules) for r in inner}
    c = max(0.0, 2.0 * max(freq[float(r)] for r in window)) + DOUBLING_MARGIN
    lhs = phi_of_r(triple, 2 * gamma, rules)
    rhs = 2.0 ** (c + n - 1) * phi_g
    note = f"C={c!r}"
    sphere = _inequality("doubling_sphere", triple.label, gamma, lhs, rhs, DOUBLING_SLACK, note=note)

    c_vol = max(0.0, 2.0 * max(freq.values())) + DOUBLING_MARGIN
    m2 = volume_mass(triple, 2 * gamma, rules)
    m1 = volume_mass(triple, gamma, rules)
    volume = _inequality(
        "doubling_volume", triple.label, gamma, m2, 2.0 ** (c_vol + n) * m1, DOUBLING_SLACK, note=f"C={c_vol!r}"
    )
    short = _inequality(
        "doubling_volume_short_exponent", triple.label, gamma, m2, 2.0 ** (c + n - 1) * m1, DOUBLING_SLACK,
        asserted=False, note=note,
    )
    return [sphere, volume, short]


def vanishing_order(subject, radii: RadiiGrid, rule: BallRule | Rules) -> float:
    """Growth order ``m`` of ``|w| ~ R^m`` from the slope of ``log int_BR |w|^2``.

    Returns :data:`INFINITE_ORDER` if the mass is not resolvable (``<= 1e-300``)
    at some radius, the numerical signature of vanishing to infinite order.
    """
    if isinstance(subject, ManufacturedTriple):
        omega = subject.omega
    elif isinstance(subject, ComplexField):
        omega = subject
    else:
        raise ConfigurationError("vanishing_order expects a ManufacturedTriple or a ComplexField")
    r = np.asarray(radii.radii, dtype=float)
    if len(r) < 4 or np.any(r >= 0.5):
        raise ConfigurationError("vanishing_order needs at least 4 radii inside (0, 0.5)")
    ball = rule.ball if isinstance(rule, Rules) else rule
    if ball.dimension != omega.dimension:
        raise ConfigurationError("rule and field dimensions differ")
    pts = ball.nodes
    masses = []
    for radius in r:
        vals = np.abs(omega.value(radius * pts)) ** 2
        masses.append(float(radius**ball.dimension * np.sum(ball.weights * vals)))
    masses = np.array(masses)
    if np.any(~(masses > MASS_FLOOR)):
        return INFINITE_ORDER
    slope = np.polyfit(np.log(r), np.log(masses), 1)[0]
    return float((slope - ball.dimension) / 2.0)


def vanishing_report(label: str, order: float, radii: RadiiGrid) -> IdentityReport:
    note = "numerically infinite order" if math.isinf(order) else f"estimated order {order:.6g}"
    return IdentityReport(
        "vanishing_order",
        float(radii.radii[-1]),
        order,
        math.nan,
        math.nan,
        math.nan,
        Verdict.NOT_APPLICABLE if math.isinf(order) else Verdict.PASS,
        label,
        TAGS["vanishing_order"],
        False,
        note,
    )
