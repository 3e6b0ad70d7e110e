"""Radial functionals of a solution on concentric spheres and balls.

For a triple ``(w, A, phi)`` and ``v = i grad(w) + A w``:

* ``Phi(r)``  = integral of ``|w|^2`` over the sphere of radius ``r``
* ``Psi(r)``  = integral of ``|v|^2 - Re(phi) |w|^2`` over the ball
* frequency  = ``r Psi / Phi``

plus the closed-form expressions of ``Phi'`` and ``Psi'`` in terms of
volume and boundary integrals, which the verification layer compares against
finite differences.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, EvaluationError, InternalConsistencyError, VanishingBoundaryMassError
from .fields import ManufacturedTriple
from .quadrature import BallRule, RadiiGrid, Rules, SphereRule

PHI_FLOOR = 1e-30
DEFAULT_FD_ORDER = 8

CSV_COLUMNS = (
    "r",
    "phi",
    "psi",
    "freq",
    "phi_prime_formula",
    "phi_prime_fd",
    "psi_prime_formula",
    "psi_prime_fd",
    "volume_mass",
    "boundary_flux",
)


# --------------------------------------------------------------------------
# sampling helpers
# --------------------------------------------------------------------------


@dataclass
class _Samples:
    x: np.ndarray
    weights: np.ndarray
    w: np.ndarray
    grad: np.ndarray
    a: np.ndarray
    phi: np.ndarray
    v: np.ndarray
    jac: np.ndarray | None = None

    def integrate(self, vals) -> float:
        vals = np.asarray(vals)
        if not np.all(np.isfinite(vals)):
            idx = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise EvaluationError(f"non-finite integrand at node {idx} x={self.x[idx].tolist()}")
        return float(np.real(np.sum(self.weights * vals)))


def _sample(triple: ManufacturedTriple, x: np.ndarray, weights: np.ndarray, jacobian=False) -> _Samples:
    w = np.asarray(triple.omega.value(x), dtype=complex)
    grad = np.asarray(triple.omega.gradient(x), dtype=complex)
    a = np.asarray(triple.potential_a.value(x), dtype=float)
    phi = np.broadcast_to(np.asarray(triple.potential_phi.value(x), dtype=complex), w.shape)
    v = 1j * grad + a * w[:, None]
    jac = np.asarray(triple.potential_a.jacobian(x), dtype=float) if jacobian else None
    return _Samples(x, weights, w, grad, a, phi, v, jac)


def _sphere_rule(rules) -> SphereRule:
    return rules.sphere if isinstance(rules, Rules) else rules


def _ball_rule(rules) -> BallRule:
    return rules.ball if isinstance(rules, Rules) else rules


def _check(triple: ManufacturedTriple, rule) -> None:
    if rule.dimension != triple.dimension:
        raise ConfigurationError(
            f"rule is {rule.dimension}-D but triple {triple.label!r} is {triple.dimension}-D"
        )


def _check_open_radius(r) -> float:
    r = float(r)
    if not (0 < r < 1):
        raise ConfigurationError(f"radius must lie in (0, 1), got {r}")
    return r


def on_sphere(triple, r, rules, jacobian=False) -> _Samples:
    rule = _sphere_rule(rules)
    _check(triple, rule)
    r = _check_open_radius(r)
    return _sample(triple, r * rule.nodes, r ** (rule.dimension - 1) * rule.weights, jacobian)


def on_ball(triple, r, rules, jacobian=False) -> _Samples:
    rule = _ball_rule(rules)
    _check(triple, rule)
    r = _check_open_radius(r)
    return _sample(triple, r * rule.nodes, r**rule.dimension * rule.weights, jacobian)


def _abs2(z):
    return (z * np.conj(z)).real


# --------------------------------------------------------------------------
# scalar functionals
# --------------------------------------------------------------------------


def phi_of_r(triple: ManufacturedTriple, r: float, rule) -> float:
    """Boundary mass: integral of ``|w|^2`` over the sphere of radius ``r``."""
    s = on_sphere(triple, r, rule)
    val = s.integrate(_abs2(s.w))
    if val < -1e-14:
        raise InternalConsistencyError(f"negative boundary mass {val!r}: quadrature weights are corrupt")
    return max(val, 0.0)


def psi_of_r(triple: ManufacturedTriple, r: float, rule) -> float:
    """Energy ``int_B (|v|^2 - Re(phi)|w|^2)``; may be negative."""
    s = on_ball(triple, r, rule)
    return s.integrate(np.sum(_abs2(s.v), axis=-1) - s.phi.real * _abs2(s.w))


def volume_mass(triple: ManufacturedTriple, r: float, rule) -> float:
    """``int_B |w|^2`` over the ball of radius ``r``."""
    s = on_ball(triple, r, rule)
    return max(s.integrate(_abs2(s.w)), 0.0)


def boundary_flux(triple: ManufacturedTriple, r: float, rule) -> float:
    """Integral over the sphere of ``|nu . v|^2`` with ``nu = x/r``."""
    s = on_sphere(triple, r, rule)
    nu = s.x / float(r)
    return s.integrate(_abs2(np.sum(nu * s.v, axis=-1)))


def frequency(triple: ManufacturedTriple, r: float, rules: Rules, floor: float = PHI_FLOOR) -> float:
    phi = phi_of_r(triple, r, rules)
    if not phi > floor:
        raise VanishingBoundaryMassError(r, phi)
    return float(r) * psi_of_r(triple, r, rules) / phi


def phi_prime_formula(triple: ManufacturedTriple, r: float, rules: Rules) -> float:
    """``(N-1) Phi/r + 2 Psi``."""
    n = triple.dimension
    return (n - 1) * phi_of_r(triple, r, rules) / float(r) + 2.0 * psi_of_r(triple, r, rules)


def _radial_pass(triple: ManufacturedTriple, r: float, rules: Rules) -> dict[str, float]:
    """One ball pass and one sphere pass producing every radial quantity at ``r``."""
    r = float(r)
    n = triple.dimension
    b = on_ball(triple, r, rules, jacobian=True)
    abs_w2 = _abs2(b.w)
    psi = b.integrate(np.sum(_abs2(b.v), axis=-1) - b.phi.real * abs_w2)
    mass = b.integrate(abs_w2)
    mass_phi_re = b.integrate(b.phi.real * abs_w2)
    a_dot_v = b.integrate((b.w * np.sum(b.a * np.conj(b.v), axis=-1)).real)
    x_dot_grad = np.sum(b.x * b.grad, axis=-1)
    radial_phi = b.integrate((x_dot_grad * np.conj(b.phi * b.w)).real)
    xda = np.einsum("pj,pjk->pk", b.x, b.jac)
    jac_term = b.integrate((b.w * np.sum(xda * np.conj(b.v), axis=-1)).real)

    s = on_sphere(triple, r, rules)
    nu = s.x / r
    nu_v = np.sum(nu * s.v, axis=-1)
    nu_a = np.sum(nu * s.a, axis=-1)
    phi = s.integrate(_abs2(s.w))
    flux = s.integrate(_abs2(nu_v))
    bdry_a = s.integrate((nu_a * s.w * np.conj(nu_v)).real)
    bdry_phi = s.integrate(s.phi.real * _abs2(s.w))
    if phi < -1e-14:
        raise InternalConsistencyError(f"negative boundary mass {phi!r}: quadrature weights are corrupt")
    return {
        "phi": max(phi, 0.0),
        "psi": psi,
        "volume_mass": max(mass, 0.0),
        "boundary_flux": flux,
        "terms": {
            "psi": (n - 2) * psi / r,
            "mass_phi_re": (n - 2) * mass_phi_re / r,
            "potential": 2.0 * a_dot_v / r,
            "radial_phi": 2.0 * radial_phi / r,
            "jacobian": 2.0 * jac_term / r,
            "flux": 2.0 * flux,
            "boundary_potential": -2.0 * bdry_a,
            "boundary_phi": -bdry_phi,
        },
    }


def psi_prime_terms(triple: ManufacturedTriple, r: float, rules: Rules) -> dict[str, float]:
    """The eight contributions whose sum is ``Psi'(r)``.

    The Jacobian term is ``sum_{j,k} x_j (d_j a_k) w conj(v_k)``.
    """
    return _radial_pass(triple, r, rules)["terms"]


def psi_prime_formula(triple: ManufacturedTriple, r: float, rules: Rules) -> float:
    return float(sum(psi_prime_terms(triple, r, rules).values()))


# --------------------------------------------------------------------------
# finite differences
# --------------------------------------------------------------------------


def fd_weights(x0: float, xs, m: int = 1) -> np.ndarray:
    """Fornberg weights for the ``m``-th derivative at ``x0`` from values at ``xs``."""
    xs = np.asarray(xs, dtype=float)
    n = len(xs)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = xs[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def grid_derivative(values, radii, order: int = DEFAULT_FD_ORDER) -> np.ndarray:
    """First derivative on a grid using ``order + 1``-point stencils.

    Stencils are centred in the interior and shift to one-sided windows near
    the ends. Entries whose stencil touches a NaN are NaN; a single-point grid
    gives NaN.
    """
    values = np.asarray(values, dtype=float)
    radii = np.asarray(radii, dtype=float)
    n = len(radii)
    out = np.full(n, np.nan)
    if n < 2:
        return out
    width = min(order + 1, n)
    half = width // 2
    for i in range(n):
        lo = min(max(i - half, 0), n - width)
        idx = slice(lo, lo + width)
        window = values[idx]
        if np.all(np.isfinite(window)):
            out[i] = float(fd_weights(radii[i], radii[idx]) @ window)
    return out


# --------------------------------------------------------------------------
# profiles
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FrequencyProfile:
    """Functionals sampled on a radii grid.

    ``flagged[i]`` marks radii where the boundary mass is below the floor; the
    frequency there is NaN.
    """

    label: str
    dimension: int
    grid: RadiiGrid
    phi_vals: np.ndarray
    psi_vals: np.ndarray
    freq_vals: np.ndarray
    phi_prime_formula_vals: np.ndarray
    psi_prime_formula_vals: np.ndarray
    phi_prime_fd_vals: np.ndarray
    psi_prime_fd_vals: np.ndarray
    freq_prime_fd_vals: np.ndarray
    volume_mass_vals: np.ndarray
    boundary_flux_vals: np.ndarray
    flagged: np.ndarray
    fd_order: int = DEFAULT_FD_ORDER

    @property
    def radii(self) -> np.ndarray:
        return self.grid.radii

    def __len__(self):
        return len(self.grid)

    def columns(self) -> dict[str, np.ndarray]:
        return {
            "r": self.radii,
            "phi": self.phi_vals,
            "psi": self.psi_vals,
            "freq": self.freq_vals,
            "phi_prime_formula": self.phi_prime_formula_vals,
            "phi_prime_fd": self.phi_prime_fd_vals,
            "psi_prime_formula": self.psi_prime_formula_vals,
            "psi_prime_fd": self.psi_prime_fd_vals,
            "volume_mass": self.volume_mass_vals,
            "boundary_flux": self.boundary_flux_vals,
        }


def build_profile(
    triple: ManufacturedTriple,
    grid: RadiiGrid,
    rules: Rules,
    fd_order: int = DEFAULT_FD_ORDER,
    floor: float = PHI_FLOOR,
) -> FrequencyProfile:
    """Evaluate every functional on ``grid``; vanishing boundary mass is flagged, not raised."""
    radii = grid.radii
    n = len(radii)
    cols = {k: np.empty(n) for k in ("phi", "psi", "vm", "flux", "dphi", "dpsi")}
    for i, r in enumerate(radii):
        q = _radial_pass(triple, r, rules)
        cols["phi"][i] = q["phi"]
        cols["psi"][i] = q["psi"]
        cols["vm"][i] = q["volume_mass"]
        cols["flux"][i] = q["boundary_flux"]
        cols["dpsi"][i] = sum(q["terms"].values())
        cols["dphi"][i] = (triple.dimension - 1) * q["phi"] / r + 2.0 * q["psi"]
    flagged = ~(cols["phi"] > floor)
    with np.errstate(divide="ignore", invalid="ignore"):
        freq = np.where(flagged, np.nan, radii * cols["psi"] / np.where(flagged, 1.0, cols["phi"]))
    return FrequencyProfile(
        label=triple.label,
        dimension=triple.dimension,
        grid=grid,
        phi_vals=cols["phi"],
        psi_vals=cols["psi"],
        freq_vals=freq,
        phi_prime_formula_vals=cols["dphi"],
        psi_prime_formula_vals=cols["dpsi"],
        phi_prime_fd_vals=grid_derivative(cols["phi"], radii, fd_order),
        psi_prime_fd_vals=grid_derivative(cols["psi"], radii, fd_order),
        freq_prime_fd_vals=grid_derivative(freq, radii, fd_order),
        volume_mass_vals=cols["vm"],
        boundary_flux_vals=cols["flux"],
        flagged=flagged,
        fd_order=fd_order,
    )


def format_float(x: float) -> str:
    """Positional notation, 17 significant digits; ``nan``/``inf`` spelled out."""
    x = float(x)
    if not np.isfinite(x):
        return "nan" if np.isnan(x) else ("inf" if x > 0 else "-inf")
    if x == 0:
        return "0.0000000000000000"
    # exact decimal exponent of the binary value, so every number gets 17 digits
    exponent = Decimal(x).adjusted()
    return f"{x:.{max(16 - exponent, 1)}f}"


def profile_to_csv(profile: FrequencyProfile) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    cols = profile.columns()
    for i in range(len(profile)):
        writer.writerow([format_float(cols[c][i]) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_profile_csv(profile: FrequencyProfile, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(profile_to_csv(profile), encoding="utf-8")
    return path


def read_profile_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}
