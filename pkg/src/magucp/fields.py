"""Complex fields, magnetic potentials and the operators built from them.

Every callable in this module is vectorised: it takes an array of points of
shape ``(..., N)`` and returns values with the leading shape preserved.
Conventions:

* ``grad[..., i]`` is the partial derivative along ``x_i``.
* ``VectorPotential.jacobian(x)[..., i, j]`` is ``d a_j / d x_i`` (row index
  is the derivative direction).
* The magnetic gradient is ``i grad(w) + A w`` and the magnetic Laplacian is
  its square, ``-lap(w) + 2i A.grad(w) + i div(A) w + (A.A) w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Mapping

import numpy as np

from .errors import ConfigurationError

Array = np.ndarray
PointFn = Callable[[Array], Array]

SUPPORTED_DIMENSIONS = (2, 3)
DEFAULT_PHI_FLOOR = 1e-6
_SAMPLE_CHUNK = 1 << 17


def as_points(x, dimension: int | None = None) -> Array:
    """Validate and convert ``x`` to a float array of shape ``(..., N)``."""
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 0:
        raise ConfigurationError("a spatial point needs at least one axis")
    n = pts.shape[-1]
    if n not in SUPPORTED_DIMENSIONS:
        raise ConfigurationError(f"dimension must be 2 or 3, got {n}")
    if dimension is not None and n != dimension:
        raise ConfigurationError(f"dimension mismatch: expected {dimension}, got {n}")
    if not np.all(np.isfinite(pts)):
        raise ConfigurationError("spatial points must be finite")
    return pts


def _check_dimension(dimension) -> int:
    if isinstance(dimension, bool) or not isinstance(dimension, (int, np.integer)):
        raise ConfigurationError(f"dimension must be an integer, got {dimension!r}")
    if int(dimension) not in SUPPORTED_DIMENSIONS:
        raise ConfigurationError(f"dimension must be 2 or 3, got {dimension}")
    return int(dimension)


def _sq_norm(x: Array) -> Array:
    return np.sum(x * x, axis=-1)


# --------------------------------------------------------------------------
# field containers
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ComplexField:
    """A complex scalar field with analytic gradient and Laplacian."""

    dimension: int
    value: PointFn
    gradient: PointFn
    laplacian: PointFn
    label: str = ""

    def __post_init__(self):
        _check_dimension(self.dimension)


@dataclass(frozen=True, eq=False)
class VectorPotential:
    """A real vector potential with its Jacobian and divergence."""

    dimension: int
    value: PointFn
    jacobian: PointFn
    divergence: PointFn | None = None
    label: str = ""

    def __post_init__(self):
        _check_dimension(self.dimension)
        if self.divergence is None:
            jac = self.jacobian
            object.__setattr__(
                self, "divergence", lambda x: np.trace(jac(x), axis1=-2, axis2=-1)
            )


@dataclass(frozen=True, eq=False)
class ScalarPotential:
    """A complex scalar potential together with sampled sup norms over the unit ball."""

    dimension: int
    value: PointFn
    sup_norm: float
    sup_norm_real_part: float
    label: str = ""

    @classmethod
    def sampled(cls, dimension: int, value: PointFn, label: str = "") -> ScalarPotential:
        """Build a potential whose sup norms come from dense sampling of the closed unit ball."""
        dimension = _check_dimension(dimension)
        sup = 0.0
        sup_re = 0.0
        for chunk in _sample_chunks(dimension):
            vals = np.broadcast_to(np.asarray(value(chunk), dtype=complex), chunk.shape[:-1])
            if not np.all(np.isfinite(vals)):
                raise ConfigurationError(f"potential {label or '<phi>'} is not finite on the unit ball")
            sup = max(sup, float(np.max(np.abs(vals))))
            sup_re = max(sup_re, float(np.max(np.abs(vals.real))))
        return cls(dimension, value, sup, sup_re, label)


@dataclass(frozen=True, eq=False)
class GaugeFunction:
    """A real scalar function with gradient and Hessian, used to change gauge."""

    dimension: int
    value: PointFn
    gradient: PointFn
    hessian: PointFn
    label: str = ""

    def laplacian(self, x: Array) -> Array:
        return np.trace(self.hessian(x), axis1=-2, axis2=-1)


@dataclass(frozen=True, eq=False)
class ManufacturedTriple:
    """An exact solution ``(omega, A, phi)`` of the magnetic Schroedinger equation."""

    omega: ComplexField
    potential_a: VectorPotential
    potential_phi: ScalarPotential
    label: str = ""
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        dims = {self.omega.dimension, self.potential_a.dimension, self.potential_phi.dimension}
        if len(dims) != 1:
            raise ConfigurationError(f"triple {self.label!r} mixes dimensions {sorted(dims)}")

    @property
    def dimension(self) -> int:
        return self.omega.dimension

    @cached_property
    def xi_frobenius_bound(self) -> float:
        """Max Frobenius norm of the field-strength matrix over the closed unit ball."""
        return max(
            xi_frobenius_max(self.potential_a, chunk) for chunk in _sample_chunks(self.dimension)
        )

    @cached_property
    def jacobian_frobenius_bound(self) -> float:
        """Max Frobenius norm of the Jacobian of ``A`` over the closed unit ball."""
        best = 0.0
        for chunk in _sample_chunks(self.dimension):
            jac = self.potential_a.jacobian(chunk)
            best = max(best, float(np.max(np.sqrt(np.sum(jac * jac, axis=(-2, -1))))))
        return best

    def residual(self, x) -> Array:
        """Pointwise ``|H_A^2 w - phi w|`` at the given points."""
        pts = as_points(x, self.dimension)
        lhs = mag_laplacian(self.omega, self.potential_a, pts)
        rhs = self.potential_phi.value(pts) * self.omega.value(pts)
        return np.abs(lhs - rhs)


# --------------------------------------------------------------------------
# dense samples of the closed unit ball
# --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def ball_samples(dimension: int) -> Array:
    """At least 10**6 tensor-grid points of the closed unit ball plus a dense shell on the sphere.

    The origin and the axis points ``+-e_i`` are always included.
    """
    dimension = _check_dimension(dimension)
    if dimension == 2:
        ax = np.linspace(-1.0, 1.0, 1201)
        g = np.stack(np.meshgrid(ax, ax, indexing="ij"), axis=-1).reshape(-1, 2)
        t = 2 * np.pi * np.arange(8192) / 8192
        shell = np.stack([np.cos(t), np.sin(t)], axis=-1)
    else:
        ax = np.linspace(-1.0, 1.0, 127)
        g = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1).reshape(-1, 3)
        # Fibonacci lattice on the sphere
        m = 16384
        k = np.arange(m) + 0.5
        z = 1 - 2 * k / m
        az = np.pi * (1 + 5**0.5) * k
        s = np.sqrt(1 - z * z)
        shell = np.stack([s * np.cos(az), s * np.sin(az), z], axis=-1)
    inside = g[_sq_norm(g) <= 1.0 + 1e-12]
    pts = np.concatenate([inside, shell], axis=0)
    pts.setflags(write=False)
    return pts


def _sample_chunks(dimension: int):
    pts = ball_samples(dimension)
    for start in range(0, len(pts), _SAMPLE_CHUNK):
        yield pts[start : start + _SAMPLE_CHUNK]


# --------------------------------------------------------------------------
# operators
# --------------------------------------------------------------------------


def _check_pair(omega: ComplexField, a: VectorPotential) -> int:
    if omega.dimension != a.dimension:
        raise ConfigurationError(
            f"dimension mismatch: field is {omega.dimension}-D, potential is {a.dimension}-D"
        )
    return omega.dimension


def mag_gradient(omega: ComplexField, a: VectorPotential, x) -> Array:
    """Magnetic gradient ``i grad(w) + A w``; shape ``(..., N)``."""
    n = _check_pair(omega, a)
    pts = as_points(x, n)
    w = np.asarray(omega.value(pts), dtype=complex)
    return 1j * omega.gradient(pts) + a.value(pts) * w[..., None]


def mag_laplacian(omega: ComplexField, a: VectorPotential, x) -> Array:
    """Magnetic Schroedinger operator applied to ``omega``."""
    n = _check_pair(omega, a)
    pts = as_points(x, n)
    w = np.asarray(omega.value(pts), dtype=complex)
    grad = omega.gradient(pts)
    av = a.value(pts)
    a_dot_grad = np.sum(av * grad, axis=-1)
    return (
        -omega.laplacian(pts)
        + 1j * a_dot_grad
        + 1j * (a.divergence(pts) * w + a_dot_grad)
        + _sq_norm(av) * w
    )


def xi_matrix(a: VectorPotential, x) -> Array:
    """Antisymmetric field-strength matrix, entry ``(j, k) = d_j a_k - d_k a_j``."""
    pts = as_points(x, a.dimension)
    jac = a.jacobian(pts)
    return jac - np.swapaxes(jac, -1, -2)


def xi_frobenius_max(a: VectorPotential, samples) -> float:
    """Largest Frobenius norm of :func:`xi_matrix` over ``samples``."""
    pts = np.asarray(samples, dtype=float)
    if pts.size == 0:
        raise ConfigurationError("xi_frobenius_max needs at least one sample point")
    xi = xi_matrix(a, pts.reshape(-1, pts.shape[-1]))
    return float(np.max(np.sqrt(np.sum(xi * xi, axis=(-2, -1)))))


def derive_phi(
    omega: ComplexField, a: VectorPotential, floor: float = DEFAULT_PHI_FLOOR, label: str = ""
) -> ScalarPotential:
    """Return ``phi = H_A^2 w / w`` so that ``(omega, a, phi)`` is an exact solution.

    Rejects fields with ``|w| < floor`` anywhere on the densely sampled unit ball.
    """
    n = _check_pair(omega, a)
    if not floor > 0:
        raise ConfigurationError(f"floor must be positive, got {floor!r}")
    for chunk in _sample_chunks(n):
        lo = float(np.min(np.abs(omega.value(chunk))))
        if lo < floor:
            raise ConfigurationError(
                f"|omega| drops to {lo:.3e} < floor {floor:.1e} on the unit ball; "
                "the derived potential would be singular"
            )

    def value(x):
        return mag_laplacian(omega, a, x) / omega.value(x)

    return ScalarPotential.sampled(n, value, label)


def gauge_transform(triple: ManufacturedTriple, chi: GaugeFunction) -> ManufacturedTriple:
    """Apply the gauge change ``A -> A + grad(chi)``, ``w -> exp(i chi) w``.

    ``phi`` is unchanged, ``|w|`` and ``|H_A w|`` are preserved pointwise, and
    ``H_{A'} w' = exp(i chi) H_A w``.
    """
    if chi.dimension != triple.dimension:
        raise ConfigurationError("gauge function dimension does not match the triple")
    w0, a0 = triple.omega, triple.potential_a

    def value(x):
        return np.exp(1j * chi.value(x)) * w0.value(x)

    def gradient(x):
        ph = np.exp(1j * chi.value(x))[..., None]
        return ph * (w0.gradient(x) + 1j * w0.value(x)[..., None] * chi.gradient(x))

    def laplacian(x):
        w = w0.value(x)
        gw = w0.gradient(x)
        gc = chi.gradient(x)
        return np.exp(1j * chi.value(x)) * (
            w0.laplacian(x)
            + 2j * np.sum(gc * gw, axis=-1)
            + 1j * chi.laplacian(x) * w
            - _sq_norm(gc) * w
        )

    omega = ComplexField(triple.dimension, value, gradient, laplacian, f"{w0.label}*exp(i chi)")
    pot = VectorPotential(
        triple.dimension,
        lambda x: a0.value(x) + chi.gradient(x),
        lambda x: a0.jacobian(x) + chi.hessian(x),
        lambda x: a0.divergence(x) + chi.laplacian(x),
        f"{a0.label}+grad chi",
    )
    label = f"{triple.label}@gauge({chi.label})" if chi.label else f"{triple.label}@gauge"
    return ManufacturedTriple(omega, pot, triple.potential_phi, label, dict(triple.params))


def scale_triple(triple: ManufacturedTriple, c: complex) -> ManufacturedTriple:
    """Multiply the solution by a constant; the equation is linear so ``phi`` is reused."""
    w0 = triple.omega
    omega = ComplexField(
        w0.dimension,
        lambda x: c * np.asarray(w0.value(x), dtype=complex),
        lambda x: c * np.asarray(w0.gradient(x), dtype=complex),
        lambda x: c * np.asarray(w0.laplacian(x), dtype=complex),
        f"{c}*{w0.label}",
    )
    return ManufacturedTriple(
        omega, triple.potential_a, triple.potential_phi, f"{triple.label}*{c}", dict(triple.params)
    )


# --------------------------------------------------------------------------
# elementary fields, potentials and gauges
# --------------------------------------------------------------------------


def gaussian_field(dimension: int) -> ComplexField:
    """``exp(-|x|^2)``."""
    n = _check_dimension(dimension)

    def value(x):
        return np.exp(-_sq_norm(x)).astype(complex)

    def gradient(x):
        return (-2.0 * x * np.exp(-_sq_norm(x))[..., None]).astype(complex)

    def laplacian(x):
        s = _sq_norm(x)
        return ((4.0 * s - 2.0 * n) * np.exp(-s)).astype(complex)

    return ComplexField(n, value, gradient, laplacian, "exp(-|x|^2)")


def holomorphic_power(k: int) -> ComplexField:
    """``(x1 + i x2)^k`` in two dimensions; harmonic and homogeneous of degree ``k``."""

    def z(x):
        return x[..., 0] + 1j * x[..., 1]

    def value(x):
        return z(x) ** k

    def gradient(x):
        d = k * z(x) ** (k - 1) if k > 0 else np.zeros(x.shape[:-1], dtype=complex)
        return np.stack([d, 1j * d], axis=-1)

    def laplacian(x):
        return np.zeros(x.shape[:-1], dtype=complex)

    return ComplexField(2, value, gradient, laplacian, f"(x1+ix2)^{k}")


def constant_field(c: complex, dimension: int) -> ComplexField:
    n = _check_dimension(dimension)
    return ComplexField(
        n,
        lambda x: np.full(x.shape[:-1], c, dtype=complex),
        lambda x: np.zeros(x.shape, dtype=complex),
        lambda x: np.zeros(x.shape[:-1], dtype=complex),
        f"{c}",
    )


def flat_field(dimension: int) -> ComplexField:
    """``exp(-1/|x|^2)`` extended by zero at the origin: smooth, vanishing to infinite order."""
    n = _check_dimension(dimension)

    def _parts(x):
        s = _sq_norm(x)
        pos = s > 0
        safe = np.where(pos, s, 1.0)
        with np.errstate(under="ignore"):
            e = np.where(pos, np.exp(-1.0 / safe), 0.0)
        return s, safe, e

    def value(x):
        return _parts(x)[2].astype(complex)

    def gradient(x):
        _, safe, e = _parts(x)
        # d/ds exp(-1/s) = exp(-1/s)/s^2, and grad s = 2x
        return (2.0 * x * (e / safe**2)[..., None]).astype(complex)

    def laplacian(x):
        s, safe, e = _parts(x)
        g1 = e / safe**2
        g2 = e * (1.0 / safe**4 - 2.0 / safe**3)
        return (4.0 * s * g2 + 2.0 * n * g1).astype(complex)

    return ComplexField(n, value, gradient, laplacian, "exp(-1/|x|^2)")


def zero_potential(dimension: int) -> VectorPotential:
    n = _check_dimension(dimension)
    return VectorPotential(
        n,
        lambda x: np.zeros(x.shape),
        lambda x: np.zeros(x.shape + (n,)),
        lambda x: np.zeros(x.shape[:-1]),
        "0",
    )


def constant_potential(a) -> VectorPotential:
    vec = np.asarray(a, dtype=float)
    if vec.ndim != 1:
        raise ConfigurationError("a constant potential needs a flat vector")
    n = _check_dimension(len(vec))
    if not np.all(np.isfinite(vec)):
        raise ConfigurationError("constant potential must be finite")
    return VectorPotential(
        n,
        lambda x: np.broadcast_to(vec, x.shape).copy(),
        lambda x: np.zeros(x.shape + (n,)),
        lambda x: np.zeros(x.shape[:-1]),
        f"const{tuple(vec.tolist())}",
    )


def rotational_potential(b: float, dimension: int = 2) -> VectorPotential:
    """``b * (-x2, x1[, 0])``: uniform magnetic field of strength ``2b`` along the last axis."""
    n = _check_dimension(dimension)
    jac0 = np.zeros((n, n))
    jac0[1, 0] = -b
    jac0[0, 1] = b

    def value(x):
        out = np.zeros(x.shape)
        out[..., 0] = -b * x[..., 1]
        out[..., 1] = b * x[..., 0]
        return out

    return VectorPotential(
        n,
        value,
        lambda x: np.broadcast_to(jac0, x.shape + (n,)).copy(),
        lambda x: np.zeros(x.shape[:-1]),
        f"{b}*(-x2,x1)",
    )


def gradient_potential(chi: GaugeFunction) -> VectorPotential:
    """The pure-gauge potential ``grad(chi)``."""
    return VectorPotential(chi.dimension, chi.gradient, chi.hessian, chi.laplacian, f"grad({chi.label})")


def linear_gauge(c) -> GaugeFunction:
    """``chi(x) = c . x``."""
    vec = np.asarray(c, dtype=float)
    n = _check_dimension(len(vec))
    return GaugeFunction(
        n,
        lambda x: x @ vec,
        lambda x: np.broadcast_to(vec, x.shape).copy(),
        lambda x: np.zeros(x.shape + (n,)),
        f"c.x{tuple(vec.tolist())}",
    )


def bilinear_gauge(dimension: int = 2, i: int = 0, j: int = 1) -> GaugeFunction:
    """``chi(x) = x_i x_j`` for ``i != j``."""
    n = _check_dimension(dimension)
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ConfigurationError("bilinear gauge needs two distinct coordinate indices")
    hess = np.zeros((n, n))
    hess[i, j] = hess[j, i] = 1.0

    def gradient(x):
        out = np.zeros(x.shape)
        out[..., i] = x[..., j]
        out[..., j] = x[..., i]
        return out

    return GaugeFunction(
        n,
        lambda x: x[..., i] * x[..., j],
        gradient,
        lambda x: np.broadcast_to(hess, x.shape + (n,)).copy(),
        f"x{i + 1}x{j + 1}",
    )


# --------------------------------------------------------------------------
# catalog
# --------------------------------------------------------------------------

CATALOG_NAMES = ("gaussian", "harmonic2d", "constant_field", "rotational_gauss")


def _param_dimension(params: Mapping, default: int = 2) -> int:
    n = params.get("N", params.get("dimension", default))
    return _check_dimension(n)


def _gaussian(params: Mapping) -> ManufacturedTriple:
    n = _param_dimension(params)
    phi = ScalarPotential.sampled(n, lambda x: (2.0 * n - 4.0 * _sq_norm(x)).astype(complex), "2N-4|x|^2")
    return ManufacturedTriple(gaussian_field(n), zero_potential(n), phi, f"gaussian(N={n})", {"N": n})


def _harmonic2d(params: Mapping) -> ManufacturedTriple:
    k = params.get("k")
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
        raise ConfigurationError(f"harmonic2d requires an integer k >= 1, got {k!r}")
    n = _param_dimension(params)
    if n != 2:
        raise ConfigurationError(f"harmonic2d is only defined for N=2, got N={n}")
    phi = ScalarPotential.sampled(2, lambda x: np.zeros(x.shape[:-1], dtype=complex), "0")
    k = int(k)
    return ManufacturedTriple(holomorphic_power(k), zero_potential(2), phi, f"harmonic2d(k={k})", {"k": k})


def _constant(params: Mapping) -> ManufacturedTriple:
    if "a" not in params:
        raise ConfigurationError("constant_field requires a vector parameter 'a'")
    try:
        a = np.asarray(params["a"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"constant_field parameter 'a' is not numeric: {params['a']!r}") from exc
    if a.ndim != 1:
        raise ConfigurationError("constant_field parameter 'a' must be a flat vector")
    n = _check_dimension(len(a))
    if "N" in params and params["N"] != n:
        raise ConfigurationError(f"constant_field: len(a)={n} disagrees with N={params['N']}")
    a2 = float(a @ a)
    phi = ScalarPotential.sampled(n, lambda x: np.full(x.shape[:-1], a2, dtype=complex), "|a|^2")
    label = "constant_field(a=" + ",".join(repr(float(v)) for v in a) + ")"
    return ManufacturedTriple(constant_field(1.0, n), constant_potential(a), phi, label, {"a": a.tolist()})


def _rotational(params: Mapping) -> ManufacturedTriple:
    b = params.get("b", 1.0)
    if isinstance(b, bool) or not isinstance(b, (int, float, np.floating, np.integer)) or not math.isfinite(b):
        raise ConfigurationError(f"rotational_gauss requires a finite real b, got {b!r}")
    n = _param_dimension(params)
    omega = gaussian_field(n)
    pot = rotational_potential(float(b), n)
    phi = derive_phi(omega, pot, label="derived")
    return ManufacturedTriple(omega, pot, phi, f"rotational_gauss(b={float(b)!r},N={n})", {"b": float(b), "N": n})


_BUILDERS = {
    "gaussian": _gaussian,
    "harmonic2d": _harmonic2d,
    "constant_field": _constant,
    "rotational_gauss": _rotational,
}


def _freeze(value):
    if isinstance(value, Mapping):
        return tuple(sorted((k, _freeze(v)) for k, v in value.items()))
    if isinstance(value, (list, tuple, np.ndarray)):
        return tuple(_freeze(v) for v in value)
    return value


@lru_cache(maxsize=64)
def _catalog_cached(name: str, frozen: tuple) -> ManufacturedTriple:
    params = {k: (list(v) if isinstance(v, tuple) else v) for k, v in frozen}
    return _BUILDERS[name](params)


def catalog(name: str, params: Mapping | None = None, **kwargs) -> ManufacturedTriple:
    """Return a named exact solution.

    ``gaussian``          ``(exp(-|x|^2), 0, 2N - 4|x|^2)``; params ``N``.
    ``harmonic2d``        ``((x1 + i x2)^k, 0, 0)``; params ``k``.
    ``constant_field``    ``(1, a, |a|^2)``; params ``a`` (vector, sets ``N``).
    ``rotational_gauss``  ``(exp(-|x|^2), b(-x2, x1), derived)``; params ``b``, ``N``.
    """
    merged = dict(params or {})
    merged.update(kwargs)
    if name not in _BUILDERS:
        raise ConfigurationError(f"unknown catalog triple {name!r}; expected one of {CATALOG_NAMES}")
    try:
        frozen = _freeze(merged)
        hash(frozen)
    except TypeError as exc:
        raise ConfigurationError(f"unhashable parameters for {name!r}: {merged!r}") from exc
    return _catalog_cached(name, frozen)
