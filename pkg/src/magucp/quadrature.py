"""Product quadrature on spheres and balls centred at the origin (N = 2, 3)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_jacobi

from .errors import ConfigurationError, EvaluationError

DEFAULT_RADIAL_NODES = 64
DEFAULT_SPHERE_ORDER = {2: 256, 3: 127}


@dataclass(frozen=True, eq=False)
class SphereRule:
    """Nodes and weights on the unit sphere ``S^{N-1}``.

    Polynomials of total degree ``<= exact_degree`` are integrated exactly.
    """

    dimension: int
    nodes: np.ndarray
    weights: np.ndarray
    exact_degree: int

    def __len__(self):
        return len(self.weights)


@dataclass(frozen=True, eq=False)
class BallRule:
    """Radial Gauss-Jacobi rule times a sphere rule.

    The radial weights already contain the Jacobian ``t^{N-1}``, so
    ``sum_ij radial_weights[i] * sphere.weights[j] * f(t_i y_j)`` approximates
    the integral of ``f`` over the unit ball.
    """

    radial_nodes: np.ndarray
    radial_weights: np.ndarray
    sphere_rule: SphereRule

    @property
    def dimension(self) -> int:
        return self.sphere_rule.dimension

    @property
    def exact_degree(self) -> int:
        return min(2 * len(self.radial_nodes) - 1, self.sphere_rule.exact_degree)

    @property
    def nodes(self) -> np.ndarray:
        """Flattened unit-ball nodes, shape ``(n_radial * n_sphere, N)``."""
        return (self.radial_nodes[:, None, None] * self.sphere_rule.nodes[None, :, :]).reshape(
            -1, self.dimension
        )

    @property
    def weights(self) -> np.ndarray:
        return np.outer(self.radial_weights, self.sphere_rule.weights).ravel()


@dataclass(frozen=True, eq=False)
class Rules:
    """The pair of rules needed by the radial functionals."""

    sphere: SphereRule
    ball: BallRule

    @property
    def dimension(self) -> int:
        return self.sphere.dimension


@dataclass(frozen=True, eq=False)
class RadiiGrid:
    radii: np.ndarray
    spacing: float

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if r.ndim != 1 or r.size == 0:
            raise ConfigurationError("radii grid must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(r)) or np.any(r <= 0) or np.any(r >= 1):
            raise ConfigurationError("radii must lie strictly inside (0, 1)")
        if np.any(np.diff(r) <= 0):
            raise ConfigurationError("radii must be strictly increasing")
        r.setflags(write=False)
        object.__setattr__(self, "radii", r)

    def __len__(self):
        return len(self.radii)

    @classmethod
    def uniform(cls, r_min: float = 0.05, r_max: float = 0.95, step: float = 0.0125) -> RadiiGrid:
        if not (0 < r_min < r_max < 1):
            raise ConfigurationError(f"need 0 < r_min < r_max < 1, got r_min={r_min}, r_max={r_max}")
        if not step > 0:
            raise ConfigurationError(f"step must be positive, got {step}")
        count = int(math.floor((r_max - r_min) / step + 1e-9)) + 1
        return cls(r_min + step * np.arange(count), float(step))

    @classmethod
    def from_values(cls, values) -> RadiiGrid:
        r = np.asarray(values, dtype=float)
        spacing = float(np.min(np.diff(r))) if r.size > 1 else 0.0
        return cls(r, spacing)


def make_sphere_rule(dimension: int, order: int) -> SphereRule:
    """Quadrature on the unit sphere.

    N=2: ``order`` equispaced nodes on the circle, exact to degree ``order - 1``.
    N=3: Gauss-Legendre in ``cos(theta)`` times an equispaced azimuth, with
    ``ceil((order + 1) / 2)`` polar and ``order + 1`` azimuthal nodes; exact to
    degree ``>= order``.
    """
    if isinstance(order, bool) or not isinstance(order, (int, np.integer)) or order < 2:
        raise ConfigurationError(f"sphere order must be an integer >= 2, got {order!r}")
    order = int(order)
    if dimension == 2:
        t = 2.0 * np.pi * np.arange(order) / order
        nodes = np.stack([np.cos(t), np.sin(t)], axis=-1)
        weights = np.full(order, 2.0 * np.pi / order)
        return SphereRule(2, nodes, weights, order - 1)
    if dimension == 3:
        n_polar = (order + 2) // 2
        n_az = order + 1
        z, wz = np.polynomial.legendre.leggauss(n_polar)
        az = 2.0 * np.pi * np.arange(n_az) / n_az
        s = np.sqrt(1.0 - z * z)
        nodes = np.stack(
            [
                np.outer(s, np.cos(az)).ravel(),
                np.outer(s, np.sin(az)).ravel(),
                np.repeat(z, n_az),
            ],
            axis=-1,
        )
        weights = np.outer(wz, np.full(n_az, 2.0 * np.pi / n_az)).ravel()
        return SphereRule(3, nodes, weights, min(2 * n_polar - 1, n_az - 1))
    raise ConfigurationError(f"unsupported dimension {dimension!r}; only 2 and 3")


def make_ball_rule(
    dimension: int, radial_nodes: int = DEFAULT_RADIAL_NODES, sphere_order: int | None = None
) -> BallRule:
    if isinstance(radial_nodes, bool) or not isinstance(radial_nodes, (int, np.integer)) or radial_nodes < 1:
        raise ConfigurationError(f"radial_nodes must be a positive integer, got {radial_nodes!r}")
    if sphere_order is None:
        sphere_order = DEFAULT_SPHERE_ORDER.get(dimension, 0)
    sphere = make_sphere_rule(dimension, sphere_order)
    # int_0^1 t^{N-1} g(t) dt with t = (1+s)/2 is 2^-N int_{-1}^{1} (1+s)^{N-1} g ds
    s, w = roots_jacobi(int(radial_nodes), 0.0, float(dimension - 1))
    return BallRule((1.0 + s) / 2.0, w / 2.0**dimension, sphere)


def make_rules(
    dimension: int, sphere_order: int | None = None, radial_nodes: int = DEFAULT_RADIAL_NODES
) -> Rules:
    if sphere_order is None:
        if dimension not in DEFAULT_SPHERE_ORDER:
            raise ConfigurationError(f"unsupported dimension {dimension!r}; only 2 and 3")
        sphere_order = DEFAULT_SPHERE_ORDER[dimension]
    ball = make_ball_rule(dimension, radial_nodes, sphere_order)
    return Rules(ball.sphere_rule, ball)


def _check_radius(r) -> float:
    r = float(r)
    if not (0 < r <= 1):
        raise ConfigurationError(f"radius must lie in (0, 1], got {r}")
    return r


def _weighted_sum(f, pts: np.ndarray, weights: np.ndarray):
    vals = np.asarray(f(pts))
    vals = np.broadcast_to(vals, pts.shape[:-1])
    bad = ~np.isfinite(vals)
    if np.any(bad):
        idx = int(np.flatnonzero(bad)[0])
        raise EvaluationError(f"non-finite integrand {vals[idx]!r} at node {idx} x={pts[idx].tolist()}")
    # numpy reduces contiguous arrays pairwise; the order is fixed so results are reproducible
    total = np.sum(weights * vals)
    return total.item()


def integrate_sphere(f, r: float, rule: SphereRule):
    """Integral of ``f`` over the sphere of radius ``r``: ``r^{N-1} sum_i w_i f(r y_i)``."""
    r = _check_radius(r)
    return r ** (rule.dimension - 1) * _weighted_sum(f, r * rule.nodes, rule.weights)


def integrate_ball(f, r: float, rule: BallRule):
    """Integral of ``f`` over the ball of radius ``r`` via ``x = r t y``."""
    r = _check_radius(r)
    return r**rule.dimension * _weighted_sum(f, r * rule.nodes, rule.weights)
