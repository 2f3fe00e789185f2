"""Deterministic quadrature over planar domains and their boundaries.

Rectangles use a tensor-product Gauss-Legendre rule.  Disks are mapped to
polar coordinates: Gauss-Legendre in the radius (with the ``r`` Jacobian)
and equispaced angular panels each carrying Gauss-Legendre nodes.
Boundaries are split into smooth pieces (edges or quarter arcs), each
covered by composite Gauss-Legendre panels and traversed counterclockwise.

All sums go through :func:`math.fsum` over a fixed node ordering, so
results are bitwise reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericalDomainError, ValidationError


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    if n < 1:
        raise ValidationError(f"need at least one Gauss node, got {n}")
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gauss_on(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


@dataclass(frozen=True)
class QuadratureSpec:
    """Area rule: ``nodes_per_axis`` Gauss nodes per rectangle axis, or radial nodes on a disk.

    On a disk the angular direction gets ``angular_nodes`` nodes (default
    ``2 * nodes_per_axis``) split evenly over ``angular_panels`` panels.
    """

    nodes_per_axis: int = 64
    angular_nodes: int | None = None
    angular_panels: int = 4

    def __post_init__(self):
        if self.nodes_per_axis < 2:
            raise ValidationError(f"nodes_per_axis must be >= 2, got {self.nodes_per_axis}")
        n_ang = self.n_angular
        if self.angular_panels < 1 or n_ang % self.angular_panels:
            raise ValidationError(
                f"angular nodes ({n_ang}) must split evenly over {self.angular_panels} panels"
            )

    @property
    def n_angular(self) -> int:
        return self.angular_nodes if self.angular_nodes is not None else 2 * self.nodes_per_axis

    def rule(self, domain) -> str:
        if isinstance(domain, Disk):
            return (
                f"polar: {self.nodes_per_axis} radial Gauss x {self.n_angular} angular "
                f"({self.angular_panels} Gauss panels)"
            )
        return f"tensor Gauss-Legendre {self.nodes_per_axis}x{self.nodes_per_axis}"


@dataclass(frozen=True)
class BoundaryQuadratureSpec:
    """Composite Gauss-Legendre along the boundary: ``panels`` panels per smooth piece, ``nodes`` per panel."""

    nodes: int = 64
    panels: int = 1

    def __post_init__(self):
        if self.nodes < 1 or self.panels < 1:
            raise ValidationError(f"boundary rule needs nodes >= 1 and panels >= 1, got {self.nodes}, {self.panels}")


@dataclass(frozen=True)
class BoundaryNodes:
    """Nodes on the boundary with tangent components; ``∮ P du + Q dv = Σ w (P du_ds + Q dv_ds)``."""

    u: np.ndarray
    v: np.ndarray
    du_ds: np.ndarray
    dv_ds: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class AreaNodes:
    u: np.ndarray
    v: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class Rectangle:
    u_min: float
    u_max: float
    v_min: float
    v_max: float

    def __post_init__(self):
        if not (self.u_max > self.u_min and self.v_max > self.v_min):
            raise ValidationError(f"degenerate rectangle {self}")

    @property
    def area(self) -> float:
        return (self.u_max - self.u_min) * (self.v_max - self.v_min)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (self.u_min, self.u_max, self.v_min, self.v_max)

    def describe(self) -> str:
        return f"rect:{self.u_min!r},{self.u_max!r},{self.v_min!r},{self.v_max!r}"

    def contains(self, u, v):
        return (u >= self.u_min) & (u <= self.u_max) & (v >= self.v_min) & (v <= self.v_max)

    def area_nodes(self, q: QuadratureSpec) -> AreaNodes:
        xu, wu = gauss_on(self.u_min, self.u_max, q.nodes_per_axis)
        xv, wv = gauss_on(self.v_min, self.v_max, q.nodes_per_axis)
        uu, vv = np.meshgrid(xu, xv, indexing="ij")
        return AreaNodes(uu.ravel(), vv.ravel(), np.outer(wu, wv).ravel())

    def corners(self):
        a, b, c, d = self.u_min, self.u_max, self.v_min, self.v_max
        return [(a, c), (b, c), (b, d), (a, d)]

    def boundary_point(self, s):
        """Counterclockwise boundary parametrization, ``s`` in [0, 1); each edge takes a quarter."""
        s = np.mod(np.asarray(s, dtype=float), 1.0)
        k = np.minimum((4 * s).astype(int), 3)
        tau = 4 * s - k
        pts = np.array(self.corners() + [self.corners()[0]])
        p0, p1 = pts[k], pts[k + 1]
        out = p0 + (p1 - p0) * tau[..., None]
        return out[..., 0], out[..., 1]

    def boundary_nodes(self, qb: BoundaryQuadratureSpec) -> BoundaryNodes:
        parts = []
        pts = self.corners()
        for i in range(4):
            (u0, v0), (u1, v1) = pts[i], pts[(i + 1) % 4]
            for p in range(qb.panels):
                tau, w = gauss_on(p / qb.panels, (p + 1) / qb.panels, qb.nodes)
                parts.append(
                    (
                        u0 + (u1 - u0) * tau,
                        v0 + (v1 - v0) * tau,
                        np.full_like(tau, u1 - u0),
                        np.full_like(tau, v1 - v0),
                        w,
                    )
                )
        return BoundaryNodes(*(np.concatenate(c) for c in zip(*parts)))

    def grid(self, n_u: int, n_v: int | None = None):
        """Uniform closed grid (including the edges), ``ij`` indexing."""
        n_v = n_u if n_v is None else n_v
        us = np.linspace(self.u_min, self.u_max, n_u)
        vs = np.linspace(self.v_min, self.v_max, n_v)
        return us, vs

    def sample_points(self, n: int = 10):
        us, vs = self.grid(n)
        uu, vv = np.meshgrid(us, vs, indexing="ij")
        return uu.ravel(), vv.ravel()

    def random_points(self, rng: np.random.Generator, n: int):
        return rng.uniform(self.u_min, self.u_max, n), rng.uniform(self.v_min, self.v_max, n)

    def scaled(self, lam: float) -> Rectangle:
        return Rectangle(lam * self.u_min, lam * self.u_max, lam * self.v_min, lam * self.v_max)


@dataclass(frozen=True)
class Disk:
    center_u: float
    center_v: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValidationError(f"disk radius must be positive, got {self.radius}")

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        cu, cv, r = self.center_u, self.center_v, self.radius
        return (cu - r, cu + r, cv - r, cv + r)

    def describe(self) -> str:
        return f"disk:{self.center_u!r},{self.center_v!r},{self.radius!r}"

    def contains(self, u, v):
        return (u - self.center_u) ** 2 + (v - self.center_v) ** 2 <= self.radius**2

    def _angles(self, q: QuadratureSpec):
        per = q.n_angular // q.angular_panels
        xs, ws = [], []
        for p in range(q.angular_panels):
            x, w = gauss_on(2 * math.pi * p / q.angular_panels, 2 * math.pi * (p + 1) / q.angular_panels, per)
            xs.append(x)
            ws.append(w)
        return np.concatenate(xs), np.concatenate(ws)

    def area_nodes(self, q: QuadratureSpec) -> AreaNodes:
        r, wr = gauss_on(0.0, self.radius, q.nodes_per_axis)
        th, wt = self._angles(q)
        rr, tt = np.meshgrid(r, th, indexing="ij")
        w = np.outer(wr * r, wt)
        return AreaNodes(
            (self.center_u + rr * np.cos(tt)).ravel(),
            (self.center_v + rr * np.sin(tt)).ravel(),
            w.ravel(),
        )

    def boundary_point(self, s):
        th = 2 * math.pi * np.mod(np.asarray(s, dtype=float), 1.0)
        return self.center_u + self.radius * np.cos(th), self.center_v + self.radius * np.sin(th)

    def boundary_nodes(self, qb: BoundaryQuadratureSpec) -> BoundaryNodes:
        n_pan = 4 * qb.panels
        parts = []
        for p in range(n_pan):
            th, w = gauss_on(2 * math.pi * p / n_pan, 2 * math.pi * (p + 1) / n_pan, qb.nodes)
            c, s = np.cos(th), np.sin(th)
            parts.append(
                (
                    self.center_u + self.radius * c,
                    self.center_v + self.radius * s,
                    -self.radius * s,
                    self.radius * c,
                    w,
                )
            )
        return BoundaryNodes(*(np.concatenate(col) for col in zip(*parts)))

    def sample_points(self, n: int = 10):
        # polar sample grid, strictly inside so fields singular on the rim stay evaluable
        r = self.radius * (np.arange(1, n + 1) - 0.5) / n
        th = 2 * math.pi * np.arange(n) / n
        rr, tt = np.meshgrid(r, th, indexing="ij")
        return (self.center_u + rr * np.cos(tt)).ravel(), (self.center_v + rr * np.sin(tt)).ravel()

    def random_points(self, rng: np.random.Generator, n: int):
        r = self.radius * np.sqrt(rng.uniform(0, 1, n))
        th = rng.uniform(0, 2 * math.pi, n)
        return self.center_u + r * np.cos(th), self.center_v + r * np.sin(th)

    def scaled(self, lam: float) -> Disk:
        return Disk(lam * self.center_u, lam * self.center_v, lam * self.radius)


Domain2 = Rectangle | Disk


def parse_domain(text: str) -> Domain2:
    """``rect:u0,u1,v0,v1`` or ``disk:cu,cv,r`` (``disk:r`` centres at the origin)."""
    kind, _, rest = text.strip().partition(":")
    try:
        vals = [float(x) for x in rest.split(",")] if rest.strip() else []
    except ValueError as exc:
        raise ValidationError(f"bad domain {text!r}: {exc}") from None
    kind = kind.strip().lower()
    if kind in ("rect", "rectangle") and len(vals) == 4:
        return Rectangle(*vals)
    if kind == "disk" and len(vals) == 3:
        return Disk(*vals)
    if kind == "disk" and len(vals) == 1:
        return Disk(0.0, 0.0, vals[0])
    raise ValidationError(f"bad domain {text!r}; expected rect:u0,u1,v0,v1 or disk:cu,cv,r")


def _checked_sum(values, weights, u, v, what: str) -> float:
    values = np.broadcast_to(np.asarray(values, dtype=float), weights.shape)
    bad = ~np.isfinite(values)
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise NumericalDomainError(
            f"{what}: non-finite integrand at node {k}, (u, v) = ({u[k]!r}, {v[k]!r})", (float(u[k]), float(v[k]))
        )
    return math.fsum((weights * values).tolist())


def integrate_2d(field, d: Domain2, q: QuadratureSpec) -> float:
    """``∬_d field(u, v) du dv``; ``field`` maps node arrays to value arrays."""
    nodes = d.area_nodes(q)
    return _checked_sum(field(nodes.u, nodes.v), nodes.weights, nodes.u, nodes.v, "area integral")


def integrate_boundary(P, Q, d: Domain2, qb: BoundaryQuadratureSpec) -> float:
    """``∮ P du + Q dv`` along the positively oriented boundary of ``d``."""
    return integrate_form(lambda u, v: (P(u, v), Q(u, v)), d, qb)


def integrate_form(form, d: Domain2, qb: BoundaryQuadratureSpec) -> float:
    """``∮ P du + Q dv`` where ``form(u, v)`` returns the pair ``(P, Q)`` at boundary nodes."""
    b = d.boundary_nodes(qb)
    P, Q = form(b.u, b.v)
    vals = np.asarray(P, dtype=float) * b.du_ds + np.asarray(Q, dtype=float) * b.dv_ds
    return _checked_sum(vals, b.weights, b.u, b.v, "boundary integral")


def signed_area(d: Domain2, qb: BoundaryQuadratureSpec) -> float:
    """``½∮(u dv - v du)``; equals the area exactly when the boundary is positively oriented."""
    return 0.5 * integrate_boundary(lambda u, v: -v, lambda u, v: u, d, qb)


def green_consistency(P, Q, d: Domain2, q2: QuadratureSpec, qb: BoundaryQuadratureSpec) -> tuple[float, float]:
    """Both sides of Green's theorem for fields with jets: ``(∮ P du + Q dv, ∬ (Q_u - P_v))``."""
    boundary = integrate_boundary(P, Q, d, qb)

    def curl(u, v):
        return Q.jet(u, v).du - P.jet(u, v).dv

    return boundary, integrate_2d(curl, d, q2)


def central_difference(fn, h: float) -> float:
    """``(fn(h) - fn(-h)) / 2h`` for a scalar function of the step."""
    return (fn(h) - fn(-h)) / (2 * h)


def richardson(d_h: float, d_half: float, order: int = 2) -> float:
    """Eliminate the leading ``h**order`` error term from estimates at ``h`` and ``h/2``."""
    k = 2**order
    return (k * d_half - d_h) / (k - 1)


def convergence_order(hs, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(h)``."""
    slope, _ = np.polyfit(np.log(np.asarray(hs, dtype=float)), np.log(np.abs(np.asarray(errors, dtype=float))), 1)
    return float(slope)
