"""Monge and general parametrized patches: normals, curvatures, integrals.

Vector quantities are returned as arrays whose leading axis has length 3,
so the same code serves a single point or a whole quadrature grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalDomainError, ValidationError
from .expr import Jet2, ScalarField2, U, V
from .quadrature import Domain2, QuadratureSpec, gauss_on, integrate_2d

REGULARITY_EPS = 1e-12


@dataclass(frozen=True)
class MongePatch:
    """The graph ``z = f(u, v)`` over ``domain``, oriented by the upward normal."""

    f: ScalarField2
    domain: Domain2
    name: str | None = None

    def position_fields(self):
        return (U, V, self.f)

    def position_jets(self, u, v):
        return (Jet2(u, 1.0, 0.0), Jet2(v, 0.0, 1.0), self.f.jet(u, v))

    def as_param_patch(self) -> ParamPatch:
        return ParamPatch(U, V, self.f, self.domain, name=self.name)

    def describe(self) -> str:
        return self.name or self.f.source


@dataclass(frozen=True)
class ParamPatch:
    """A patch ``x(u, v) = (x, y, z)`` given by three fields with jets."""

    x: object
    y: object
    z: object
    domain: Domain2
    name: str | None = None

    def position_fields(self):
        return (self.x, self.y, self.z)

    def position_jets(self, u, v):
        return tuple(c.jet(u, v) for c in (self.x, self.y, self.z))


class AffineField:
    """``base + t * direction`` for fields with jets; the position map of a deformed patch."""

    def __init__(self, base, direction, t: float):
        self.base = base
        self.direction = direction
        self.t = float(t)

    def jet(self, u, v) -> Jet2:
        if self.t == 0:
            return self.base.jet(u, v)
        return self.base.jet(u, v) + self.direction.jet(u, v) * self.t


def stack(jets, part: str) -> np.ndarray:
    return np.stack(np.broadcast_arrays(*(np.asarray(getattr(j, part), dtype=float) for j in jets)))


def dot(a, b):
    return np.einsum("i...,i...->...", a, b)


def cross(a, b):
    return np.stack(
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    )


@dataclass(frozen=True)
class FundamentalForms:
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    L: np.ndarray
    M: np.ndarray
    N: np.ndarray
    normal: np.ndarray  # unit normal x_u × x_v / |x_u × x_v|, shape (3, ...)
    area_density: np.ndarray  # |x_u × x_v|

    @property
    def mean_curvature(self):
        return (self.E * self.N - 2 * self.F * self.M + self.G * self.L) / (2 * (self.E * self.G - self.F**2))

    @property
    def gauss_curvature(self):
        return (self.L * self.N - self.M**2) / (self.E * self.G - self.F**2)


def fundamental_forms(p, u, v, check: bool = True) -> FundamentalForms:
    """First and second fundamental forms of any patch exposing ``position_jets``."""
    jets = p.position_jets(u, v)
    xu, xv = stack(jets, "du"), stack(jets, "dv")
    xuu, xuv, xvv = stack(jets, "duu"), stack(jets, "duv"), stack(jets, "dvv")
    nvec = cross(xu, xv)
    length = np.sqrt(dot(nvec, nvec))
    if check:
        _require_regular(length, u, v)
    n = nvec / length
    return FundamentalForms(
        E=dot(xu, xu),
        F=dot(xu, xv),
        G=dot(xv, xv),
        L=dot(xuu, n),
        M=dot(xuv, n),
        N=dot(xvv, n),
        normal=n,
        area_density=length,
    )


def _require_regular(length, u, v, t=None):
    bad = ~(np.asarray(length) > REGULARITY_EPS)
    if np.any(bad):
        uu, vv = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        k = int(np.flatnonzero(np.broadcast_to(bad, uu.shape))[0]) if uu.ndim else 0
        point = (float(uu.flat[k]), float(vv.flat[k]))
        at_t = "" if t is None else f" at t = {t!r}"
        raise RegularityError(f"patch is not regular at (u, v) = {point}{at_t}: |x_u x x_v| = {np.ravel(length)[k]!r}", point)


class RegularityError(NumericalDomainError):
    pass


def unit_normal(p, u, v) -> np.ndarray:
    """Unit normal; for a Monge patch ``W^{-1/2} (-f_u, -f_v, 1)`` with ``W = 1 + f_u² + f_v²``."""
    if isinstance(p, MongePatch):
        j = p.f.jet(u, v)
        inv = 1.0 / np.sqrt(1.0 + j.du**2 + j.dv**2)
        return np.stack(np.broadcast_arrays(-j.du * inv, -j.dv * inv, inv)).astype(float)
    return fundamental_forms(p, u, v).normal


def metric_factor(p: MongePatch, u, v):
    j = p.f.jet(u, v)
    return 1.0 + j.du**2 + j.dv**2


def mean_curvature(p, u, v):
    """Mean curvature ½(κ₁ + κ₂) with respect to the patch normal.

    For a Monge patch this is the closed form
    ``[(1 + f_v²) f_uu - 2 f_u f_v f_uv + (1 + f_u²) f_vv] / (2 W^{3/2})``.
    """
    if isinstance(p, MongePatch):
        j = p.f.jet(u, v)
        W = 1.0 + j.du**2 + j.dv**2
        num = (1 + j.dv**2) * j.duu - 2 * j.du * j.dv * j.duv + (1 + j.du**2) * j.dvv
        return num / (2 * W**1.5)
    return fundamental_forms(p, u, v).mean_curvature


def gauss_curvature(p, u, v):
    if isinstance(p, MongePatch):
        j = p.f.jet(u, v)
        W = 1.0 + j.du**2 + j.dv**2
        return (j.duu * j.dvv - j.duv**2) / W**2
    return fundamental_forms(p, u, v).gauss_curvature


def principal_curvatures(p, u, v):
    """``(κ₁, κ₂)`` with ``κ₁ >= κ₂``: the eigenvalues ``H ± sqrt(H² - K)`` of the shape operator."""
    H = mean_curvature(p, u, v)
    K = gauss_curvature(p, u, v)
    disc = np.sqrt(np.maximum(H * H - K, 0.0))
    return H + disc, H - disc


def total_mean_curvature(p, q: QuadratureSpec) -> float:
    """``∬_D H dA``; for a Monge patch ``dA = sqrt(W) du dv``."""
    if isinstance(p, MongePatch):
        return integrate_2d(lambda u, v: mean_curvature(p, u, v) * np.sqrt(metric_factor(p, u, v)), p.domain, q)

    def integrand(u, v):
        ff = fundamental_forms(p, u, v)
        return ff.mean_curvature * ff.area_density

    return integrate_2d(integrand, p.domain, q)


def surface_area(p, q: QuadratureSpec) -> float:
    if isinstance(p, MongePatch):
        return integrate_2d(lambda u, v: np.sqrt(metric_factor(p, u, v)), p.domain, q)
    return integrate_2d(lambda u, v: fundamental_forms(p, u, v).area_density, p.domain, q)


def total_gauss_curvature(p, q: QuadratureSpec) -> float:
    def integrand(u, v):
        ff = fundamental_forms(p, u, v)
        return ff.gauss_curvature * ff.area_density

    return integrate_2d(integrand, p.domain, q)


def projected_volume(p, q: QuadratureSpec) -> float:
    """Signed volume between the surface and the plane z = 0: ``∬ z (x_u × x_v)_z du dv``."""

    def integrand(u, v):
        jets = p.position_jets(u, v)
        xu, xv = stack(jets, "du"), stack(jets, "dv")
        return np.asarray(jets[2].value) * cross(xu, xv)[2]

    return integrate_2d(integrand, p.domain, q)


def check_regular(p, q: QuadratureSpec, t=None) -> None:
    """Raise :class:`RegularityError` naming the first quadrature node where ``x_u × x_v`` vanishes."""
    nodes = p.domain.area_nodes(q)
    jets = p.position_jets(nodes.u, nodes.v)
    nvec = cross(stack(jets, "du"), stack(jets, "dv"))
    length = np.sqrt(dot(nvec, nvec))
    _require_regular(length, nodes.u, nodes.v, t)


# -- curves in the parameter domain ------------------------------------------------


@dataclass(frozen=True)
class Curve:
    """A piecewise-smooth path ``s -> (u(s), v(s))``; ``pieces`` lists callables on [0, 1].

    Each piece maps an array ``s`` to ``(u, v, du/ds, dv/ds)``.
    """

    pieces: tuple

    def points(self, n: int = 16):
        s = np.linspace(0.0, 1.0, n)
        return [piece(s)[:2] for piece in self.pieces]


def segment(p0, p1) -> Curve:
    (u0, v0), (u1, v1) = p0, p1

    def piece(s):
        s = np.asarray(s, dtype=float)
        return u0 + (u1 - u0) * s, v0 + (v1 - v0) * s, np.full_like(s, u1 - u0), np.full_like(s, v1 - v0)

    return Curve((piece,))


def polyline(points) -> Curve:
    pieces = []
    for a, b in zip(points[:-1], points[1:]):
        pieces.extend(segment(a, b).pieces)
    return Curve(tuple(pieces))


def quadratic_bezier(p0, p1, p2) -> Curve:
    p0, p1, p2 = (np.asarray(p, dtype=float) for p in (p0, p1, p2))

    def piece(s):
        s = np.asarray(s, dtype=float)[..., None]
        pt = (1 - s) ** 2 * p0 + 2 * (1 - s) * s * p1 + s**2 * p2
        vel = 2 * (1 - s) * (p1 - p0) + 2 * s * (p2 - p1)
        return pt[..., 0], pt[..., 1], vel[..., 0], vel[..., 1]

    return Curve((piece,))


def circle(center, radius: float) -> Curve:
    cu, cv = center

    def piece(s):
        th = 2 * math.pi * np.asarray(s, dtype=float)
        c, sn = np.cos(th), np.sin(th)
        return cu + radius * c, cv + radius * sn, -2 * math.pi * radius * sn, 2 * math.pi * radius * c

    return Curve((piece,))


def first_variation_of_length(p, curve: Curve, flex, nodes: int = 128) -> float:
    """``d/dt|₀ Length(ψ(γ, t)) = ∫ x'(s)·v'(s) / |x'(s)| ds`` with ``ψ = x + t v``.

    ``flex`` is anything with ``component_jets(u, v)`` returning three jets
    (a :class:`flexcurv.flex.FlexField`).
    """
    total = []
    for piece in curve.pieces:
        s, w = gauss_on(0.0, 1.0, nodes)
        cu, cv, du, dv = piece(s)
        xj = p.position_jets(cu, cv)
        vj = flex.component_jets(cu, cv)
        xprime = stack(xj, "du") * du + stack(xj, "dv") * dv
        vprime = stack(vj, "du") * du + stack(vj, "dv") * dv
        speed = np.sqrt(dot(xprime, xprime))
        if np.any(speed <= REGULARITY_EPS):
            k = int(np.flatnonzero(speed <= REGULARITY_EPS)[0])
            raise NumericalDomainError(
                f"curve has zero speed at (u, v) = ({cu[k]!r}, {cv[k]!r})", (float(cu[k]), float(cv[k]))
            )
        total.extend((w * dot(xprime, vprime) / speed).tolist())
    return math.fsum(total)


def require_in_domain(p, u, v) -> None:
    if not np.all(p.domain.contains(np.asarray(u), np.asarray(v))):
        raise ValidationError(f"point(s) outside the patch domain {p.domain.describe()}")
