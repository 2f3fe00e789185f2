"""Infinitesimal flexes: residuals of the flex equations, rigid motions, discrete construction.

A vector field ``v = (ξ, η, ζ)`` on a patch ``x(u, v)`` is an infinitesimal
flex when ``x_u·v_u = 0``, ``x_u·v_v + x_v·v_u = 0`` and ``x_v·v_v = 0``.
For a Monge patch ``(u, v, f)`` these read

    ξ_u + f_u ζ_u = 0,  ξ_v + η_u + f_v ζ_u + f_u ζ_v = 0,  η_v + f_v ζ_v = 0,

and differentiating once more gives six second-order identities that every
flex must also satisfy.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.interpolate import RectBivariateSpline

from .errors import PreconditionError, ValidationError
from .expr import Jet2, ScalarField2, linear_combination
from .geometry import MongePatch, cross, dot, stack
from .quadrature import Rectangle

FLEX_TOL = 1e-8


@dataclass(frozen=True)
class FlexField:
    """Velocity field ``(ξ, η, ζ)``; components are anything with ``jet(u, v)``."""

    xi: object
    eta: object
    zeta: object

    @classmethod
    def parse(cls, text: str) -> FlexField:
        parts = text.split(",")
        if len(parts) != 3:
            raise ValidationError(f"flex needs three comma-separated expressions, got {len(parts)}: {text!r}")
        return cls(*(ScalarField2.parse(p) for p in parts))

    @property
    def components(self):
        return (self.xi, self.eta, self.zeta)

    def component_jets(self, u, v) -> tuple[Jet2, Jet2, Jet2]:
        return tuple(c.jet(u, v) for c in self.components)

    def __call__(self, u, v) -> np.ndarray:
        return stack(self.component_jets(u, v), "value")

    @property
    def is_symbolic(self) -> bool:
        return all(isinstance(c, ScalarField2) for c in self.components)

    def source(self) -> str:
        if not self.is_symbolic:
            raise ValidationError("interpolated flex has no expression form")
        return ",".join(c.source for c in self.components)

    def __add__(self, other: FlexField) -> FlexField:
        pairs = zip(self.components, other.components)
        return FlexField(*(a + b if _symbolic(a, b) else _SumField(a, b) for a, b in pairs))

    def scaled(self, c: float) -> FlexField:
        if self.is_symbolic:
            return FlexField(*(comp * c for comp in self.components))
        return FlexField(*(_ScaledField(comp, c) for comp in self.components))


def _symbolic(*fields) -> bool:
    return all(isinstance(f, ScalarField2) for f in fields)


class _SumField:
    def __init__(self, a, b):
        self.a, self.b = a, b

    def jet(self, u, v):
        return self.a.jet(u, v) + self.b.jet(u, v)


class _ScaledField:
    def __init__(self, a, c):
        self.a, self.c = a, float(c)

    def jet(self, u, v):
        return self.a.jet(u, v) * self.c


@dataclass(frozen=True)
class RigidMotionField:
    """Infinitesimal rigid motion ``x -> a + b × x``: translation rate ``a``, rotation rate ``b``."""

    a: tuple[float, float, float] = (0.0, 0.0, 0.0)
    b: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def velocity(self, points: np.ndarray) -> np.ndarray:
        """Velocity at points of shape (3, ...)."""
        a = np.asarray(self.a, dtype=float).reshape((3,) + (1,) * (points.ndim - 1))
        b = np.broadcast_to(np.asarray(self.b, dtype=float).reshape(a.shape), points.shape)
        return a + cross(b, points)

    def bind(self, patch) -> FlexField:
        return rigid_motion_flex(patch, self.a, self.b)


def rigid_motion_flex(patch, a=(0.0, 0.0, 0.0), b=(0.0, 0.0, 0.0)) -> FlexField:
    """The field ``a + b × x(u, v)`` on ``patch`` as expressions in u, v."""
    x, y, z = patch.position_fields()
    if not _symbolic(x, y, z):
        raise ValidationError("rigid_motion_flex needs a patch given by expressions")
    a1, a2, a3 = (float(c) for c in a)
    b1, b2, b3 = (float(c) for c in b)
    return FlexField(
        linear_combination([(b2, z), (-b3, y)], a1),
        linear_combination([(b3, x), (-b1, z)], a2),
        linear_combination([(b1, y), (-b2, x)], a3),
    )


# -- residuals ---------------------------------------------------------------------


def flex_residuals_general(p, flex: FlexField, u, v):
    """``(x_u·v_u, x_u·v_v + x_v·v_u, x_v·v_v)`` for any patch."""
    xj = p.position_jets(u, v)
    vj = flex.component_jets(u, v)
    xu, xv = stack(xj, "du"), stack(xj, "dv")
    vu, vv = stack(vj, "du"), stack(vj, "dv")
    return dot(xu, vu), dot(xu, vv) + dot(xv, vu), dot(xv, vv)


def flex_residuals_monge(p: MongePatch, flex: FlexField, u, v):
    """``(ξ_u + f_u ζ_u, ξ_v + η_u + f_v ζ_u + f_u ζ_v, η_v + f_v ζ_v)``."""
    f = p.f.jet(u, v)
    xi, eta, zeta = flex.component_jets(u, v)
    r1 = xi.du + f.du * zeta.du
    r2 = xi.dv + eta.du + f.dv * zeta.du + f.du * zeta.dv
    r3 = eta.dv + f.dv * zeta.dv
    return tuple(np.broadcast_arrays(r1, r2, r3)) if np.ndim(u) or np.ndim(v) else (r1, r2, r3)


def second_order_identities(p: MongePatch, flex: FlexField, u, v):
    """Residuals of the six differentiated flex equations, in the order
    ξ_uu, ξ_uv, ξ_vv, η_uu, η_uv, η_vv (each ``lhs + f_.. ζ_. + f_. ζ_..``)."""
    f = p.f.jet(u, v)
    xi, eta, z = flex.component_jets(u, v)
    out = (
        xi.duu + f.duu * z.du + f.du * z.duu,
        xi.duv + f.duv * z.du + f.du * z.duv,
        xi.dvv + f.dvv * z.du + f.du * z.dvv,
        eta.duu + f.duu * z.dv + f.dv * z.duu,
        eta.duv + f.duv * z.dv + f.dv * z.duv,
        eta.dvv + f.dvv * z.dv + f.dv * z.dvv,
    )
    return tuple(np.broadcast_arrays(*out)) if np.ndim(u) or np.ndim(v) else out


@dataclass(frozen=True)
class FlexCheck:
    max_first_order: float
    max_second_order: float
    worst_point: tuple[float, float]
    tol: float
    n_points: int

    @property
    def passed(self) -> bool:
        return self.max_first_order <= self.tol and self.max_second_order <= self.tol


def check_flex(p: MongePatch, flex: FlexField, n: int = 10, tol: float = FLEX_TOL) -> FlexCheck:
    """Max-abs residuals of the first- and second-order flex equations on an ``n × n`` sample grid."""
    u, v = p.domain.sample_points(n)
    first = np.abs(np.stack(flex_residuals_monge(p, flex, u, v))).max(axis=0)
    second = np.abs(np.stack(second_order_identities(p, flex, u, v))).max(axis=0)
    k = int(np.argmax(first))
    return FlexCheck(
        max_first_order=float(first.max()),
        max_second_order=float(second.max()),
        worst_point=(float(u[k]), float(v[k])),
        tol=tol,
        n_points=u.size,
    )


def require_flex(p: MongePatch, flex: FlexField, tol: float = FLEX_TOL, n: int = 10) -> None:
    """Raise :class:`PreconditionError` unless the first-order flex residuals vanish at the sample points."""
    u, v = p.domain.sample_points(n)
    res = np.abs(np.stack(flex_residuals_monge(p, flex, u, v))).max(axis=0)
    k = int(np.argmax(res))
    if not res[k] <= tol:
        point = (float(u[k]), float(v[k]))
        raise PreconditionError(
            f"not an infinitesimal flex: residual {res[k]:.3e} > {tol:g} at (u, v) = {point}",
            worst_residual=float(res[k]),
            point=point,
        )


# -- rigid-motion subspace on sample points ------------------------------------------


def rigid_basis(points: np.ndarray, weight: float = 1.0) -> np.ndarray:
    """Orthonormal basis (columns, flattened component-major) of the six rigid-motion fields
    sampled at ``points`` (shape (3, N)), in the inner product ``weight * Σ x·y``.

    Built by modified Gram-Schmidt; generators that are numerically dependent
    on earlier ones (possible for degenerate point sets) are dropped.
    """
    n = points.shape[1]
    gens = []
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        gens.append(np.repeat(e[:, None], n, axis=1))
    for i in range(3):
        b = np.zeros(3)
        b[i] = 1.0
        gens.append(cross(np.repeat(b[:, None], n, axis=1), points))
    basis = []
    for g in gens:
        w = g.ravel().astype(float)
        scale = math.sqrt(weight * (w @ w)) or 1.0
        for q in basis:
            w = w - weight * (q @ w) * q
        norm = math.sqrt(weight * (w @ w))
        if norm > 1e-10 * scale:
            basis.append(w / norm)
    return np.array(basis).T


def triviality_of_values(values: np.ndarray, points: np.ndarray, weight: float = 1.0) -> float:
    """Relative norm of the projection of sampled velocities (3, N) onto the rigid motions, in [0, 1]."""
    x = values.reshape(3, -1).ravel()
    total = math.sqrt(weight * (x @ x))
    if total == 0:
        return 0.0
    Q = rigid_basis(points.reshape(3, -1), weight)
    coeffs = weight * (Q.T @ x)
    return min(1.0, float(math.sqrt(weight * (coeffs @ coeffs)) / total))


def triviality_of_field(p, flex: FlexField, n: int = 16) -> float:
    u, v = p.domain.sample_points(n)
    pts = stack(p.position_jets(u, v), "value")
    return triviality_of_values(flex(u, v), pts)


# -- discrete construction ---------------------------------------------------------


def diff_matrix(n: int, h: float) -> np.ndarray:
    """Second-order first-derivative matrix: centred inside, one-sided at both ends."""
    D = np.zeros((n, n))
    for i in range(1, n - 1):
        D[i, i - 1] = -0.5 / h
        D[i, i + 1] = 0.5 / h
    D[0, :3] = np.array([-3.0, 4.0, -1.0]) / (2 * h)
    D[-1, -3:] = np.array([1.0, -4.0, 3.0]) / (2 * h)
    return D


def second_diff_matrix(n: int, h: float) -> np.ndarray:
    D = np.zeros((n, n))
    for i in range(1, n - 1):
        D[i, i - 1 : i + 2] = np.array([1.0, -2.0, 1.0]) / h**2
    D[0, :4] = np.array([2.0, -5.0, 4.0, -1.0]) / h**2
    D[-1, -4:] = np.array([-1.0, 4.0, -5.0, 2.0]) / h**2
    return D


class SplineField:
    """Bicubic interpolant of grid values, exposing jets like an expression field."""

    def __init__(self, us, vs, values):
        self.spline = RectBivariateSpline(us, vs, values, kx=3, ky=3)

    def jet(self, u, v) -> Jet2:
        s = self.spline
        u_arr, v_arr = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        parts = [s.ev(u_arr, v_arr, dx=a, dy=b) for a, b in ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))]
        if u_arr.ndim == 0:
            parts = [float(x) for x in parts]
        return Jet2(*parts)


@dataclass
class DiscreteFlex:
    """Grid-sampled flex ``values[k, i, j]`` (component k at node ``(us[i], vs[j])``)."""

    us: np.ndarray
    vs: np.ndarray
    values: np.ndarray
    residual_norm: float
    triviality_score: float
    kernel_dimension: int
    nontrivial: bool
    status: str
    metadata: dict = field(default_factory=dict)

    @property
    def cell_area(self) -> float:
        return float((self.us[1] - self.us[0]) * (self.vs[1] - self.vs[0]))

    def grid_norm(self) -> float:
        return math.sqrt(self.cell_area * float(np.sum(self.values**2)))

    def points(self, patch: MongePatch) -> np.ndarray:
        uu, vv = np.meshgrid(self.us, self.vs, indexing="ij")
        return stack(patch.position_jets(uu, vv), "value")

    def interpolate(self) -> FlexField:
        return FlexField(*(SplineField(self.us, self.vs, self.values[k]) for k in range(3)))

    def rows(self):
        for i, u in enumerate(self.us):
            for j, v in enumerate(self.vs):
                yield (float(u), float(v), *(float(x) for x in self.values[:, i, j]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["u", "v", "xi", "eta", "zeta"])
        for row in self.rows():
            w.writerow([repr(x) for x in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "n_u": len(self.us),
            "n_v": len(self.vs),
            "u_nodes": [float(x) for x in self.us],
            "v_nodes": [float(x) for x in self.vs],
            "residual_norm": self.residual_norm,
            "triviality_score": self.triviality_score,
            "kernel_dimension": self.kernel_dimension,
            "nontrivial": self.nontrivial,
            "status": self.status,
            "metadata": self.metadata,
            "xi": self.values[0].ravel().tolist(),
            "eta": self.values[1].ravel().tolist(),
            "zeta": self.values[2].ravel().tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> DiscreteFlex:
        n_u, n_v = d["n_u"], d["n_v"]
        values = np.stack([np.asarray(d[k], dtype=float).reshape(n_u, n_v) for k in ("xi", "eta", "zeta")])
        return cls(
            us=np.asarray(d["u_nodes"], dtype=float),
            vs=np.asarray(d["v_nodes"], dtype=float),
            values=values,
            residual_norm=d["residual_norm"],
            triviality_score=d["triviality_score"],
            kernel_dimension=d["kernel_dimension"],
            nontrivial=d["nontrivial"],
            status=d["status"],
            metadata=d.get("metadata", {}),
        )


def assemble_flex_system(p: MongePatch, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """Matrix of the discretized Monge flex equations acting on ``[ξ; η; ζ]`` (each flattened ``ij``).

    One row per equation per grid node; derivatives of the unknowns use
    :func:`diff_matrix`, derivatives of ``f`` are exact.
    """
    n_u, n_v = len(us), len(vs)
    Du = np.kron(diff_matrix(n_u, us[1] - us[0]), np.eye(n_v))
    Dv = np.kron(np.eye(n_u), diff_matrix(n_v, vs[1] - vs[0]))
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    fj = p.f.jet(uu.ravel(), vv.ravel())
    fu = np.asarray(fj.du, dtype=float)[:, None]
    fv = np.asarray(fj.dv, dtype=float)[:, None]
    Z = np.zeros_like(Du)
    return np.block(
        [
            [Du, Z, fu * Du],
            [Dv, Du, fv * Du + fu * Dv],
            [Z, Dv, fv * Dv],
        ]
    )


def _roughness_operator(us, vs) -> np.ndarray:
    n_u, n_v = len(us), len(vs)
    hu, hv = us[1] - us[0], vs[1] - vs[0]
    Iu, Iv, I3 = np.eye(n_u), np.eye(n_v), np.eye(3)
    blocks = [
        np.kron(second_diff_matrix(n_u, hu), Iv),
        math.sqrt(2.0) * np.kron(diff_matrix(n_u, hu), diff_matrix(n_v, hv)),
        np.kron(Iu, second_diff_matrix(n_v, hv)),
    ]
    return np.vstack([np.kron(I3, B) for B in blocks])


def construct_flex_numeric(p: MongePatch, n_u: int, n_v: int, rcond: float = 1e-10) -> DiscreteFlex:
    """Find a nontrivial discrete flex of a Monge patch over a rectangle.

    The kernel of the discretized flex system is computed by SVD with
    relative tolerance ``rcond``; kernel vectors are restricted to the
    orthogonal complement of the rigid motions, and among those the one
    with the least discrete second-derivative energy is returned, scaled to
    unit grid L² norm.  If nothing survives the deflation the result has
    ``nontrivial=False`` and holds the least-residual field orthogonal to
    the rigid motions.
    """
    if n_u < 4 or n_v < 4:
        raise PreconditionError(f"grid must be at least 4 x 4, got {n_u} x {n_v}")
    if not isinstance(p.domain, Rectangle):
        raise ValidationError("discrete flex construction needs a rectangular domain")
    d = p.domain
    us = np.linspace(d.u_min, d.u_max, n_u)
    vs = np.linspace(d.v_min, d.v_max, n_v)
    weight = float((us[1] - us[0]) * (vs[1] - vs[0]))

    A = assemble_flex_system(p, us, vs)
    kernel = scipy.linalg.null_space(A, rcond=rcond)
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    pts = stack(p.position_jets(uu.ravel(), vv.ravel()), "value")
    Q = rigid_basis(pts, weight)

    survivors = kernel @ scipy.linalg.null_space(Q.T @ kernel, rcond=1e-8) if kernel.size else kernel
    nontrivial = survivors.shape[1] > 0
    if nontrivial:
        survivors, _ = np.linalg.qr(survivors)
        rough = _roughness_operator(us, vs) @ survivors
        _, vecs = np.linalg.eigh(rough.T @ rough)
        x = survivors @ vecs[:, 0]
        status = "nontrivial flex found"
    else:
        # least residual over the rigid complement
        comp = scipy.linalg.null_space(Q.T)
        _, _, vt = np.linalg.svd(A @ comp, full_matrices=False)
        x = comp @ vt[-1]
        status = "numerically rigid at this resolution"

    x = x / math.sqrt(weight * float(x @ x))
    # fix the overall sign so repeated runs agree
    k = int(np.argmax(np.abs(x)))
    if x[k] < 0:
        x = -x
    values = x.reshape(3, n_u, n_v)
    residual = math.sqrt(weight) * float(np.linalg.norm(A @ x))
    score = triviality_of_values(values, pts, weight)
    return DiscreteFlex(
        us=us,
        vs=vs,
        values=values,
        residual_norm=residual,
        triviality_score=score,
        kernel_dimension=int(kernel.shape[1]),
        nontrivial=bool(nontrivial and score < 0.5),
        status=status,
        metadata={
            "surface": p.describe(),
            "domain": d.describe(),
            "rcond": rcond,
            "survivor_dimension": int(survivors.shape[1]),
        },
    )


def triviality_score(d: DiscreteFlex, p: MongePatch) -> float:
    """Relative grid-L² norm of the projection of ``d`` onto the rigid motions of ``p``."""
    return triviality_of_values(d.values, d.points(p), d.cell_area)
