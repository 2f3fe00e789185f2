"""The first variation of total mean curvature under an infinitesimal flex.

Three independent routes:

* ``variation_surface_integral``: ½ ∬ [(1 + f_v²) ζ_uu - 2 f_u f_v ζ_uv + (1 + f_u²) ζ_vv] du dv,
  using only the vertical component of the flex;
* ``variation_line_integral``: ½ ∮ m·dx over the boundary, with ``m = n' × n``;
* ``variation_finite_difference``: a central difference of the total mean
  curvature of the deformed patches ``x + t v`` at ``t = ±h``.

``printed_line_integral`` evaluates the boundary integrand in the form
``[(1 + f_u²) ζ_v - f_u η_u] du + [ζ_u - f_v η_u - f_u f_v ζ_v] dv``.
Substituting the flex equations into ``m·dx`` gives
``-[(1 + f_u²) ζ_v + f_u η_u] du + [ζ_u - f_v η_u - f_u f_v ζ_v] dv``
instead: the du-coefficients differ by ``2 (1 + f_u²) ζ_v``.  The probe
exists to measure that difference, never to replace the m·dx route.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import NumericalDomainError
from .flex import FLEX_TOL, FlexField, require_flex
from .geometry import (
    AffineField,
    MongePatch,
    ParamPatch,
    check_regular,
    cross,
    dot,
    projected_volume,
    stack,
    surface_area,
    total_gauss_curvature,
    total_mean_curvature,
    unit_normal,
)
from .quadrature import (
    BoundaryQuadratureSpec,
    QuadratureSpec,
    integrate_2d,
    integrate_form,
    richardson,
)

DEFAULT_FD_STEP = 1e-3
TOL_ANALYTIC = 1e-8


def tol_fd(h: float) -> float:
    return 10.0 * h * h


def normal_velocity(p: MongePatch, flex: FlexField, u, v) -> np.ndarray:
    """``n'(x, 0)``: rate of change of the unit normal of ``x + t v`` at ``t = 0``.

    With ``N(t) = ψ_u × ψ_v``, ``N' = x_u × v_v + v_u × x_v`` and
    ``n' = (N' - (N'·n) n) / |N|``.
    """
    xj = p.position_jets(u, v)
    vj = flex.component_jets(u, v)
    xu, xv = stack(xj, "du"), stack(xj, "dv")
    vu, vv = stack(vj, "du"), stack(vj, "dv")
    N = cross(xu, xv)
    length = np.sqrt(dot(N, N))
    n = N / length
    dN = cross(xu, vv) + cross(vu, xv)
    return (dN - dot(dN, n) * n) / length


@dataclass(frozen=True)
class MField:
    """``m = n' × n`` on a Monge patch, with the expanded closed form as a second route."""

    patch: MongePatch
    flex: FlexField

    def __call__(self, u, v) -> np.ndarray:
        n = unit_normal(self.patch, u, v)
        return cross(normal_velocity(self.patch, self.flex, u, v), n)

    def expanded(self, u, v) -> np.ndarray:
        """Closed form in the partial derivatives; equal to ``__call__`` only for genuine flexes."""
        f = self.patch.f.jet(u, v)
        xi, eta, zeta = self.flex.component_jets(u, v)
        fu, fv = f.du, f.dv
        s = fu**2 + fv**2
        W = 1.0 + s
        comps = (
            fu * xi.dv + fv * eta.dv - zeta.dv,
            -fu * xi.du - fv * eta.du + zeta.du,
            -s * eta.du + fv * zeta.du - fu * W * zeta.dv,
        )
        return np.stack(np.broadcast_arrays(*comps)) / W

    def route_discrepancy(self, u, v) -> float:
        return float(np.max(np.abs(self(u, v) - self.expanded(u, v))))


def m_field(p: MongePatch, flex: FlexField, check: bool = True, tol: float = FLEX_TOL) -> MField:
    if check:
        require_flex(p, flex, tol)
    return MField(p, flex)


def surface_integrand(p: MongePatch, flex: FlexField, u, v):
    f = p.f.jet(u, v)
    z = flex.zeta.jet(u, v)
    return (1 + f.dv**2) * z.duu - 2 * f.du * f.dv * z.duv + (1 + f.du**2) * z.dvv


def variation_surface_integral(p: MongePatch, flex: FlexField, q: QuadratureSpec, check: bool = True) -> float:
    """H' from the area integral of the ζ second derivatives (the integral equals 2H')."""
    if check:
        require_flex(p, flex)
    return 0.5 * integrate_2d(lambda u, v: surface_integrand(p, flex, u, v), p.domain, q)


def variation_line_integral(p: MongePatch, flex: FlexField, qb: BoundaryQuadratureSpec, check: bool = True) -> float:
    """``½ ∮ m·dx`` along the positively oriented boundary, with ``dz = f_u du + f_v dv``."""
    m = m_field(p, flex, check)

    def form(u, v):
        mv = m(u, v)
        f = p.f.jet(u, v)
        return mv[0] + f.du * mv[2], mv[1] + f.dv * mv[2]

    return 0.5 * integrate_form(form, p.domain, qb)


def printed_line_coefficients(p: MongePatch, flex: FlexField, u, v):
    f = p.f.jet(u, v)
    _, eta, zeta = flex.component_jets(u, v)
    P = (1 + f.du**2) * zeta.dv - f.du * eta.du
    Q = zeta.du - f.dv * eta.du - f.du * f.dv * zeta.dv
    return P, Q


def direct_line_coefficients(p: MongePatch, flex: FlexField, u, v):
    """``m·dx`` coefficients after substituting the flex equations."""
    f = p.f.jet(u, v)
    _, eta, zeta = flex.component_jets(u, v)
    P = -((1 + f.du**2) * zeta.dv + f.du * eta.du)
    Q = zeta.du - f.dv * eta.du - f.du * f.dv * zeta.dv
    return P, Q


def printed_line_integral(p: MongePatch, flex: FlexField, qb: BoundaryQuadratureSpec) -> float:
    """``½ ∮ [(1 + f_u²) ζ_v - f_u η_u] du + [ζ_u - f_v η_u - f_u f_v ζ_v] dv`` (the erratum probe)."""
    return 0.5 * integrate_form(lambda u, v: printed_line_coefficients(p, flex, u, v), p.domain, qb)


# -- finite-difference oracle ------------------------------------------------------


@dataclass(frozen=True)
class DeformedPatch:
    """``ψ(u, v, t) = (u + t ξ, v + t η, f + t ζ)``."""

    base: MongePatch
    flex: FlexField
    t: float

    def param_patch(self) -> ParamPatch:
        comps = tuple(AffineField(x, d, self.t) for x, d in zip(self.base.position_fields(), self.flex.components))
        return ParamPatch(*comps, self.base.domain, name=f"{self.base.describe()} @ t={self.t!r}")

    def position(self, u, v) -> np.ndarray:
        return stack(self.param_patch().position_jets(u, v), "value")


def regularity_bound(p: MongePatch, flex: FlexField, q: QuadratureSpec) -> float:
    """A ``T`` such that ``x + t v`` is regular at every quadrature node for ``|t| < T``.

    ``ψ_u × ψ_v = N0 + t N1 + t² N2``; it cannot vanish while
    ``|N2| t² + |N1| t < |N0|``.
    """
    nodes = p.domain.area_nodes(q)
    xj = p.position_jets(nodes.u, nodes.v)
    vj = flex.component_jets(nodes.u, nodes.v)
    xu, xv = stack(xj, "du"), stack(xj, "dv")
    vu, vv = stack(vj, "du"), stack(vj, "dv")
    n0 = np.linalg.norm(cross(xu, xv), axis=0)
    n1 = np.linalg.norm(cross(xu, vv) + cross(vu, xv), axis=0)
    n2 = np.linalg.norm(cross(vu, vv), axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        root = np.where(
            n2 > 0,
            (-n1 + np.sqrt(n1 * n1 + 4 * n2 * n0)) / (2 * n2),
            np.where(n1 > 0, n0 / n1, np.inf),
        )
    return float(np.min(root))


def deformed_total_mean_curvature(p: MongePatch, flex: FlexField, t: float, q: QuadratureSpec) -> float:
    dp = DeformedPatch(p, flex, t).param_patch()
    check_regular(dp, q, t)
    return total_mean_curvature(dp, q)


def fd_derivative(p: MongePatch, flex: FlexField, q: QuadratureSpec, h: float) -> float:
    """Plain central difference, no extrapolation."""
    return (deformed_total_mean_curvature(p, flex, h, q) - deformed_total_mean_curvature(p, flex, -h, q)) / (2 * h)


def variation_finite_difference(
    p: MongePatch,
    flex: FlexField,
    q: QuadratureSpec,
    h: float = DEFAULT_FD_STEP,
    use_richardson: bool = True,
    check: bool = True,
) -> float:
    """Central difference of ``t -> H(x + t v)``, optionally with one Richardson step (``h`` and ``h/2``)."""
    if check:
        require_flex(p, flex)
    if not h > 0:
        raise NumericalDomainError(f"finite-difference step must be positive, got {h!r}")
    d_h = fd_derivative(p, flex, q, h)
    if not use_richardson:
        return d_h
    return richardson(d_h, fd_derivative(p, flex, q, h / 2), order=2)


# -- report ------------------------------------------------------------------------


@dataclass
class VariationReport:
    h_surface: float
    h_line: float
    h_fd: float
    tol_analytic: float
    tol_fd: float
    metadata: dict = field(default_factory=dict)
    h_line_printed: float | None = None

    @property
    def disc_sl(self) -> float:
        return abs(self.h_surface - self.h_line)

    @property
    def disc_sf(self) -> float:
        return abs(self.h_surface - self.h_fd)

    @property
    def disc_lf(self) -> float:
        return abs(self.h_line - self.h_fd)

    @property
    def passed(self) -> bool:
        return self.disc_sl <= self.tol_analytic and self.disc_sf <= self.tol_fd

    def to_dict(self) -> dict:
        d = {
            "h_surface": self.h_surface,
            "h_line": self.h_line,
            "h_fd": self.h_fd,
            "disc_sl": self.disc_sl,
            "disc_sf": self.disc_sf,
            "disc_lf": self.disc_lf,
            "pass": self.passed,
            "tol_analytic": self.tol_analytic,
            "tol_fd": self.tol_fd,
        }
        if self.h_line_printed is not None:
            d["h_line_printed"] = self.h_line_printed
            d["disc_printed_fd"] = abs(self.h_line_printed - self.h_fd)
            d["disc_printed_line"] = abs(self.h_line_printed - self.h_line)
        d["metadata"] = dict(self.metadata)
        return d


def _route(name, fn, *args, **kwargs):
    """Run one route, tagging any exception with the route's name for attribution."""
    try:
        return fn(*args, **kwargs)
    except Exception as exc:
        exc.route = name
        raise


def variation_report(
    p: MongePatch,
    flex: FlexField,
    q: QuadratureSpec = QuadratureSpec(64),
    qb: BoundaryQuadratureSpec = BoundaryQuadratureSpec(64),
    h: float = DEFAULT_FD_STEP,
    use_richardson: bool = True,
    tol_analytic: float = TOL_ANALYTIC,
    erratum_probe: bool = False,
) -> VariationReport:
    h_surface = _route("surface", variation_surface_integral, p, flex, q)
    h_line = _route("line", variation_line_integral, p, flex, qb)
    h_fd = _route("finite-difference", variation_finite_difference, p, flex, q, h, use_richardson)
    report = VariationReport(
        h_surface=h_surface,
        h_line=h_line,
        h_fd=h_fd,
        tol_analytic=tol_analytic,
        tol_fd=tol_fd(h),
        metadata={
            "quadrature": q.rule(p.domain),
            "nodes_per_axis": q.nodes_per_axis,
            "boundary_nodes": qb.nodes,
            "boundary_panels": qb.panels,
            "fd_step": h,
            "richardson": use_richardson,
        },
    )
    if erratum_probe:
        report.h_line_printed = _route("printed-line", printed_line_integral, p, flex, qb)
    return report


# -- sweep -------------------------------------------------------------------------

SWEEP_COLUMNS = ("t", "total_mean_curvature", "area", "volume", "total_gauss_curvature", "status")


@dataclass(frozen=True)
class SweepRow:
    t: float
    total_mean_curvature: float
    area: float
    volume: float
    total_gauss_curvature: float
    status: str = "ok"

    def as_dict(self) -> dict:
        return asdict(self)


def invariant_sweep(p: MongePatch, flex: FlexField, t_values, q: QuadratureSpec) -> list[SweepRow]:
    """Total mean curvature, area, projected volume and total Gauss curvature of ``x + t v`` per ``t``.

    Rows where the deformed patch is singular carry the error in ``status``
    and NaN values; the sweep carries on.  Nothing here asserts constancy.
    """
    rows = []
    for t in t_values:
        t = float(t)
        dp = DeformedPatch(p, flex, t).param_patch()
        try:
            check_regular(dp, q, t)
            rows.append(
                SweepRow(
                    t,
                    total_mean_curvature(dp, q),
                    surface_area(dp, q),
                    projected_volume(dp, q),
                    total_gauss_curvature(dp, q),
                )
            )
        except NumericalDomainError as exc:
            nan = math.nan
            rows.append(SweepRow(t, nan, nan, nan, nan, status=f"irregular: {exc}"))
    return rows
