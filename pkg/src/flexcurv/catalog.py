"""Named surfaces, named flexes and the verification catalog of (surface, flex) pairs.

Surface names::

    plane                 f = 0 on [0, 1]^2
    paraboloid            f = (u^2 + v^2)/2 on [-1, 1]^2
    saddle                f = u v on [-1, 1]^2
    cap R=<R> r=<r>       spherical bowl f = R - sqrt(R^2 - u^2 - v^2) on the disk of radius r
    dome R=<R> r=<r>      the same sphere seen from outside, f = sqrt(R^2 - u^2 - v^2)

``cap-R-r`` is accepted as a spelling of ``cap R=<R> r=<r>``.  Anything
else is parsed as an expression for ``f``.

Flex names::

    translate:a1,a2,a3 | rotate:b1,b2,b3 | rigid:a1,a2,a3,b1,b2,b3
    bump                  ζ vanishing to second order on the boundary, ξ = η = 0
    <xi>,<eta>,<zeta>     three expressions
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ValidationError
from .expr import ScalarField2
from .flex import FlexField, rigid_motion_flex
from .geometry import MongePatch
from .quadrature import Disk, Domain2, Rectangle, parse_domain

DEFAULT_DOMAIN = Rectangle(0.0, 1.0, 0.0, 1.0)


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def plane(domain: Domain2 = DEFAULT_DOMAIN) -> MongePatch:
    return MongePatch(ScalarField2.parse("0"), domain, name="plane")


def paraboloid(domain: Domain2 = Rectangle(-1.0, 1.0, -1.0, 1.0)) -> MongePatch:
    return MongePatch(ScalarField2.parse("(u^2+v^2)/2"), domain, name="paraboloid")


def saddle(domain: Domain2 = Rectangle(-1.0, 1.0, -1.0, 1.0)) -> MongePatch:
    return MongePatch(ScalarField2.parse("u*v"), domain, name="saddle")


def cap(R: float = 1.0, r: float = 0.5) -> MongePatch:
    """Spherical cap of radius ``R`` over the disk of radius ``r``, opening upward (mean curvature ``+1/R``)."""
    if not 0 < r < R:
        raise ValidationError(f"cap needs 0 < r < R, got R={R}, r={r}")
    f = ScalarField2.parse(f"{_fmt(R)}-sqrt({_fmt(R)}^2-u^2-v^2)")
    return MongePatch(f, Disk(0.0, 0.0, r), name=f"cap R={_fmt(R)} r={_fmt(r)}")


def dome(R: float = 1.0, r: float = 0.5) -> MongePatch:
    """Upper spherical cap; its mean curvature with respect to the upward normal is ``-1/R``."""
    if not 0 < r < R:
        raise ValidationError(f"dome needs 0 < r < R, got R={R}, r={r}")
    f = ScalarField2.parse(f"sqrt({_fmt(R)}^2-u^2-v^2)")
    return MongePatch(f, Disk(0.0, 0.0, r), name=f"dome R={_fmt(R)} r={_fmt(r)}")


_SPHERE_RE = re.compile(
    r"^(cap|dome)(?:\s+R\s*=\s*(?P<R>[^\s]+)\s+r\s*=\s*(?P<r>[^\s]+)|-(?P<R2>[0-9.eE+]+)-(?P<r2>[0-9.eE+]+))?$"
)


def resolve_surface(text: str, domain: Domain2 | None = None) -> MongePatch:
    """Catalog name or height expression; ``domain`` overrides the catalog default."""
    name = text.strip()
    m = _SPHERE_RE.match(name)
    if m:
        try:
            R = float(m.group("R") or m.group("R2") or 1.0)
            r = float(m.group("r") or m.group("r2") or 0.5)
        except ValueError:
            raise ValidationError(f"bad cap parameters in {text!r}") from None
        patch = (cap if m.group(1) == "cap" else dome)(R, r)
    elif name in ("plane", "paraboloid", "saddle"):
        patch = {"plane": plane, "paraboloid": paraboloid, "saddle": saddle}[name]()
    else:
        patch = MongePatch(ScalarField2.parse(name), DEFAULT_DOMAIN)
    if domain is not None:
        patch = MongePatch(patch.f, domain, name=patch.name)
    return patch


def bump_flex(domain: Domain2) -> FlexField:
    """Vertical field whose ζ and all its first and second derivatives vanish on the boundary of ``domain``."""
    if isinstance(domain, Rectangle):
        a, b, c, d = (_fmt(x) for x in domain.bounds)
        cu = 2.0 / (domain.u_max - domain.u_min)
        cv = 2.0 / (domain.v_max - domain.v_min)
        # normalised so the peak height is 1
        scale = _fmt((cu * cv) ** 6)
        zeta = f"{scale}*((u-{a})*({b}-u)*(v-{c})*({d}-v))^3"
    else:
        cu, cv, r = (_fmt(x) for x in (domain.center_u, domain.center_v, domain.radius))
        zeta = f"({r}^2-(u-{cu})^2-(v-{cv})^2)^3/{r}^6"
    return FlexField.parse(f"0,0,{zeta}")


def _floats(text: str, n: int, what: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise ValidationError(f"bad {what} parameters {text!r}") from None
    if len(vals) != n:
        raise ValidationError(f"{what} needs {n} numbers, got {len(vals)}")
    return vals


def resolve_flex(text: str, patch: MongePatch) -> FlexField:
    name = text.strip()
    kind, sep, rest = name.partition(":")
    kind = kind.strip()
    if sep and kind == "translate":
        return rigid_motion_flex(patch, a=_floats(rest, 3, "translate"))
    if sep and kind == "rotate":
        return rigid_motion_flex(patch, b=_floats(rest, 3, "rotate"))
    if sep and kind == "rigid":
        vals = _floats(rest, 6, "rigid")
        return rigid_motion_flex(patch, vals[:3], vals[3:])
    if name == "bump":
        return bump_flex(patch.domain)
    return FlexField.parse(name)


def is_construct(text: str) -> bool:
    return text.strip().startswith("construct")


def parse_construct(text: str) -> tuple[int, int]:
    """``construct`` (12 x 12) or ``construct:<n_u>x<n_v>``."""
    _, sep, rest = text.strip().partition(":")
    if not sep:
        return 12, 12
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", rest)
    if not m:
        raise ValidationError(f"bad grid {rest!r}; expected <n_u>x<n_v>")
    return int(m.group(1)), int(m.group(2))


@dataclass(frozen=True)
class VerificationPair:
    label: str
    patch: MongePatch
    flex: FlexField


def verification_catalog() -> list[VerificationPair]:
    """The eight (surface, flex) pairs every route must agree on."""
    pl = plane()
    par = paraboloid()
    cp = cap(1.0, 0.5)
    rigid_plus = rigid_motion_flex(pl, (0.25, -0.5, 1.0), (0.5, -1.0, 0.75)) + FlexField.parse("0,0,u^2*v+cos(u)")
    return [
        VerificationPair("plane + zeta=u^2+v^2", pl, FlexField.parse("0,0,u^2+v^2")),
        VerificationPair("plane + zeta=u^2-v^2", pl, FlexField.parse("0,0,u^2-v^2")),
        VerificationPair("plane + zeta=u*v+u^3", pl, FlexField.parse("0,0,u*v+u^3")),
        VerificationPair("plane + bump", pl, bump_flex(pl.domain)),
        VerificationPair("paraboloid + translation", par, rigid_motion_flex(par, a=(1.0, -2.0, 0.5))),
        VerificationPair("paraboloid + rotation", par, rigid_motion_flex(par, b=(0.3, -0.7, 1.0))),
        VerificationPair("cap + rigid", cp, rigid_motion_flex(cp, (0.2, 0.1, -0.3), (1.0, 0.5, -0.25))),
        VerificationPair("plane + rigid + zeta", pl, rigid_plus),
    ]


def curved_flex_catalog() -> list[VerificationPair]:
    """Non-rigid flexes of curved patches, found by integrating the flex equations by hand.

    On the paraboloid the vertical component must be harmonic; ``ζ = u² - v²``
    integrates to ``ξ = -2u³/3``, ``η = 2v³/3``.  On the saddle ``ζ = u²``
    integrates to ``ξ = -u² v``, ``η = -u³/3``.
    """
    par = paraboloid(Rectangle(0.0, 1.0, 0.0, 0.5))
    sad = saddle(Rectangle(-0.5, 1.0, 0.0, 0.75))
    return [
        VerificationPair("paraboloid + harmonic flex", par, FlexField.parse("-2*u^3/3,2*v^3/3,u^2-v^2")),
        VerificationPair("saddle + ruled flex", sad, FlexField.parse("-u^2*v,-u^3/3,u^2")),
    ]


__all__ = [
    "DEFAULT_DOMAIN",
    "VerificationPair",
    "bump_flex",
    "cap",
    "curved_flex_catalog",
    "dome",
    "is_construct",
    "paraboloid",
    "parse_construct",
    "parse_domain",
    "plane",
    "resolve_flex",
    "resolve_surface",
    "saddle",
    "verification_catalog",
]
