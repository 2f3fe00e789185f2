"""Scenario files: flat ``key = value`` text, one key per line, ``#`` comments.

Example::

    surface = paraboloid
    domain = rect:-1,1,-1,1
    flex = rotate:0.3,-0.7,1
    nodes = 64
    boundary_nodes = 64
    fd_step = 0.001
    t_list = -0.1,0,0.1
    format = json
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .catalog import is_construct, parse_construct, resolve_flex, resolve_surface
from .errors import ValidationError
from .flex import FlexField
from .geometry import MongePatch
from .quadrature import BoundaryQuadratureSpec, QuadratureSpec, parse_domain

FORMATS = ("json", "csv", "text")


class ScenarioError(ValidationError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"scenario field {key!r}: {message}")


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_floats(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(float(x) for x in text.split(","))


@dataclass(frozen=True)
class Scenario:
    surface: str = "plane"
    domain: str | None = None
    flex: str | None = None
    nodes: int = 64
    boundary_nodes: int = 64
    boundary_panels: int = 1
    fd_step: float = 1e-3
    richardson: bool = True
    t_list: tuple[float, ...] | None = None
    samples: int = 10
    format: str = "json"
    erratum_probe: bool = False

    _parsers = {
        "surface": str.strip,
        "domain": str.strip,
        "flex": str.strip,
        "nodes": int,
        "boundary_nodes": int,
        "boundary_panels": int,
        "fd_step": float,
        "richardson": _parse_bool,
        "t_list": _parse_floats,
        "samples": int,
        "format": str.strip,
        "erratum_probe": _parse_bool,
    }

    @classmethod
    def keys(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    @classmethod
    def from_mapping(cls, mapping: dict, base: Scenario | None = None) -> Scenario:
        """Build from string (or already-typed) values, rejecting unknown keys and bad values."""
        values = {}
        for key, raw in mapping.items():
            if key not in cls._parsers:
                raise ScenarioError(key, f"unknown key (known: {', '.join(cls.keys())})")
            if raw is None:
                values[key] = None
                continue
            try:
                if isinstance(raw, str):
                    values[key] = cls._parsers[key](raw)
                elif key == "t_list":
                    values[key] = tuple(float(x) for x in raw)
                else:
                    values[key] = raw
            except (TypeError, ValueError) as exc:
                raise ScenarioError(key, str(exc)) from None
        return replace(base or cls(), **values)

    @classmethod
    def from_text(cls, text: str) -> Scenario:
        mapping = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValidationError(f"scenario line {lineno}: expected 'key = value', got {line!r}")
            key = key.strip()
            if key in mapping:
                raise ScenarioError(key, f"given twice (line {lineno})")
            mapping[key] = value.strip()
        return cls.from_mapping(mapping)

    @classmethod
    def load(cls, path: str | Path) -> Scenario:
        """Read a key-value scenario file, or the ``scenario`` block of a JSON report."""
        text = Path(path).read_text(encoding="utf-8")
        if text.lstrip().startswith("{"):
            try:
                data = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: invalid JSON: {exc}") from None
            block = data.get("scenario", data)
            return cls.from_mapping(block)
        return cls.from_text(text)

    def to_dict(self) -> dict:
        d = {}
        for f in fields(self):
            val = getattr(self, f.name)
            d[f.name] = list(val) if isinstance(val, tuple) else val
        return d

    def to_text(self) -> str:
        lines = []
        for key, val in self.to_dict().items():
            if val is None:
                continue
            if isinstance(val, bool):
                val = "true" if val else "false"
            elif isinstance(val, list):
                val = ",".join(repr(float(x)) for x in val)
            elif isinstance(val, float):
                val = repr(val)
            lines.append(f"{key} = {val}")
        return "\n".join(lines) + "\n"

    # -- resolution ---------------------------------------------------------------

    def validate(self) -> None:
        if self.format not in FORMATS:
            raise ScenarioError("format", f"must be one of {', '.join(FORMATS)}")
        for key in ("nodes", "boundary_nodes", "boundary_panels", "samples"):
            if getattr(self, key) < (2 if key in ("nodes", "samples") else 1):
                raise ScenarioError(key, f"too small: {getattr(self, key)}")
        if not self.fd_step > 0:
            raise ScenarioError("fd_step", "must be positive")

    def patch(self) -> MongePatch:
        domain = None
        if self.domain:
            try:
                domain = parse_domain(self.domain)
            except ValidationError as exc:
                raise ScenarioError("domain", str(exc)) from None
        try:
            return resolve_surface(self.surface, domain)
        except ValidationError as exc:
            raise ScenarioError("surface", str(exc)) from None

    def flex_field(self, patch: MongePatch) -> FlexField:
        if not self.flex:
            raise ScenarioError("flex", "required for this command")
        if is_construct(self.flex):
            raise ScenarioError("flex", "a constructed discrete flex is not accepted here; give expressions")
        try:
            return resolve_flex(self.flex, patch)
        except ValidationError as exc:
            raise ScenarioError("flex", str(exc)) from None

    def construct_grid(self) -> tuple[int, int] | None:
        if not self.flex or not is_construct(self.flex):
            return None
        try:
            return parse_construct(self.flex)
        except ValidationError as exc:
            raise ScenarioError("flex", str(exc)) from None

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(self.nodes)

    def boundary_quadrature(self) -> BoundaryQuadratureSpec:
        return BoundaryQuadratureSpec(self.boundary_nodes, self.boundary_panels)
