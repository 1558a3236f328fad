"""Tree-structured physical asset: global fields, parts, joints, materials.

Canonical text form (header line ``ASSET v1``):

    ASSET v1
    category: <one line>
    description: <one line>
    scale_m: <x> <y> <z>
    deformable: true|false
    part {
      id: <int>
      name: <one line>
      description: <one line>
      parent: none|<int>
      material.name: <one line>
      material.density: <float>
      material.youngs_modulus: <float>
      material.poisson_ratio: <float>
      affordance: <float>
      joint.kind: FIXED|REVOLUTE|PRISMATIC|CONTINUOUS
      joint.origin_m: <x> <y> <z>
      joint.axis: <x> <y> <z>
      joint.limit_lower: <float>      (revolute/prismatic only)
      joint.limit_upper: <float>      (revolute/prismatic only)
      geometry: <part code text>
    }

Field order is fixed, parts are ordered by id, floats print as their
shortest round-trippable decimal, and part-block lines are indented with
two spaces. serialize -> parse -> serialize is byte identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .codec import PartCode, parse_part, serialize_part
from .errors import AssetError, CodeParseError

HEADER = "ASSET v1"
AXIS_NORM_TOL = 1e-9


class JointKind(Enum):
    FIXED = "FIXED"
    REVOLUTE = "REVOLUTE"
    PRISMATIC = "PRISMATIC"
    CONTINUOUS = "CONTINUOUS"


@dataclass(frozen=True)
class MaterialSpec:
    name: str
    density: float  # kg/m^3
    youngs_modulus: float  # Pa
    poisson_ratio: float


@dataclass(frozen=True)
class JointSpec:
    kind: JointKind
    origin_m: tuple[float, float, float] = (0.0, 0.0, 0.0)
    axis: tuple[float, float, float] = (0.0, 0.0, 1.0)
    limit_lower: float | None = None
    limit_upper: float | None = None

    @property
    def has_limits(self) -> bool:
        return self.limit_lower is not None and self.limit_upper is not None


@dataclass(frozen=True)
class PartSpec:
    id: int
    name: str
    description: str
    parent: int | None
    material: MaterialSpec
    affordance: float  # interaction priority in [0, 1]
    joint: JointSpec
    geometry: PartCode


@dataclass(frozen=True)
class PhysicalAsset:
    category: str
    description: str
    scale_m: tuple[float, float, float]
    deformable: bool
    parts: tuple[PartSpec, ...]

    def part_by_id(self, part_id: int) -> PartSpec:
        for part in self.parts:
            if part.id == part_id:
                return part
        raise KeyError(part_id)

    @property
    def root(self) -> PartSpec:
        for part in self.parts:
            if part.parent is None:
                return part
        raise AssetError("asset has no root part")


@dataclass(frozen=True)
class Violation:
    """One failed invariant; ``part_id`` is None for asset-level rules."""

    part_id: int | None
    field: str
    message: str

    def __str__(self) -> str:
        where = "asset" if self.part_id is None else f"part {self.part_id}"
        return f"{where}: {self.field}: {self.message}"


def _finite(*values) -> bool:
    return all(math.isfinite(v) for v in values)


def validate(asset: PhysicalAsset) -> list[Violation]:
    """All invariant violations; an empty list means the asset is valid."""
    out: list[Violation] = []

    if not asset.parts:
        out.append(Violation(None, "parts", "asset needs at least one part"))
        return out

    if any(not math.isfinite(c) or c <= 0 for c in asset.scale_m):
        out.append(Violation(None, "scale_m", "components must be positive"))
    for name in ("category", "description"):
        if "\n" in getattr(asset, name):
            out.append(Violation(None, name, "must be a single line"))

    ids = [p.id for p in asset.parts]
    if len(set(ids)) != len(ids):
        out.append(Violation(None, "parts", "part ids must be unique"))
    known = set(ids)

    roots = [p for p in asset.parts if p.parent is None]
    if len(roots) != 1:
        out.append(Violation(None, "parts",
                             f"expected exactly one root part, found {len(roots)}"))

    resolutions = {p.geometry.resolution for p in asset.parts}
    if len(resolutions) > 1:
        out.append(Violation(None, "geometry",
                             f"mixed grid resolutions {sorted(resolutions)}"))

    for p in asset.parts:
        if p.id < 0:
            out.append(Violation(p.id, "id", "must be >= 0"))
        if p.parent == p.id:
            out.append(Violation(p.id, "parent", "part cannot be its own parent"))
        elif p.parent is not None and p.parent not in known:
            out.append(Violation(p.id, "parent", f"unknown part {p.parent}"))
        for name in ("name", "description"):
            if "\n" in getattr(p, name):
                out.append(Violation(p.id, name, "must be a single line"))

        m = p.material
        if not (_finite(m.density) and m.density > 0):
            out.append(Violation(p.id, "material.density", "must be > 0"))
        if not (_finite(m.youngs_modulus) and m.youngs_modulus > 0):
            out.append(Violation(p.id, "material.youngs_modulus", "must be > 0"))
        if not (_finite(m.poisson_ratio) and -1.0 < m.poisson_ratio < 0.5):
            out.append(Violation(p.id, "material.poisson_ratio",
                                 "must lie in (-1, 0.5)"))

        if not (_finite(p.affordance) and 0.0 <= p.affordance <= 1.0):
            out.append(Violation(p.id, "affordance", "must lie in [0, 1]"))

        j = p.joint
        if not _finite(*j.origin_m) or not _finite(*j.axis):
            out.append(Violation(p.id, "joint", "non-finite joint geometry"))
        elif j.kind is not JointKind.FIXED:
            norm = math.sqrt(sum(a * a for a in j.axis))
            if abs(norm - 1.0) > AXIS_NORM_TOL:
                out.append(Violation(p.id, "joint.axis",
                                     f"must be a unit vector (norm {norm:.3g})"))
        if j.kind in (JointKind.REVOLUTE, JointKind.PRISMATIC):
            if not j.has_limits:
                out.append(Violation(p.id, "joint.limit_lower",
                                     f"{j.kind.value} joints need limits"))
            elif j.limit_lower > j.limit_upper:
                out.append(Violation(p.id, "joint.limit_lower",
                                     "limit_lower must be <= limit_upper"))
        else:
            if j.limit_lower is not None or j.limit_upper is not None:
                out.append(Violation(p.id, "joint.limit_lower",
                                     f"{j.kind.value} joints carry no limits"))
        if p.parent is None and j.kind is not JointKind.FIXED:
            out.append(Violation(p.id, "joint.kind", "root joint must be FIXED"))
        if asset.deformable and j.kind is not JointKind.FIXED:
            out.append(Violation(p.id, "joint.kind",
                                 "deformable assets carry FIXED joints only"))

    # reachability from the root (also rejects parent cycles)
    if len(roots) == 1 and len(set(ids)) == len(ids):
        children: dict[int, list[int]] = {i: [] for i in ids}
        for p in asset.parts:
            if p.parent is not None and p.parent in known and p.parent != p.id:
                children[p.parent].append(p.id)
        seen = set()
        stack = [roots[0].id]
        while stack:
            i = stack.pop()
            if i in seen:
                continue
            seen.add(i)
            stack.extend(children[i])
        for p in asset.parts:
            if p.id not in seen:
                out.append(Violation(p.id, "parent",
                                     "not reachable from the root part"))
    return out


def _fmt(value: float) -> str:
    return repr(float(value))


def _fmt3(triple) -> str:
    return " ".join(_fmt(v) for v in triple)


def serialize_asset(asset: PhysicalAsset) -> str:
    """Canonical byte-stable text form; rejects invalid assets."""
    violations = validate(asset)
    if violations:
        raise AssetError("invalid asset: " + "; ".join(str(v) for v in violations),
                         part_id=violations[0].part_id,
                         field=violations[0].field)

    lines = [
        HEADER,
        f"category: {asset.category}",
        f"description: {asset.description}",
        f"scale_m: {_fmt3(asset.scale_m)}",
        f"deformable: {'true' if asset.deformable else 'false'}",
    ]
    for part in sorted(asset.parts, key=lambda p: p.id):
        j = part.joint
        lines.append("part {")
        lines.append(f"  id: {part.id}")
        lines.append(f"  name: {part.name}")
        lines.append(f"  description: {part.description}")
        parent = "none" if part.parent is None else str(part.parent)
        lines.append(f"  parent: {parent}")
        lines.append(f"  material.name: {part.material.name}")
        lines.append(f"  material.density: {_fmt(part.material.density)}")
        lines.append(
            f"  material.youngs_modulus: {_fmt(part.material.youngs_modulus)}")
        lines.append(
            f"  material.poisson_ratio: {_fmt(part.material.poisson_ratio)}")
        lines.append(f"  affordance: {_fmt(part.affordance)}")
        lines.append(f"  joint.kind: {j.kind.value}")
        lines.append(f"  joint.origin_m: {_fmt3(j.origin_m)}")
        lines.append(f"  joint.axis: {_fmt3(j.axis)}")
        if j.has_limits:
            lines.append(f"  joint.limit_lower: {_fmt(j.limit_lower)}")
            lines.append(f"  joint.limit_upper: {_fmt(j.limit_upper)}")
        lines.append(f"  geometry: {serialize_part(part.geometry)}")
        lines.append("}")
    return "\n".join(lines) + "\n"


class _LineReader:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    @property
    def lineno(self) -> int:
        return self.pos  # 1-based number of the line just consumed

    def next(self) -> str | None:
        if self.pos >= len(self.lines):
            return None
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def peek(self) -> str | None:
        return self.lines[self.pos] if self.pos < len(self.lines) else None


def _take(reader: _LineReader, key: str, indent: str = "",
          part_id: int | None = None) -> str:
    line = reader.next()
    prefix = f"{indent}{key}: "
    if line is None:
        raise AssetError(f"unexpected end of input, expected '{key}'",
                         line=len(reader.lines), part_id=part_id, field=key)
    if not line.startswith(prefix):
        raise AssetError(f"expected '{prefix.rstrip()}'", line=reader.lineno,
                         column=1, part_id=part_id, field=key)
    return line[len(prefix):]


def _parse_float(text: str, lineno: int, key: str,
                 part_id: int | None = None) -> float:
    try:
        return float(text)
    except ValueError:
        raise AssetError(f"not a number: {text!r}", line=lineno,
                         part_id=part_id, field=key) from None


def _parse_triple(text: str, lineno: int, key: str,
                  part_id: int | None = None) -> tuple[float, float, float]:
    parts = text.split(" ")
    if len(parts) != 3:
        raise AssetError("expected three numbers", line=lineno,
                         part_id=part_id, field=key)
    return tuple(_parse_float(p, lineno, key, part_id) for p in parts)


def parse_asset(text: str) -> PhysicalAsset:
    """Strict parse of the canonical form; validates every invariant."""
    reader = _LineReader(text)
    header = reader.next()
    if header != HEADER:
        raise AssetError(f"expected header {HEADER!r}", line=1, column=1)

    category = _take(reader, "category")
    description = _take(reader, "description")
    scale_line = _take(reader, "scale_m")
    scale = _parse_triple(scale_line, reader.lineno, "scale_m")
    deformable_text = _take(reader, "deformable")
    if deformable_text not in ("true", "false"):
        raise AssetError("deformable must be 'true' or 'false'",
                         line=reader.lineno, field="deformable")
    deformable = deformable_text == "true"

    parts: list[PartSpec] = []
    while True:
        line = reader.next()
        if line is None:
            break
        if line == "":
            raise AssetError("blank lines are not part of the canonical form",
                             line=reader.lineno)
        if line != "part {":
            raise AssetError("expected 'part {'", line=reader.lineno, column=1)
        parts.append(_parse_part_block(reader))

    asset = PhysicalAsset(category, description, scale, deformable,
                          tuple(parts))
    violations = validate(asset)
    if violations:
        v = violations[0]
        raise AssetError(v.message, part_id=v.part_id, field=v.field)
    return asset


def _parse_part_block(reader: _LineReader) -> PartSpec:
    pid_text = _take(reader, "id", "  ")
    try:
        pid = int(pid_text)
    except ValueError:
        raise AssetError(f"not an integer: {pid_text!r}", line=reader.lineno,
                         field="id") from None

    name = _take(reader, "name", "  ", pid)
    description = _take(reader, "description", "  ", pid)
    parent_text = _take(reader, "parent", "  ", pid)
    if parent_text == "none":
        parent = None
    else:
        try:
            parent = int(parent_text)
        except ValueError:
            raise AssetError(f"not an integer or 'none': {parent_text!r}",
                             line=reader.lineno, part_id=pid,
                             field="parent") from None

    mat_name = _take(reader, "material.name", "  ", pid)
    density = _parse_float(_take(reader, "material.density", "  ", pid),
                           reader.lineno, "material.density", pid)
    youngs = _parse_float(_take(reader, "material.youngs_modulus", "  ", pid),
                          reader.lineno, "material.youngs_modulus", pid)
    poisson = _parse_float(_take(reader, "material.poisson_ratio", "  ", pid),
                           reader.lineno, "material.poisson_ratio", pid)
    affordance = _parse_float(_take(reader, "affordance", "  ", pid),
                              reader.lineno, "affordance", pid)

    kind_text = _take(reader, "joint.kind", "  ", pid)
    try:
        kind = JointKind(kind_text)
    except ValueError:
        raise AssetError(f"unknown joint kind {kind_text!r}",
                         line=reader.lineno, part_id=pid,
                         field="joint.kind") from None
    origin = _parse_triple(_take(reader, "joint.origin_m", "  ", pid),
                           reader.lineno, "joint.origin_m", pid)
    axis = _parse_triple(_take(reader, "joint.axis", "  ", pid),
                         reader.lineno, "joint.axis", pid)

    lower = upper = None
    if reader.peek() is not None and \
            reader.peek().startswith("  joint.limit_lower: "):
        lower = _parse_float(_take(reader, "joint.limit_lower", "  ", pid),
                             reader.lineno, "joint.limit_lower", pid)
        upper = _parse_float(_take(reader, "joint.limit_upper", "  ", pid),
                             reader.lineno, "joint.limit_upper", pid)

    geometry_text = _take(reader, "geometry", "  ", pid)
    try:
        geometry = parse_part(geometry_text)
    except CodeParseError as err:
        raise AssetError(f"bad geometry code: {err}", line=reader.lineno,
                         part_id=pid, field="geometry") from None

    closing = reader.next()
    if closing != "}":
        raise AssetError("expected '}' closing the part block",
                         line=reader.lineno, part_id=pid)

    return PartSpec(pid, name, description, parent,
                    MaterialSpec(mat_name, density, youngs, poisson),
                    affordance,
                    JointSpec(kind, origin, axis, lower, upper),
                    geometry)


def affordance_ranking(asset: PhysicalAsset) -> list[int]:
    """Part ids ordered by affordance descending, ties by ascending id."""
    return [p.id for p in sorted(asset.parts,
                                 key=lambda p: (-p.affordance, p.id))]


def asset_to_mapping(asset: PhysicalAsset) -> dict:
    """Plain-data view of an asset (JSON-ready), geometry kept as code text."""
    return {
        "category": asset.category,
        "description": asset.description,
        "scale_m": list(asset.scale_m),
        "deformable": asset.deformable,
        "parts": [
            {
                "id": p.id,
                "name": p.name,
                "description": p.description,
                "parent": p.parent,
                "material": {
                    "name": p.material.name,
                    "density": p.material.density,
                    "youngs_modulus": p.material.youngs_modulus,
                    "poisson_ratio": p.material.poisson_ratio,
                },
                "affordance": p.affordance,
                "joint": {
                    "kind": p.joint.kind.value,
                    "origin_m": list(p.joint.origin_m),
                    "axis": list(p.joint.axis),
                    "limit_lower": p.joint.limit_lower,
                    "limit_upper": p.joint.limit_upper,
                },
                "geometry": serialize_part(p.geometry),
            }
            for p in sorted(asset.parts, key=lambda p: p.id)
        ],
    }
