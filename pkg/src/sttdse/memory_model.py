"""On-chip memory technology tables, the DRAM model and accelerator roll-ups.

Technology tables are CSV files with ``#`` header directives::

    # schema_version=1
    # technology=mram
    # delta_tag=27.5
    capacity,area,read_e,write_e,leak,width
    32768,0.0225781,5.44194,9.2513,0.0201563,32

Units: capacity and width in bytes, area in mm^2, energies in pJ per
access, leakage in mW.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import TechRangeError, ValidationError
from .workload import ModelSpec, layer_footprint

SCHEMA_VERSION = 1
TECH_COLUMNS = ("capacity", "area", "read_e", "write_e", "leak", "width")
BUNDLED_TABLES = ("sram", "mram_d27p5", "mram_d17p5")


@dataclass(frozen=True)
class MemTechPoint:
    capacity: float
    area: float
    read_energy: float
    write_energy: float
    leakage: float
    access_width: float = 32

    def __post_init__(self):
        for key in ("capacity", "area", "read_energy", "write_energy", "leakage", "access_width"):
            value = getattr(self, key)
            if not value > 0 or math.isinf(value):
                raise ValidationError(f"tech point {key} must be positive, got {value!r}")


_POINT_FIELDS = ("capacity", "area", "read_energy", "write_energy", "leakage", "access_width")


@dataclass(frozen=True)
class MemTechTable:
    technology: str
    points: tuple
    delta_tag: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if self.technology not in ("sram", "mram"):
            raise ValidationError(f"technology must be sram or mram, got {self.technology!r}")
        if len(self.points) < 2:
            raise ValidationError("a technology table needs at least two points")
        caps = [p.capacity for p in self.points]
        if any(b <= a for a, b in zip(caps, caps[1:])):
            raise ValidationError("technology table capacities must be strictly increasing")

    @property
    def capacity_range(self):
        return self.points[0].capacity, self.points[-1].capacity


def interpolate_tech(table: MemTechTable, capacity) -> MemTechPoint:
    """Log-log interpolation of every field; knots are returned unchanged."""
    lo, hi = table.capacity_range
    if not lo <= capacity <= hi:
        raise TechRangeError(
            f"capacity {capacity!r} B outside {table.technology} table range [{lo:g}, {hi:g}]")
    for point in table.points:
        if point.capacity == capacity:
            return point
    caps = np.log([p.capacity for p in table.points])
    x = math.log(capacity)
    values = {"capacity": float(capacity)}
    for key in _POINT_FIELDS[1:]:
        ys = np.log([getattr(p, key) for p in table.points])
        values[key] = float(np.exp(np.interp(x, caps, ys)))
    return MemTechPoint(**values)


def parse_tech_table(text: str, source: str = "<table>") -> MemTechTable:
    meta = {}
    body = []
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("#"):
            key, _, value = stripped.lstrip("#").partition("=")
            meta[key.strip()] = value.strip()
        elif stripped:
            body.append(line)
    if meta.get("schema_version") != str(SCHEMA_VERSION):
        raise ValidationError(f"{source}: expected '# schema_version={SCHEMA_VERSION}'")
    reader = csv.DictReader(io.StringIO("\n".join(body)))
    if tuple(reader.fieldnames or ()) != TECH_COLUMNS:
        raise ValidationError(f"{source}: columns must be {','.join(TECH_COLUMNS)}")
    points = []
    for lineno, row in enumerate(reader, 2):
        try:
            nums = [float(row[c]) for c in TECH_COLUMNS]
        except (TypeError, ValueError):
            raise ValidationError(f"{source}: row {lineno} has a non-numeric value") from None
        points.append(MemTechPoint(*nums))
    delta = meta.get("delta_tag")
    return MemTechTable(meta.get("technology", ""), points, float(delta) if delta else None)


def load_tech_table(path) -> MemTechTable:
    with open(path) as fh:
        return parse_tech_table(fh.read(), str(path))


def bundled_tech_table(name: str) -> MemTechTable:
    """Shipped tables: ``sram``, ``mram_d27p5`` and ``mram_d17p5``."""
    if name not in BUNDLED_TABLES:
        raise ValidationError(f"no bundled tech table {name!r}; choose from {BUNDLED_TABLES}")
    text = resources.files("sttdse.data.tech").joinpath(f"{name}.csv").read_text()
    return parse_tech_table(text, name)


def resolve_tech_table(ref) -> MemTechTable:
    if isinstance(ref, MemTechTable):
        return ref
    if isinstance(ref, str) and ref in BUNDLED_TABLES:
        return bundled_tech_table(ref)
    return load_tech_table(ref)


# -- DRAM -------------------------------------------------------------------

@dataclass(frozen=True)
class DramConfig:
    """Off-chip DRAM. ``energy_per_byte`` (pJ/B) has no default on purpose."""

    energy_per_byte: float
    channels: int = 2
    transfer_rate: float = 2933.0  # MT/s
    bus_bytes: int = 8

    def __post_init__(self):
        for key in ("energy_per_byte", "channels", "transfer_rate", "bus_bytes"):
            value = getattr(self, key)
            if not value > 0:
                raise ValidationError(f"dram.{key} must be positive, got {value!r}")


def dram_bandwidth(cfg: DramConfig) -> float:
    """Peak bandwidth in bytes per second."""
    return cfg.channels * cfg.transfer_rate * 1e6 * cfg.bus_bytes


@dataclass(frozen=True)
class DramTraffic:
    per_layer: tuple  # (layer name, bytes)
    total: int


def extra_dram_traffic(model: ModelSpec, batch, glb_bytes) -> DramTraffic:
    """Bytes each layer spills past the GLB, counted once per layer execution.

    Conv layers need ifmap, weights and ofmap resident; FC layers keep only
    their fmaps on chip.
    """
    if glb_bytes < 0:
        raise ValidationError(f"glb_bytes must be >= 0, got {glb_bytes!r}")
    b = model.datatype_bytes
    rows = []
    for index, layer in enumerate(model.layers):
        if layer.kind == "conv":
            need = layer_footprint(layer, batch, b).total
        elif layer.kind == "fc":
            need = layer_footprint(layer, batch, b).fmap_bytes
        else:
            continue
        rows.append((layer.name or f"#{index}", max(0, need - int(glb_bytes))))
    return DramTraffic(tuple(rows), sum(n for _, n in rows))


@dataclass(frozen=True)
class DramCost:
    seconds: float
    joules: float


def extra_dram_cost(traffic_bytes, dram: DramConfig) -> DramCost:
    if traffic_bytes < 0:
        raise ValidationError(f"traffic must be >= 0, got {traffic_bytes!r}")
    return DramCost(traffic_bytes / dram_bandwidth(dram), traffic_bytes * dram.energy_per_byte * 1e-12)


# -- accelerator roll-up ----------------------------------------------------

@dataclass(frozen=True)
class Component:
    name: str
    area: float  # mm^2
    dynamic: float  # mW
    leakage: float  # mW

    def __post_init__(self):
        for key in ("area", "dynamic", "leakage"):
            value = getattr(self, key)
            if not value >= 0 or math.isinf(value):
                raise ValidationError(f"component {self.name!r}: {key} must be >= 0, got {value!r}")


@dataclass(frozen=True)
class DesignSummary:
    name: str
    area: float
    dynamic: float
    leakage: float
    area_saving_pct: Optional[float] = None
    power_saving_pct: Optional[float] = None

    @property
    def power(self) -> float:
        return self.dynamic + self.leakage


def _totals(name, components: Sequence[Component]) -> DesignSummary:
    return DesignSummary(
        name,
        sum(c.area for c in components),
        sum(c.dynamic for c in components),
        sum(c.leakage for c in components),
    )


def savings_pct(baseline, variant) -> float:
    return (baseline - variant) / baseline * 100.0


def accelerator_summary(designs: Mapping[str, Sequence[Component]], baseline: str):
    """Total each design and report area/power savings against ``baseline``.

    Power is dynamic plus leakage. Returns summaries in input order; the
    baseline carries no savings.
    """
    if baseline not in designs:
        raise ValidationError(f"baseline design {baseline!r} not found")
    base = _totals(baseline, designs[baseline])
    if not base.area > 0 or not base.power > 0:
        raise ValidationError("baseline area and power must be positive")
    out = []
    for name, components in designs.items():
        totals = _totals(name, components)
        if name != baseline:
            totals = DesignSummary(
                name, totals.area, totals.dynamic, totals.leakage,
                savings_pct(base.area, totals.area),
                savings_pct(base.power, totals.power))
        out.append(totals)
    return out
