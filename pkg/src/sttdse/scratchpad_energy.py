"""Buffer traffic counting and energy for SRAM, MRAM and MRAM+scratchpad buffers.

Counting rules, per conv layer:

* every output channel streams the whole ifmap once;
* weights are read once per layer;
* each step after the first writes, and later reads back, one partial
  ofmap plane per image and output channel;
* the finished ofmap is written once.

FC weights stream from DRAM and never touch the buffer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core_timing import AcceleratorConfig, conv_steps_per_out_ch
from .errors import ValidationError
from .memory_model import MemTechPoint
from .workload import ModelSpec, layer_footprint, ofmap_dims

DATA_CLASSES = ("ifmap", "weight", "psum", "ofmap")
ARCHITECTURES = ("sram_only", "mram_only", "mram_scratch")


def _accesses(nbytes, width):
    return -(-nbytes // width)


@dataclass(frozen=True)
class PsumLayer:
    name: str
    plane_bytes: int
    steps: int
    reads: int
    writes: int


@dataclass
class TrafficCounts:
    access_width: int = 32
    reads: dict = field(default_factory=lambda: dict.fromkeys(DATA_CLASSES, 0))
    writes: dict = field(default_factory=lambda: dict.fromkeys(DATA_CLASSES, 0))
    psum_layers: list = field(default_factory=list)

    @property
    def total_reads(self) -> int:
        return sum(self.reads.values())

    @property
    def total_writes(self) -> int:
        return sum(self.writes.values())


def count_traffic(model: ModelSpec, cfg: AcceleratorConfig, batch=1, access_width=32) -> TrafficCounts:
    if access_width <= 0:
        raise ValidationError(f"access_width must be positive, got {access_width!r}")
    b = model.datatype_bytes
    counts = TrafficCounts(access_width=access_width)
    for index, layer in enumerate(model.layers):
        if layer.kind == "conv":
            fp = layer_footprint(layer, batch, b)
            steps = conv_steps_per_out_ch(layer, cfg)
            rows, cols = ofmap_dims(layer)
            plane = batch * rows * cols * b
            psum = _accesses((steps - 1) * plane * layer.out_ch, access_width)
            counts.reads["ifmap"] += _accesses(layer.out_ch * fp.ifmap_bytes, access_width)
            counts.reads["weight"] += _accesses(fp.weight_bytes + fp.bias_bytes, access_width)
            counts.reads["psum"] += psum
            counts.writes["psum"] += psum
            counts.writes["ofmap"] += _accesses(fp.ofmap_bytes, access_width)
            if psum:
                counts.psum_layers.append(
                    PsumLayer(layer.name or f"#{index}", plane, steps, psum, psum))
        elif layer.kind == "fc":
            fp = layer_footprint(layer, batch, b)
            counts.reads["ifmap"] += _accesses(fp.ifmap_bytes, access_width)
            counts.writes["ofmap"] += _accesses(fp.ofmap_bytes, access_width)
    return counts


@dataclass(frozen=True)
class BufferEnergy:
    dynamic: float  # J
    leakage: float  # J

    @property
    def total(self) -> float:
        return self.dynamic + self.leakage


def _dynamic(reads, writes, point: MemTechPoint):
    return (reads * point.read_energy + writes * point.write_energy) * 1e-12


def buffer_energy(traffic: TrafficCounts, arch: str, glb: MemTechPoint,
                  scratch: MemTechPoint = None, exec_time=0.0,
                  scratch_leakage_scale=1.0) -> BufferEnergy:
    """Energy of one run through the buffer system.

    ``glb`` is the SRAM point for ``sram_only`` and the MRAM point for the
    other two architectures. With ``mram_scratch`` partial ofmaps go to the
    scratchpad; a plane larger than the scratchpad sends the excess share
    of its traffic back to the GLB. ``scratch_leakage_scale`` models power
    gating of scratchpad banks (0.5 = one of two banks gated).
    """
    if arch not in ARCHITECTURES:
        raise ValidationError(f"arch must be one of {ARCHITECTURES}, got {arch!r}")
    if exec_time < 0:
        raise ValidationError(f"exec_time must be >= 0, got {exec_time!r}")
    leakage = glb.leakage * 1e-3 * exec_time
    if arch != "mram_scratch":
        dynamic = _dynamic(traffic.total_reads, traffic.total_writes, glb)
        return BufferEnergy(dynamic, leakage)

    if scratch is None:
        raise ValidationError("mram_scratch needs a scratchpad tech point")
    glb_reads = traffic.total_reads - traffic.reads["psum"]
    glb_writes = traffic.total_writes - traffic.writes["psum"]
    dynamic = 0.0
    for layer in traffic.psum_layers:
        share = min(1.0, scratch.capacity / layer.plane_bytes)
        dynamic += _dynamic(layer.reads * share, layer.writes * share, scratch)
        dynamic += _dynamic(layer.reads * (1 - share), layer.writes * (1 - share), glb)
    dynamic += _dynamic(glb_reads, glb_writes, glb)
    leakage += scratch.leakage * scratch_leakage_scale * 1e-3 * exec_time
    return BufferEnergy(dynamic, leakage)
