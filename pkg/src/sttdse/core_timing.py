"""Layer execution time and buffer retention time on the reconfigurable core.

In convolution mode each PE block chains ``p_s`` MACs and the array holds
``w_a * h_a`` blocks; in systolic mode the same hardware is an
``h_a x (p_s * w_a)`` MAC grid. Layers run strictly one after another, and
data written by one layer must survive until the next layer finishes
reading it.

All closed forms count integer clock cycles first and multiply by the
clock period once, so they agree bit-for-bit with
:func:`simulate_schedule_oracle`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError
from .workload import LayerSpec, ModelSpec, ofmap_dims


@dataclass(frozen=True)
class AcceleratorConfig:
    w_a: int = 14
    h_a: int = 42
    p_s: int = 3
    t_clk: float = 1e-9
    n_cyc_conv: int = 17
    n_cyc_sys: int = 11
    t_pool_relu: float = 0.0

    def __post_init__(self):
        for key in ("w_a", "h_a", "p_s", "n_cyc_conv", "n_cyc_sys"):
            value = getattr(self, key)
            if isinstance(value, bool) or int(value) != value or value <= 0:
                raise ValidationError(f"accelerator.{key} must be a positive integer, got {value!r}")
        if not self.t_clk > 0:
            raise ValidationError(f"accelerator.t_clk must be positive, got {self.t_clk!r}")
        if not self.t_pool_relu >= 0:
            raise ValidationError(f"accelerator.t_pool_relu must be >= 0, got {self.t_pool_relu!r}")

    @property
    def w_sa(self) -> int:
        """Systolic-mode array width in MACs."""
        return self.p_s * self.w_a

    @property
    def n_pe(self) -> int:
        return self.w_a * self.h_a


def _ceil_div(a, b):
    return -(-a // b)


def _need(layer, kind):
    if layer.kind != kind:
        raise ValidationError(f"layer {layer.name!r} is {layer.kind}, expected {kind}")


def _check_batch(batch):
    if isinstance(batch, bool) or int(batch) != batch or batch <= 0:
        raise ValidationError(f"batch must be a positive integer, got {batch!r}")


def conv_steps_per_out_ch(layer: LayerSpec, cfg: AcceleratorConfig) -> int:
    """Passes of the full PE array needed for one output channel."""
    _need(layer, "conv")
    rows, _ = ofmap_dims(layer)
    pes = layer.in_ch * layer.k_h * rows * _ceil_div(layer.k_w, cfg.p_s)
    return _ceil_div(pes, cfg.n_pe)


def conv_layer_cycles(layer, cfg, batch=1) -> int:
    _check_batch(batch)
    _, cols = ofmap_dims(layer)
    return conv_steps_per_out_ch(layer, cfg) * cfg.n_cyc_conv * cols * batch * layer.out_ch


def fc_layer_cycles(layer, cfg, batch=1) -> int:
    _need(layer, "fc")
    _check_batch(batch)
    tiles = _ceil_div(layer.m_fc, cfg.h_a) * _ceil_div(layer.n_fc, cfg.w_sa)
    return tiles * cfg.n_cyc_sys * batch


def conv_layer_time(layer: LayerSpec, cfg: AcceleratorConfig, batch=1) -> float:
    return conv_layer_cycles(layer, cfg, batch) * cfg.t_clk


def fc_layer_time(layer: LayerSpec, cfg: AcceleratorConfig, batch=1) -> float:
    return fc_layer_cycles(layer, cfg, batch) * cfg.t_clk


def layer_time(layer: LayerSpec, cfg: AcceleratorConfig, batch=1) -> float:
    if layer.kind == "conv":
        return conv_layer_time(layer, cfg, batch)
    if layer.kind == "fc":
        return fc_layer_time(layer, cfg, batch)
    raise ValidationError(f"layer {layer.name!r}: {layer.kind} layers are not timed")


def retention_conv_conv(layer_a, layer_b, cfg, batch=1) -> float:
    _need(layer_a, "conv")
    _need(layer_b, "conv")
    return conv_layer_time(layer_a, cfg, batch) + cfg.t_pool_relu + conv_layer_time(layer_b, cfg, batch)


def retention_fc_fc(layer_a, layer_b, cfg, batch=1) -> float:
    _need(layer_a, "fc")
    _need(layer_b, "fc")
    return fc_layer_time(layer_a, cfg, batch) + fc_layer_time(layer_b, cfg, batch)


def retention_conv_fc(conv_layer, fc_layer, cfg, batch=1) -> float:
    _need(conv_layer, "conv")
    _need(fc_layer, "fc")
    return conv_layer_time(conv_layer, cfg, batch) + cfg.t_pool_relu + fc_layer_time(fc_layer, cfg, batch)


@dataclass(frozen=True)
class RetentionPair:
    producer: str
    consumer: str
    kind: str
    seconds: float

    @property
    def pair_id(self) -> str:
        return f"{self.producer}->{self.consumer}"


@dataclass(frozen=True)
class RetentionProfile:
    model: str
    batch: int
    pairs: tuple

    @property
    def max_seconds(self) -> float:
        return max((p.seconds for p in self.pairs), default=0.0)


def pair_retention(layer_a, layer_b, cfg, batch=1, pooled=False) -> float:
    """Retention time between two consecutive compute layers.

    ``pooled`` says a pool or relu layer sits between them; conv producers
    always pay the pool/relu time.
    """
    kinds = (layer_a.kind, layer_b.kind)
    if kinds == ("conv", "conv"):
        return retention_conv_conv(layer_a, layer_b, cfg, batch)
    if kinds == ("conv", "fc"):
        return retention_conv_fc(layer_a, layer_b, cfg, batch)
    if kinds == ("fc", "fc"):
        return retention_fc_fc(layer_a, layer_b, cfg, batch) + (cfg.t_pool_relu if pooled else 0.0)
    if kinds == ("fc", "conv"):
        extra = cfg.t_pool_relu if pooled else 0.0
        return fc_layer_time(layer_a, cfg, batch) + extra + conv_layer_time(layer_b, cfg, batch)
    raise ValidationError(f"cannot pair {layer_a.kind} with {layer_b.kind}")


def model_retention_profile(model: ModelSpec, cfg: AcceleratorConfig, batch=1) -> RetentionProfile:
    """Retention time of every consecutive compute-layer pair in execution order."""
    _check_batch(batch)
    pairs = []
    previous = None
    pooled = False
    for index, layer in enumerate(model.layers):
        if not layer.is_compute:
            pooled = True
            continue
        if previous is not None:
            seconds = pair_retention(previous, layer, cfg, batch, pooled)
            pairs.append(RetentionPair(
                previous.name or f"#{prev_index}", layer.name or f"#{index}",
                f"{previous.kind}-{layer.kind}", seconds))
        previous, prev_index, pooled = layer, index, False
    return RetentionProfile(model.name, batch, tuple(pairs))


def simulate_schedule_oracle(layer: LayerSpec, cfg: AcceleratorConfig, batch=1) -> float:
    """Walk the schedule one PE assignment and one array pass at a time.

    Test oracle for :func:`conv_layer_time` and :func:`fc_layer_time`;
    shares no arithmetic with them beyond the output-shape formula.
    """
    _check_batch(batch)
    cycles = 0
    if layer.kind == "conv":
        rows, cols = ofmap_dims(layer)
        for _out_ch in range(layer.out_ch):
            # fill PE blocks with (input channel, kernel row, ofmap row, MAC-width chunk) jobs
            steps = 0
            free = 0
            for _in_ch in range(layer.in_ch):
                for _k_row in range(layer.k_h):
                    for _o_row in range(rows):
                        covered = 0
                        while covered < layer.k_w:
                            if free == 0:
                                steps += 1
                                free = cfg.w_a * cfg.h_a
                            free -= 1
                            covered += cfg.p_s
            for _step in range(steps):
                for _image in range(batch):
                    for _shift in range(cols):
                        cycles += cfg.n_cyc_conv
    elif layer.kind == "fc":
        w_sa = cfg.p_s * cfg.w_a
        for row0 in range(0, layer.m_fc, cfg.h_a):
            for col0 in range(0, layer.n_fc, w_sa):
                for _image in range(batch):
                    cycles += cfg.n_cyc_sys
    else:
        raise ValidationError(f"layer {layer.name!r}: {layer.kind} layers are not timed")
    return cycles * cfg.t_clk


def model_exec_time(model: ModelSpec, cfg: AcceleratorConfig, batch=1) -> float:
    """End-to-end time of one batch: every compute layer plus one pool/relu slot per pool/relu layer."""
    compute = sum(layer_time(layer, cfg, batch) for layer in model.layers if layer.is_compute)
    others = sum(1 for layer in model.layers if not layer.is_compute)
    return compute + others * cfg.t_pool_relu
