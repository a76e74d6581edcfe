"""DNN layer descriptions, shape arithmetic and buffer footprints.

Model description files are JSON::

    {"schema_version": 1, "name": "vgg16", "datatype": "int8",
     "layers": [{"kind": "conv", "name": "conv1_1", "in_ch": 3, "out_ch": 64,
                 "k_h": 3, "k_w": 3, "stride": 1, "pad": 1,
                 "ifmap_h": 224, "ifmap_w": 224}, ...]}

Layer keys by kind (anything else is rejected):

* conv: in_ch, out_ch, k_h, k_w, ifmap_h, ifmap_w, stride=1, pad=0,
  bias=true, floor_mode=false
* pool: in_ch, k_h, k_w, ifmap_h, ifmap_w, stride=1, pad=0, floor_mode=false
* fc: n_fc, m_fc, bias=true
* relu: optional in_ch/ifmap_h/ifmap_w or n_fc

Every layer also accepts ``name`` and ``input`` (name of the layer whose
output it consumes; defaults to the previous layer, used for residual
shortcuts). An output dimension that does not divide exactly is an error
unless the layer sets ``floor_mode``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Optional

from .errors import ShapeError, ValidationError

SCHEMA_VERSION = 1
DATATYPE_BYTES = {"int8": 1, "bf16": 2}
KINDS = ("conv", "fc", "pool", "relu")
BUNDLED_MODELS = ("alexnet", "vgg16", "resnet50")

_ALLOWED = {
    "conv": {"in_ch", "out_ch", "k_h", "k_w", "ifmap_h", "ifmap_w", "stride", "pad",
             "bias", "floor_mode"},
    "pool": {"in_ch", "k_h", "k_w", "ifmap_h", "ifmap_w", "stride", "pad", "floor_mode"},
    "fc": {"n_fc", "m_fc", "bias"},
    "relu": {"in_ch", "ifmap_h", "ifmap_w", "n_fc"},
}
_REQUIRED = {
    "conv": {"in_ch", "out_ch", "k_h", "k_w", "ifmap_h", "ifmap_w"},
    "pool": {"in_ch", "k_h", "k_w", "ifmap_h", "ifmap_w"},
    "fc": {"n_fc", "m_fc"},
    "relu": set(),
}


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    name: str = ""
    in_ch: int = 0
    out_ch: int = 0
    k_h: int = 0
    k_w: int = 0
    stride: int = 1
    pad: int = 0
    ifmap_h: int = 0
    ifmap_w: int = 0
    n_fc: int = 0
    m_fc: int = 0
    bias: bool = True
    floor_mode: bool = False
    input: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"layer {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == "pool" and self.out_ch == 0:
            object.__setattr__(self, "out_ch", self.in_ch)
        label = self.name or self.kind
        if self.kind in ("conv", "pool"):
            for key in ("in_ch", "out_ch", "k_h", "k_w", "stride", "ifmap_h", "ifmap_w"):
                if getattr(self, key) <= 0:
                    raise ValidationError(f"layer {label!r}: {key} must be positive")
            if self.pad < 0:
                raise ValidationError(f"layer {label!r}: pad must be >= 0")
            if self.kind == "pool" and self.out_ch != self.in_ch:
                raise ValidationError(f"layer {label!r}: pool must keep channel count")
        elif self.kind == "fc":
            if self.n_fc <= 0 or self.m_fc <= 0:
                raise ValidationError(f"layer {label!r}: n_fc and m_fc must be positive")

    @property
    def is_compute(self) -> bool:
        return self.kind in ("conv", "fc")


@dataclass(frozen=True)
class Footprint:
    ifmap_bytes: int
    weight_bytes: int
    ofmap_bytes: int
    bias_bytes: int = 0

    @property
    def fmap_bytes(self) -> int:
        return self.ifmap_bytes + self.ofmap_bytes

    @property
    def total(self) -> int:
        return self.ifmap_bytes + self.weight_bytes + self.bias_bytes + self.ofmap_bytes


def _out_dim(size, kernel, pad, stride, floor_mode, label):
    span = size - kernel + 2 * pad
    if span < 0:
        raise ShapeError(f"layer {label!r}: kernel {kernel} larger than padded input {size + 2 * pad}")
    if span % stride and not floor_mode:
        raise ShapeError(
            f"layer {label!r}: ({size} - {kernel} + 2*{pad}) / {stride} is not an integer")
    return span // stride + 1


def ofmap_dims(layer: LayerSpec):
    """Output (rows, cols) of a conv or pool layer."""
    if layer.kind not in ("conv", "pool"):
        raise ValidationError(f"layer {layer.name!r}: ofmap_dims needs a conv or pool layer")
    label = layer.name or layer.kind
    rows = _out_dim(layer.ifmap_h, layer.k_h, layer.pad, layer.stride, layer.floor_mode, label)
    cols = _out_dim(layer.ifmap_w, layer.k_w, layer.pad, layer.stride, layer.floor_mode, label)
    return rows, cols


def input_shape(layer: LayerSpec):
    """(channels, rows, cols) consumed by ``layer``, or None for a dimensionless relu."""
    if layer.kind in ("conv", "pool"):
        return (layer.in_ch, layer.ifmap_h, layer.ifmap_w)
    if layer.kind == "fc":
        return (layer.n_fc, 1, 1)
    if layer.n_fc:
        return (layer.n_fc, 1, 1)
    if layer.in_ch:
        return (layer.in_ch, layer.ifmap_h, layer.ifmap_w)
    return None


def output_shape(layer: LayerSpec):
    if layer.kind in ("conv", "pool"):
        return (layer.out_ch,) + ofmap_dims(layer)
    if layer.kind == "fc":
        return (layer.m_fc, 1, 1)
    return input_shape(layer)


def layer_footprint(layer: LayerSpec, batch=1, datatype_bytes=1) -> Footprint:
    """Bytes of ifmap, weights and ofmap a layer keeps resident.

    Pool and relu layers carry no weights; their fmaps pass through.
    """
    if batch <= 0:
        raise ValidationError(f"batch must be positive, got {batch!r}")
    b = datatype_bytes
    if layer.kind == "conv":
        rows, cols = ofmap_dims(layer)
        return Footprint(
            ifmap_bytes=batch * layer.in_ch * layer.ifmap_h * layer.ifmap_w * b,
            weight_bytes=layer.out_ch * layer.in_ch * layer.k_h * layer.k_w * b,
            ofmap_bytes=batch * layer.out_ch * rows * cols * b,
            bias_bytes=layer.out_ch * b if layer.bias else 0,
        )
    if layer.kind == "fc":
        return Footprint(
            ifmap_bytes=batch * layer.n_fc * b,
            weight_bytes=layer.n_fc * layer.m_fc * b,
            ofmap_bytes=batch * layer.m_fc * b,
            bias_bytes=layer.m_fc * b if layer.bias else 0,
        )
    shape_in = input_shape(layer)
    if shape_in is None:
        return Footprint(0, 0, 0)
    shape_out = output_shape(layer)
    size_in = shape_in[0] * shape_in[1] * shape_in[2]
    size_out = shape_out[0] * shape_out[1] * shape_out[2]
    return Footprint(batch * size_in * b, 0, batch * size_out * b)


@dataclass(frozen=True)
class ModelSpec:
    name: str
    layers: tuple
    datatype: str = "int8"

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.datatype not in DATATYPE_BYTES:
            raise ValidationError(f"model {self.name!r}: unknown datatype {self.datatype!r}")
        if not self.layers:
            raise ValidationError(f"model {self.name!r} has no layers")
        _check_chain(self)

    @property
    def datatype_bytes(self) -> int:
        return DATATYPE_BYTES[self.datatype]

    def with_datatype(self, datatype: str) -> "ModelSpec":
        return ModelSpec(self.name, self.layers, datatype)

    def compute_layers(self):
        return [layer for layer in self.layers if layer.is_compute]


def _check_chain(model: ModelSpec):
    by_name = {}
    previous = None
    for index, layer in enumerate(model.layers):
        label = layer.name or f"#{index}"
        if layer.kind in ("conv", "pool"):
            ofmap_dims(layer)
        if layer.input is not None:
            if layer.input not in by_name:
                raise ValidationError(
                    f"model {model.name!r}: layer {label!r} reads unknown layer {layer.input!r}")
            producer = by_name[layer.input]
        else:
            producer = previous
        consumed = input_shape(layer)
        if producer is not None and consumed is not None:
            produced = output_shape(producer)
            if produced is not None and not _shapes_match(produced, consumed, layer.kind):
                raise ShapeError(
                    f"model {model.name!r}: layer {label!r} expects {consumed} "
                    f"but {producer.name or 'previous layer'!r} produces {produced}")
        if layer.name:
            if layer.name in by_name:
                raise ValidationError(f"model {model.name!r}: duplicate layer name {layer.name!r}")
            by_name[layer.name] = layer
        if output_shape(layer) is not None:
            previous = layer


def _shapes_match(produced, consumed, kind):
    if kind in ("fc", "relu") and consumed[1:] == (1, 1):
        return produced[0] * produced[1] * produced[2] == consumed[0]
    return tuple(produced) == tuple(consumed)


def model_size(model: ModelSpec) -> int:
    """Total parameter bytes (weights and biases) of the model."""
    b = model.datatype_bytes
    total = 0
    for layer in model.layers:
        fp = layer_footprint(layer, 1, b)
        total += fp.weight_bytes + fp.bias_bytes
    return total


def required_glb(model: ModelSpec, batch=1) -> int:
    """Global buffer bytes needed so no conv layer spills to DRAM.

    FC weights stream from DRAM, so FC layers count their fmaps only.
    """
    b = model.datatype_bytes
    need = 0
    for layer in model.layers:
        if layer.kind == "conv":
            need = max(need, layer_footprint(layer, batch, b).total)
        elif layer.kind == "fc":
            need = max(need, layer_footprint(layer, batch, b).fmap_bytes)
    return need


def max_partial_ofmap(model: ModelSpec, batch=1) -> int:
    """Largest single output-channel plane (over the batch) any conv layer accumulates."""
    b = model.datatype_bytes
    best = 0
    for layer in model.layers:
        if layer.kind == "conv":
            rows, cols = ofmap_dims(layer)
            best = max(best, batch * rows * cols * b)
    return best


# -- serialization ----------------------------------------------------------

def layer_from_dict(doc: dict, index: int = 0) -> LayerSpec:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValidationError(f"layer #{index}: expected an object with a 'kind' key")
    kind = doc["kind"]
    if kind not in KINDS:
        raise ValidationError(f"layer #{index}: unknown kind {kind!r}")
    keys = set(doc) - {"kind", "name", "input"}
    unknown = keys - _ALLOWED[kind]
    if unknown:
        raise ValidationError(f"layer #{index} ({kind}): unknown field(s) {sorted(unknown)}")
    missing = _REQUIRED[kind] - keys
    if missing:
        raise ValidationError(f"layer #{index} ({kind}): missing field(s) {sorted(missing)}")
    for key, value in doc.items():
        if key in ("bias", "floor_mode"):
            if not isinstance(value, bool):
                raise ValidationError(f"layer #{index}: {key} must be true or false")
        elif key not in ("kind", "name", "input"):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValidationError(f"layer #{index}: {key} must be an integer, got {value!r}")
    return LayerSpec(**doc)


def layer_to_dict(layer: LayerSpec) -> dict:
    defaults = {f.name: f.default for f in fields(LayerSpec)}
    out = {"kind": layer.kind}
    if layer.name:
        out["name"] = layer.name
    if layer.input is not None:
        out["input"] = layer.input
    for key in sorted(_ALLOWED[layer.kind]):
        value = getattr(layer, key)
        if key in _REQUIRED[layer.kind] or value != defaults[key]:
            out[key] = value
    return out


def model_from_dict(doc: dict) -> ModelSpec:
    if not isinstance(doc, dict):
        raise ValidationError("model document must be a JSON object")
    unknown = set(doc) - {"schema_version", "name", "datatype", "layers"}
    if unknown:
        raise ValidationError(f"model: unknown field(s) {sorted(unknown)}")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValidationError(
            f"model: schema_version must be {SCHEMA_VERSION}, got {doc.get('schema_version')!r}")
    for key in ("name", "layers"):
        if key not in doc:
            raise ValidationError(f"model: missing field {key!r}")
    layers = [layer_from_dict(d, i) for i, d in enumerate(doc["layers"])]
    return ModelSpec(doc["name"], layers, doc.get("datatype", "int8"))


def model_to_dict(model: ModelSpec) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": model.name,
        "datatype": model.datatype,
        "layers": [layer_to_dict(layer) for layer in model.layers],
    }


def load_model(path) -> ModelSpec:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"model {path}: invalid JSON ({exc})") from None
    return model_from_dict(doc)


def bundled_model(name: str, datatype: Optional[str] = None) -> ModelSpec:
    """Load one of the shipped descriptors (alexnet, vgg16, resnet50)."""
    if name not in BUNDLED_MODELS:
        raise ValidationError(f"no bundled model {name!r}; choose from {BUNDLED_MODELS}")
    text = resources.files("sttdse.data.models").joinpath(f"{name}.json").read_text()
    model = model_from_dict(json.loads(text))
    return model.with_datatype(datatype) if datatype else model


def resolve_model(ref) -> ModelSpec:
    """Accept a ModelSpec, a bundled model name, or a path to a JSON file."""
    if isinstance(ref, ModelSpec):
        return ref
    if isinstance(ref, str) and ref in BUNDLED_MODELS and not Path(ref).exists():
        return bundled_model(ref)
    return load_model(ref)
