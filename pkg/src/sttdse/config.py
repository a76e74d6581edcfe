"""Global JSON configuration with dotted-path overrides.

The file holds the sections ``mtj``, ``variation``, ``accelerator``,
``memory``, ``dram``, ``ber`` and ``sweep`` plus ``schema_version``. Any
section or key may be omitted and falls back to :data:`DEFAULTS`;
unknown keys are rejected with the offending dotted path in the message.
"""

from __future__ import annotations

import copy
import json
import os

from .core_timing import AcceleratorConfig
from .errors import DomainError, ValidationError
from .fault_inject import BerProfile
from .memory_model import DramConfig, resolve_tech_table
from .mtj_device import CurrentKnobs, MtjTechParams, ReliabilityTargets
from .pt_variation import VariationProfile

SCHEMA_VERSION = 1
ENV_VAR = "STTDSE_CONFIG"
MIB = 1 << 20

DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "mtj": {
        "alpha": 0.03,
        "eta": 0.6,
        "m_eff_term": 3.0,
        "h_k": 0.5,
        "m_s": 1.0e6,
        "volume": 9.94e-25,
        "tau_retention": 1.0,
        "tau_write": 1e-9,
        "t_nom": 300.0,
        "ir_over_ic": 0.3,
        "iw_over_ic": 1.5,
        "targets": [
            {"label": "glb", "t_ret": 3.0, "ber_rf": 1e-8, "ber_rd": 1e-8, "ber_we": 1e-8},
            {"label": "glb_lsb", "t_ret": 3.0, "ber_rf": 1e-5, "ber_rd": 1e-5, "ber_we": 1e-5},
            {"label": "weights", "t_ret": 9.46e7, "ber_rf": 1e-9, "ber_rd": 1e-9, "ber_we": 1e-9},
        ],
    },
    "variation": {
        "sigma_frac": 0.021, "n_sigma": 4.0, "t_nom": 300.0, "t_hot": 393.0, "t_cold": 253.0,
        "n_levels": 4,
    },
    "accelerator": {
        "w_a": 14, "h_a": 42, "p_s": 3, "t_clk": 1e-9,
        "n_cyc_conv": 17, "n_cyc_sys": 11, "t_pool_relu": 0.0,
    },
    "memory": {
        "glb_bytes": 12 * MIB,
        "sram_table": "sram",
        "mram_table": "mram_d27p5",
        "mram_tables": ["mram_d27p5", "mram_d17p5"],
        "scratch_table": "sram",
        "scratch_bytes": 52 * 1024,
        "access_width": 32,
        "scratch_leakage_scale": 1.0,
        "core": {"area": 4.08, "dynamic": 954.0, "leakage": 0.91},
    },
    "dram": {"channels": 2, "transfer_rate": 2933.0, "bus_bytes": 8},
    "ber": {"ber_rf": 1e-8, "ber_rd": 1e-8, "ber_we": 1e-8, "word_width": 16},
    "sweep": {
        "models": ["alexnet", "vgg16", "resnet50"],
        "axes": {"batch": [1, 2], "glb_bytes": [12 * MIB], "datatype": ["int8"]},
        "max_points": 10000,
        "workers": 1,
    },
}

# keys whose values are free-form (not checked against DEFAULTS)
_OPEN = {"mtj.targets", "sweep.axes", "sweep.models", "memory.mram_tables", "ber.msb_bank",
         "ber.lsb_bank", "ber.split_bit", "dram.energy_per_byte"}


def _merge(base: dict, update: dict, path=""):
    for key, value in update.items():
        dotted = f"{path}{key}"
        if dotted in _OPEN:
            base[key] = value
            continue
        if key not in base:
            raise ValidationError(f"config: unknown key {dotted!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ValidationError(f"config: {dotted!r} must be an object")
            _merge(base[key], value, dotted + ".")
        else:
            base[key] = value


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _override(doc: dict, assignment: str):
    path, sep, raw = assignment.partition("=")
    if not sep or not path:
        raise ValidationError(f"override {assignment!r} must look like section.key=value")
    parts = path.split(".")
    nested = _parse_value(raw)
    for part in reversed(parts):
        nested = {part: nested}
    _merge(doc, nested)


class Config:
    """Merged configuration; section accessors build validated objects."""

    def __init__(self, doc=None, overrides=()):
        self.doc = copy.deepcopy(DEFAULTS)
        if doc:
            if doc.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
                raise ValidationError(
                    f"config: schema_version must be {SCHEMA_VERSION}, got {doc['schema_version']!r}")
            _merge(self.doc, doc)
        for assignment in overrides:
            _override(self.doc, assignment)

    @classmethod
    def load(cls, path=None, overrides=()):
        """Read ``path``, else ``$STTDSE_CONFIG``, else use defaults."""
        path = path or os.environ.get(ENV_VAR)
        doc = None
        if path:
            with open(path) as fh:
                try:
                    doc = json.load(fh)
                except json.JSONDecodeError as exc:
                    raise ValidationError(f"config {path}: invalid JSON ({exc})") from None
        return cls(doc, overrides)

    def section(self, name):
        return self.doc[name]

    def _build(self, section, factory, keys):
        values = {k: self.doc[section][k] for k in keys if k in self.doc[section]}
        try:
            return factory(**values)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"config section {section!r}: {exc}") from None

    def mtj_params(self) -> MtjTechParams:
        keys = ("alpha", "eta", "m_eff_term", "h_k", "m_s", "volume",
                "tau_retention", "tau_write", "t_nom")
        return self._build("mtj", MtjTechParams, keys)

    def knobs(self) -> CurrentKnobs:
        return self._build("mtj", CurrentKnobs, ("ir_over_ic", "iw_over_ic"))

    def targets(self):
        out = []
        for i, entry in enumerate(self.doc["mtj"]["targets"]):
            entry = dict(entry)
            label = entry.pop("label", f"target{i}")
            try:
                out.append((label, ReliabilityTargets(**entry)))
            except TypeError as exc:
                raise ValidationError(f"config mtj.targets[{i}]: {exc}") from None
        return out

    def variation(self) -> VariationProfile:
        keys = ("sigma_frac", "n_sigma", "t_nom", "t_hot", "t_cold")
        try:
            return self._build("variation", VariationProfile, keys)
        except DomainError as exc:
            raise ValidationError(f"config section 'variation': {exc}") from None

    def accelerator(self) -> AcceleratorConfig:
        keys = ("w_a", "h_a", "p_s", "t_clk", "n_cyc_conv", "n_cyc_sys", "t_pool_relu")
        return self._build("accelerator", AcceleratorConfig, keys)

    def dram(self) -> DramConfig:
        if "energy_per_byte" not in self.doc["dram"]:
            raise ValidationError(
                "config: dram.energy_per_byte is required (pJ/B); set it in the config "
                "file or with --set dram.energy_per_byte=VALUE")
        return self._build("dram", DramConfig,
                           ("energy_per_byte", "channels", "transfer_rate", "bus_bytes"))

    def ber(self):
        sec = dict(self.doc["ber"])
        width = sec.pop("word_width")
        try:
            return BerProfile.from_dict(sec), width
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"config section 'ber': {exc}") from None

    def table(self, key):
        ref = self.doc["memory"][key]
        return resolve_tech_table(ref)

