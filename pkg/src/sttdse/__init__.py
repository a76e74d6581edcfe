"""Design-space exploration for STT-MRAM buffers in CNN accelerators."""

from .config import Config
from .core_timing import AcceleratorConfig, layer_time, model_retention_profile
from .errors import DomainError, ShapeError, TechRangeError, ValidationError
from .fault_inject import BerProfile, BerTriple, expected_flips, inject
from .memory_model import (Component, DramConfig, accelerator_summary, dram_bandwidth,
                           extra_dram_cost, extra_dram_traffic, interpolate_tech,
                           resolve_tech_table)
from .mtj_device import (CurrentKnobs, MtjTechParams, ReliabilityTargets, delta_for_retention,
                         solve_operating_point)
from .pt_variation import VariationProfile, delta_pt_max, guardbanded_delta
from .scratchpad_energy import buffer_energy, count_traffic
from .workload import LayerSpec, ModelSpec, layer_footprint, load_model, resolve_model

__version__ = "0.1.0"
