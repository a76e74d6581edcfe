"""
How big must the global buffer be?
==================================

A conv layer runs without DRAM spills when its ifmap, weights and ofmap
all fit on chip. FC layers stream weights, so only their fmaps count.
"""

from sttdse.memory_model import DramConfig, extra_dram_cost, extra_dram_traffic
from sttdse.workload import BUNDLED_MODELS, bundled_model, max_partial_ofmap, model_size, required_glb

MB = 1e6
print("model     int8 size   bf16 size")
for name in BUNDLED_MODELS:
    print(f"{name:9s} {model_size(bundled_model(name)) / MB:8.1f} MB {model_size(bundled_model(name, 'bf16')) / MB:8.1f} MB")

# %% Required GLB against batch size
print("\nrequired GLB (MB), int8")
print("batch  " + "  ".join(f"{n:>9s}" for n in BUNDLED_MODELS))
for batch in (1, 2, 4, 8, 16):
    cells = [required_glb(bundled_model(n), batch) / MB for n in BUNDLED_MODELS]
    print(f"{batch:5d}  " + "  ".join(f"{c:9.2f}" for c in cells))

# %% Spill cost with a 12 MiB buffer
dram = DramConfig(energy_per_byte=20.0)  # pJ/B; pick a value for your DRAM
for name in BUNDLED_MODELS:
    for batch in (1, 2, 4):
        spill = extra_dram_traffic(bundled_model(name), batch, 12 * 2 ** 20).total
        cost = extra_dram_cost(spill, dram)
        print(f"{name:9s} batch {batch}: {spill / MB:7.2f} MB extra, {cost.seconds * 1e6:8.1f} us, {cost.joules * 1e3:6.3f} mJ")

# Partial ofmap planes bound the scratchpad size
for name in BUNDLED_MODELS:
    print(f"{name:9s} largest bf16 partial plane: {max_partial_ofmap(bundled_model(name, 'bf16')) / 1024:.1f} KiB")
