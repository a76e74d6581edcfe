"""
Absorbing partial sums in a small SRAM scratchpad
=================================================

MRAM writes cost about 70 % more than reads, and conv layers that need
several array passes write a partial ofmap plane after every pass. A 52 KB
SRAM scratchpad catches those writes.
"""

from sttdse.core_timing import AcceleratorConfig, model_exec_time
from sttdse.memory_model import bundled_tech_table, interpolate_tech
from sttdse.scratchpad_energy import ARCHITECTURES, buffer_energy, count_traffic
from sttdse.workload import bundled_model

cfg = AcceleratorConfig()
glb = 12 * 2 ** 20
sram = interpolate_tech(bundled_tech_table("sram"), glb)
mram = interpolate_tech(bundled_tech_table("mram_d27p5"), glb)
scratch = interpolate_tech(bundled_tech_table("sram"), 52 * 1024)
print(f"MRAM read {mram.read_energy:.2f} pJ, write {mram.write_energy:.2f} pJ; scratch read {scratch.read_energy:.2f} pJ")

for name in ("alexnet", "vgg16", "resnet50"):
    model = bundled_model(name, "bf16")
    traffic = count_traffic(model, cfg, batch=4)
    t = model_exec_time(model, cfg, 4)
    print(f"\n{name}: {traffic.writes['psum']:,} psum writes of {traffic.total_writes:,} total")
    for arch in ARCHITECTURES:
        e = buffer_energy(traffic, arch, sram if arch == "sram_only" else mram, scratch, t)
        print(f"  {arch:13s} {e.total * 1e3:8.4f} mJ  (leakage {e.leakage * 1e6:.3f} uJ)")
