"""
How long does data sit in the buffer?
=====================================

Layers run back to back, so an ofmap written by one layer must survive
until the next layer finishes reading it. That pair time is the retention
the MRAM must guarantee.
"""

from sttdse.core_timing import AcceleratorConfig, model_retention_profile
from sttdse.workload import bundled_model

cfg = AcceleratorConfig(w_a=14, h_a=42, p_s=3, t_clk=1e-9, n_cyc_conv=17, n_cyc_sys=11)

for name in ("alexnet", "vgg16", "resnet50"):
    model = bundled_model(name, "bf16")
    worst = [model_retention_profile(model, cfg, b).max_seconds for b in (1, 4, 16)]
    print(f"{name:9s} max retention  b1 {worst[0] * 1e3:7.2f} ms  b4 {worst[1] * 1e3:7.2f} ms  b16 {worst[2] * 1e3:7.2f} ms")

# %% The five slowest pairs of VGG16 at batch 16
profile = model_retention_profile(bundled_model("vgg16", "bf16"), cfg, 16)
for pair in sorted(profile.pairs, key=lambda p: -p.seconds)[:5]:
    print(f"  {pair.pair_id:20s} {pair.kind:9s} {pair.seconds:.3f} s")

# A bigger array shortens every layer
wide = AcceleratorConfig(w_a=28, h_a=84)
print(f"\n84x84 MACs: VGG16 b16 worst pair {model_retention_profile(bundled_model('vgg16', 'bf16'), wide, 16).max_seconds:.3f} s")
