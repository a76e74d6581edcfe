"""
Guard-banding delta for process and temperature
===============================================

A chip must still meet retention at the hot corner with a 4-sigma weak
cell, so the design-time delta is larger than the scaled target. The
strong cold cell then needs more write current, which an adjustable
driver supplies.
"""

from sttdse.mtj_device import MtjTechParams
from sttdse.pt_variation import (VariationProfile, delta_pt_max, guardbanded_delta,
                                 scaled_delta_check, write_driver_levels)

profile = VariationProfile()  # sigma 2.1 %, 4 sigma, 300 K nominal, 393 K hot, 253 K cold
params = MtjTechParams(alpha=0.03, eta=0.6, m_eff_term=3.0, h_k=0.5, m_s=1e6, volume=9.94e-25)

print("scaled  guard-banded  check  pt_max")
for scaled in (39.0, 19.5, 12.5):
    gb = guardbanded_delta(scaled, profile)
    print(f"{scaled:6.1f}  {gb:12.2f}  {scaled_delta_check(gb, profile):5.2f}  {delta_pt_max(gb, profile):6.2f}")

# %% Write driver legs for the 27.9 design
gb = guardbanded_delta(19.5, profile)
levels = write_driver_levels(params, gb, profile, n_levels=4)
for i, amps in enumerate(levels):
    print(f"level {i}: {amps * 1e6:6.2f} uA")
print(f"top/bottom = {levels[-1] / levels[0]:.3f}")

# Tighter process control shrinks the band
for sigma in (0.0, 0.01, 0.021, 0.04):
    print(f"sigma {sigma:5.3f}: delta_gb {guardbanded_delta(19.5, VariationProfile(sigma_frac=sigma)):.2f}")
