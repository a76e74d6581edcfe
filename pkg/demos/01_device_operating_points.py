"""
MTJ operating points for a scaled-retention global buffer
=========================================================

How long must a buffer word survive, and at what error rate? Those two
numbers fix the thermal stability factor, which in turn sets the switching
current and the read and write pulse widths.
"""

import numpy as np

from sttdse.mtj_device import (CurrentKnobs, MtjTechParams, ReliabilityTargets,
                               delta_for_retention, retention_time_for_ber,
                               solve_operating_point, write_error_rate)

params = MtjTechParams(alpha=0.03, eta=0.6, m_eff_term=3.0, h_k=0.5, m_s=1e6, volume=9.94e-25)

# Weights stay resident for years; feature maps only for seconds.
for label, t_ret, ber in [("weights, ~3 years", 9.46e7, 1e-9),
                          ("fmaps, 3 s", 3.0, 1e-8),
                          ("fmap LSBs, 3 s", 3.0, 1e-5)]:
    print(f"{label:18s} delta = {delta_for_retention(t_ret, ber, params.tau_retention):6.2f}")

# Going the other way: a delta of 39 keeps a 1e-9 failure rate for
print(f"\ndelta 39 retains for {retention_time_for_ber(1e-9, 1.0, 39) / 3.156e7:.2f} years")

# %% Full operating point for the GLB target
op = solve_operating_point(params, ReliabilityTargets(3.0, 1e-8, 1e-8, 1e-8), CurrentKnobs(0.3, 1.5))
print(f"\ndelta {op.delta:.2f}  Ic {op.i_c * 1e6:.2f} uA  Iw {op.i_w * 1e6:.2f} uA")
print(f"read pulse up to {op.t_r * 1e3:.2f} ms, write pulse {op.t_w * 1e9:.2f} ns")

# %% Overdrive trades current for latency
for r in (1.25, 1.5, 2.0, 3.0):
    op_r = solve_operating_point(params, ReliabilityTargets(3.0, 1e-8, 1e-8, 1e-8), CurrentKnobs(0.3, r))
    print(f"Iw/Ic = {r:4.2f}: t_w = {op_r.t_w * 1e9:6.2f} ns")

# WER falls off a cliff once the pulse passes a few tens of ns
pulses = np.linspace(0, 60e-9, 7)
wer = [write_error_rate(t, params.tau_write, op.delta, 1.5) for t in pulses]
for t, w in zip(pulses, wer):
    print(f"  {t * 1e9:5.1f} ns -> WER {w:.3e}")
