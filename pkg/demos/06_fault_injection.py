"""
Bit flips in an 8-bit weight tensor with a dual-bank buffer
===========================================================

Relaxing retention in the LSB half of every word saves energy; the MSB
half stays in a strong bank. Injection shows what that does to the data.
"""

import numpy as np

from sttdse.fault_inject import BerProfile, expected_flips, inject, split_masks

rng = np.random.default_rng(0)
weights = rng.normal(0, 0.05, 1_000_000)
scale = np.abs(weights).max() / 127
q = np.clip(np.round(weights / scale), -127, 127).astype(np.int8)
words = q.view(np.uint8)

profile = BerProfile.dual_bank(msb=1e-8, lsb=1e-5)
print(f"expected flips: {expected_flips(words.size * 8, profile):.1f}")

result = inject(words, 8, profile, seed=42)
print(f"observed: {result.msb_flips} MSB, {result.lsb_flips} LSB")

# damage measured in the dequantized domain
noisy = result.words.view(np.int8).astype(np.float64) * scale
err = noisy - q.astype(np.float64) * scale
print(f"max weight error {np.abs(err).max():.2e}, rms {np.sqrt((err ** 2).mean()):.2e}")

msb, lsb = split_masks(8)
print(f"masks: msb {msb:#04x}, lsb {lsb:#04x}")

# the same seed always gives the same flips
again = inject(words, 8, profile, seed=42)
print("reproducible:", np.array_equal(again.words, result.words))
