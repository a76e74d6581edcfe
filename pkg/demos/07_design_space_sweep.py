"""
Sweeping buffer size, batch and delta
=====================================

The sweep runs every model at every combination of the configured axes and
emits one CSV row per design point, the same as ``sttdse dse``.
"""

import sys

from sttdse import report
from sttdse.config import Config

cfg = Config(overrides=[
    "dram.energy_per_byte=20",
    'sweep.models=["resnet50", "vgg16"]',
    'sweep.axes={"batch": [1, 4], "glb_bytes": [8388608, 12582912], "delta": [27.5, 17.5]}',
])
rows = report.run_dse(cfg)
cols = ("model", "batch", "glb_bytes", "delta", "extra_dram_bytes", "retention_max_s",
        "e_mram_scratch_j", "area_saving_pct", "power_saving_pct")
print(report.format_table(rows, cols))

# %% Area and power roll-up from the shipped 14 nm component values
summary, checks = report.run_summary(report.bundled_components_text())
print()
print(report.format_table(summary, report.SUMMARY_COLUMNS))
print()
report.write_csv(checks, report.CHECK_COLUMNS, sys.stdout)
