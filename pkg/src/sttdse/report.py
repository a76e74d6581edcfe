"""Report builders behind the command-line tool.

Every ``run_*`` function returns a list of row dicts in a deterministic
order; :func:`write_csv` and :func:`format_table` render them.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from importlib import resources

from . import core_timing as ct
from .config import Config
from .errors import DomainError, ValidationError
from .memory_model import (Component, accelerator_summary, extra_dram_cost, extra_dram_traffic,
                           interpolate_tech, resolve_tech_table)
from .mtj_device import solve_operating_point
from .pt_variation import (delta_pt_max, guardbanded_delta, scaled_delta_check,
                           write_driver_levels)
from .scratchpad_energy import ARCHITECTURES, buffer_energy, count_traffic
from .workload import (layer_footprint, max_partial_ofmap, model_size, required_glb,
                       resolve_model)

SWEEP_AXES = ("datatype", "batch", "glb_bytes", "mac_array", "delta")


# -- rendering --------------------------------------------------------------

def _fmt(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    return "" if value is None else str(value)


def write_csv(rows, columns, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])


def csv_text(rows, columns) -> str:
    buf = io.StringIO()
    write_csv(rows, columns, buf)
    return buf.getvalue()


def format_table(rows, columns) -> str:
    raw = [[row.get(c) for c in columns] for row in rows]
    cells = [[_fmt(v) for v in r] for r in raw]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for values, texts in zip(raw, cells):
        parts = [t.rjust(w) if isinstance(v, (int, float)) else t.ljust(w)
                 for v, t, w in zip(values, texts, widths)]
        lines.append("  ".join(parts).rstrip())
    return "\n".join(lines)


# -- device / guardband -----------------------------------------------------

DEVICE_COLUMNS = ("label", "delta", "t_ret", "t_r", "t_w", "i_c", "i_w", "i_r",
                  "ber_rf", "ber_rd", "ber_we")


def run_device(config: Config):
    params, knobs = config.mtj_params(), config.knobs()
    rows = []
    for label, targets in config.targets():
        op = solve_operating_point(params, targets, knobs)
        rows.append({"label": label, **vars(op)})
    return rows


GUARDBAND_COLUMNS = ("label", "delta_scaled", "delta_gb", "delta_check", "delta_pt_max",
                     "i_w_nominal", "i_w_worst")


def run_guardband(config: Config, deltas=None):
    """Guard-band the solved delta of every target (or the given ``deltas``)."""
    profile = config.variation()
    params = config.mtj_params()
    n_levels = config.section("variation")["n_levels"]
    r = config.knobs().iw_over_ic
    if deltas is None:
        items = [(row["label"], row["delta"]) for row in run_device(config)]
    else:
        items = [(f"delta={d:g}", d) for d in deltas]
    rows = []
    for label, delta in items:
        gb = guardbanded_delta(delta, profile)
        levels = write_driver_levels(params, gb, profile, n_levels, r)
        rows.append({
            "label": label, "delta_scaled": delta, "delta_gb": gb,
            "delta_check": scaled_delta_check(gb, profile),
            "delta_pt_max": delta_pt_max(gb, profile),
            "i_w_nominal": levels[0], "i_w_worst": levels[-1],
            "levels": levels,
        })
    return rows


# -- workload / retention ---------------------------------------------------

WORKLOAD_COLUMNS = ("model", "datatype", "batch", "model_bytes", "required_glb_bytes",
                    "max_partial_ofmap_bytes")
LAYER_COLUMNS = ("model", "layer", "kind", "ifmap_bytes", "weight_bytes", "ofmap_bytes")


def _models(refs, datatype=None):
    if not refs:
        raise ValidationError("no models given")
    models = [resolve_model(r) for r in refs]
    return [m.with_datatype(datatype) if datatype else m for m in models]


def run_workload(model_refs, batches=(1,), datatype=None):
    rows = []
    for model in _models(model_refs, datatype):
        for batch in batches:
            rows.append({
                "model": model.name, "datatype": model.datatype, "batch": batch,
                "model_bytes": model_size(model),
                "required_glb_bytes": required_glb(model, batch),
                "max_partial_ofmap_bytes": max_partial_ofmap(model, batch),
            })
    return rows


def run_layers(model_refs, batch=1, datatype=None):
    rows = []
    for model in _models(model_refs, datatype):
        for i, layer in enumerate(model.layers):
            fp = layer_footprint(layer, batch, model.datatype_bytes)
            rows.append({"model": model.name, "layer": layer.name or f"#{i}", "kind": layer.kind,
                         "ifmap_bytes": fp.ifmap_bytes,
                         "weight_bytes": fp.weight_bytes + fp.bias_bytes,
                         "ofmap_bytes": fp.ofmap_bytes})
    return rows


RETENTION_COLUMNS = ("model", "batch", "pair", "kind", "seconds", "status")


def run_retention(model_refs, config: Config, batches, datatype=None, limit=1.5):
    """One row per consecutive compute-layer pair, then a MAX row per (model, batch)."""
    if not batches:
        raise ValidationError("no batch sizes given")
    cfg = config.accelerator()
    rows = []
    for model in _models(model_refs, datatype):
        for batch in batches:
            profile = ct.model_retention_profile(model, cfg, batch)
            for pair in profile.pairs:
                rows.append({"model": model.name, "batch": batch, "pair": pair.pair_id,
                             "kind": pair.kind, "seconds": pair.seconds})
            worst = profile.max_seconds
            rows.append({"model": model.name, "batch": batch, "pair": "MAX", "kind": "summary",
                         "seconds": worst, "status": "PASS" if worst <= limit else "FAIL"})
    return rows


# -- energy -----------------------------------------------------------------

ENERGY_COLUMNS = ("model", "arch", "dynamic_j", "leakage_j", "total_j")


def _mac_array(value, p_s):
    if isinstance(value, int):
        rows, cols = value, value
    else:
        try:
            rows, cols = (int(v) for v in str(value).lower().split("x"))
        except ValueError:
            raise ValidationError(f"mac_array must look like '42x42', got {value!r}") from None
    if cols % p_s:
        raise ValidationError(f"mac_array width {cols} is not a multiple of p_s={p_s}")
    return rows, cols // p_s


def _energies(model, cfg, batch, glb_bytes, config: Config, mram_table):
    mem = config.section("memory")
    sram = interpolate_tech(config.table("sram_table"), glb_bytes)
    mram = interpolate_tech(mram_table, glb_bytes)
    scratch = interpolate_tech(config.table("scratch_table"), mem["scratch_bytes"])
    traffic = count_traffic(model, cfg, batch, mem["access_width"])
    exec_time = ct.model_exec_time(model, cfg, batch)
    scale = mem["scratch_leakage_scale"]
    out = {
        "sram_only": buffer_energy(traffic, "sram_only", sram, exec_time=exec_time),
        "mram_only": buffer_energy(traffic, "mram_only", mram, exec_time=exec_time),
        "mram_scratch": buffer_energy(traffic, "mram_scratch", mram, scratch, exec_time, scale),
    }
    return out, exec_time, (sram, mram, scratch)


def run_energy(model_refs, config: Config, batch=1, datatype=None):
    cfg = config.accelerator()
    glb_bytes = config.section("memory")["glb_bytes"]
    mram_table = config.table("mram_table")
    rows = []
    for model in _models(model_refs, datatype):
        energies, _, _ = _energies(model, cfg, batch, glb_bytes, config, mram_table)
        for arch in ARCHITECTURES:
            e = energies[arch]
            rows.append({"model": model.name, "arch": arch, "dynamic_j": e.dynamic,
                         "leakage_j": e.leakage, "total_j": e.total})
    return rows


# -- design-space sweep -----------------------------------------------------

DSE_COLUMNS = ("model", "datatype", "batch", "glb_bytes", "mac_array", "delta",
               "required_glb_bytes", "extra_dram_bytes", "extra_dram_s", "extra_dram_j",
               "retention_max_s", "e_sram_j", "e_mram_j", "e_mram_scratch_j",
               "area_saving_pct", "power_saving_pct")


class SweepTooLarge(ValidationError):
    pass


def sweep_points(config: Config):
    """Design points in lexicographic axis order (models first)."""
    sweep = config.section("sweep")
    axes = dict(sweep["axes"])
    unknown = set(axes) - set(SWEEP_AXES)
    if unknown:
        raise ValidationError(f"sweep.axes: unknown axis {sorted(unknown)}; allowed {SWEEP_AXES}")
    if not axes:
        raise ValidationError("sweep.axes must not be empty")
    for name, values in axes.items():
        if not isinstance(values, list) or not values:
            raise ValidationError(f"sweep.axes.{name} must be a non-empty list")
    models = sweep["models"]
    if not models:
        raise ValidationError("sweep.models must not be empty")
    names = [a for a in SWEEP_AXES if a in axes]
    count = len(models) * math.prod(len(axes[a]) for a in names)
    if count > sweep["max_points"]:
        raise SweepTooLarge(f"sweep has {count} design points, above max_points={sweep['max_points']}")
    for model_ref, combo in itertools.product(models, itertools.product(*(axes[a] for a in names))):
        yield model_ref, dict(zip(names, combo))


def _mram_for_delta(config: Config, delta):
    if delta is None:
        return config.table("mram_table")
    for ref in config.section("memory")["mram_tables"]:
        table = resolve_tech_table(ref)
        if table.delta_tag is not None and math.isclose(table.delta_tag, float(delta)):
            return table
    raise ValidationError(f"no MRAM table in memory.mram_tables has delta_tag={delta}")


def _dse_point(config: Config, model_ref, point):
    mem = config.section("memory")
    base_cfg = config.accelerator()
    model = resolve_model(model_ref)
    if "datatype" in point:
        model = model.with_datatype(point["datatype"])
    batch = point.get("batch", 1)
    glb = point.get("glb_bytes", mem["glb_bytes"])
    cfg = base_cfg
    mac = point.get("mac_array")
    if mac is not None:
        h_a, w_a = _mac_array(mac, base_cfg.p_s)
        cfg = replace(base_cfg, h_a=h_a, w_a=w_a)
    mram_table = _mram_for_delta(config, point.get("delta"))
    dram = config.dram()

    traffic = extra_dram_traffic(model, batch, glb)
    cost = extra_dram_cost(traffic.total, dram)
    energies, exec_time, (sram, mram, scratch) = _energies(model, cfg, batch, glb, config, mram_table)

    core = mem["core"]
    core_c = Component("core", core["area"], core["dynamic"], core["leakage"])
    to_mw = 1e3 / exec_time
    e_s, e_m = energies["sram_only"], energies["mram_scratch"]
    baseline = [core_c, Component("sram_glb", sram.area, e_s.dynamic * to_mw, sram.leakage)]
    scratch_leak = scratch.leakage * mem["scratch_leakage_scale"]
    variant = [core_c,
               Component("mram_glb+scratch", mram.area + scratch.area, e_m.dynamic * to_mw,
                         mram.leakage + scratch_leak)]
    _, summary = accelerator_summary({"sram": baseline, "mram": variant}, "sram")

    return {
        "model": model.name, "datatype": model.datatype, "batch": batch, "glb_bytes": glb,
        "mac_array": f"{cfg.h_a}x{cfg.w_sa}", "delta": mram_table.delta_tag,
        "required_glb_bytes": required_glb(model, batch),
        "extra_dram_bytes": traffic.total, "extra_dram_s": cost.seconds,
        "extra_dram_j": cost.joules,
        "retention_max_s": ct.model_retention_profile(model, cfg, batch).max_seconds,
        "e_sram_j": e_s.total, "e_mram_j": energies["mram_only"].total,
        "e_mram_scratch_j": e_m.total,
        "area_saving_pct": summary.area_saving_pct, "power_saving_pct": summary.power_saving_pct,
    }


def run_dse(config: Config, workers=None):
    points = list(sweep_points(config))
    config.dram()  # fail early on missing DRAM energy
    workers = workers or config.section("sweep")["workers"]
    job = lambda item: _dse_point(config, *item)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, points))
    return [job(p) for p in points]


# -- accelerator roll-up from a component file ---------------------------

SUMMARY_COLUMNS = ("design", "area_mm2", "dynamic_mw", "leakage_mw", "power_mw",
                   "area_saving_pct", "power_saving_pct")
CHECK_COLUMNS = ("design", "metric", "expected", "tolerance", "actual", "status")
COMPONENT_COLUMNS = ("design", "name", "area_mm2", "dynamic_mw", "leakage_mw")
_METRICS = ("area_saving_pct", "power_saving_pct", "area_mm2", "power_mw")


def parse_components(text: str, source="<components>"):
    """Parse a component file into (designs, baseline, expectations).

    Directives: ``# schema_version=1``, ``# baseline=NAME`` and
    ``# expect DESIGN METRIC VALUE TOLERANCE``.
    """
    meta, expects, body = {}, [], []
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("#"):
            directive = stripped.lstrip("#").strip()
            if directive.startswith("expect "):
                parts = directive.split()
                if len(parts) != 5 or parts[2] not in _METRICS:
                    raise ValidationError(f"{source}: bad expect directive {directive!r}")
                try:
                    expects.append((parts[1], parts[2], float(parts[3]), float(parts[4])))
                except ValueError:
                    raise ValidationError(f"{source}: bad number in {directive!r}") from None
            else:
                key, _, value = directive.partition("=")
                meta[key.strip()] = value.strip()
        elif stripped:
            body.append(line)
    if meta.get("schema_version") != "1":
        raise ValidationError(f"{source}: expected '# schema_version=1'")
    reader = csv.DictReader(io.StringIO("\n".join(body)))
    if tuple(reader.fieldnames or ()) != COMPONENT_COLUMNS:
        raise ValidationError(f"{source}: columns must be {','.join(COMPONENT_COLUMNS)}")
    designs = {}
    for row in reader:
        try:
            values = [float(row[c]) for c in COMPONENT_COLUMNS[2:]]
        except (TypeError, ValueError):
            raise ValidationError(f"{source}: non-numeric value in row {row}") from None
        designs.setdefault(row["design"], []).append(Component(row["name"], *values))
    if not designs:
        raise ValidationError(f"{source}: no components")
    baseline = meta.get("baseline") or next(iter(designs))
    return designs, baseline, expects


def bundled_components_text() -> str:
    return resources.files("sttdse.data").joinpath("table3.csv").read_text()


def run_summary(text: str, source="<components>"):
    """Totals and savings per design, plus one check row per expectation."""
    designs, baseline, expects = parse_components(text, source)
    summaries = accelerator_summary(designs, baseline)
    rows = [{"design": s.name, "area_mm2": s.area, "dynamic_mw": s.dynamic,
             "leakage_mw": s.leakage, "power_mw": s.power,
             "area_saving_pct": s.area_saving_pct, "power_saving_pct": s.power_saving_pct}
            for s in summaries]
    by_name = {r["design"]: r for r in rows}
    checks = []
    for design, metric, expected, tol in expects:
        actual = by_name.get(design, {}).get(metric)
        ok = actual is not None and abs(actual - expected) <= tol
        checks.append({"design": design, "metric": metric, "expected": expected,
                       "tolerance": tol, "actual": actual, "status": "PASS" if ok else "FAIL"})
    return rows, checks


__all__ = [name for name in dir() if name.startswith("run_")] + [
    "write_csv", "csv_text", "format_table", "parse_components", "DomainError"]
