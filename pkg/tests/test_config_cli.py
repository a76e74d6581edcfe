import io
import json

import numpy as np
import pytest

from sttdse import report
from sttdse.cli import main
from sttdse.config import Config
from sttdse.core_timing import model_retention_profile
from sttdse.errors import ValidationError
from sttdse.workload import bundled_model, required_glb

DRAM = "dram.energy_per_byte=20"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


class TestConfig:
    def test_defaults(self):
        cfg = Config()
        assert cfg.accelerator().w_sa == 42
        assert [label for label, _ in cfg.targets()] == ["glb", "glb_lsb", "weights"]

    def test_override_types(self):
        cfg = Config(overrides=["accelerator.h_a=84", "memory.sram_table=sram"])
        assert cfg.accelerator().h_a == 84

    def test_unknown_key_named(self):
        with pytest.raises(ValidationError, match="accelerator.bogus"):
            Config(overrides=["accelerator.bogus=1"])

    def test_bad_schema_version(self):
        with pytest.raises(ValidationError):
            Config({"schema_version": 2})

    def test_dram_energy_required(self):
        with pytest.raises(ValidationError, match="energy_per_byte"):
            Config().dram()

    def test_env_var(self, tmp_path, monkeypatch):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"schema_version": 1, "accelerator": {"h_a": 21}}))
        monkeypatch.setenv("STTDSE_CONFIG", str(path))
        assert Config.load().accelerator().h_a == 21


class TestExitCodes:
    def test_ok(self):
        assert run("device")[0] == 0

    def test_malformed_config_names_field(self, capsys):
        assert run("device", "--set", "mtj.alpha=-1")[0] == 2
        assert "alpha" in capsys.readouterr().err

    def test_infeasible(self):
        target = json.dumps([{"t_ret": 3, "ber_rf": 1.0, "ber_rd": 1e-8, "ber_we": 1e-8}])
        assert run("device", "--set", f"mtj.targets={target}")[0] == 3

    def test_io(self, tmp_path):
        assert run("summary", str(tmp_path / "missing.csv"))[0] == 4
        assert run("device", "--config", str(tmp_path / "missing.json"))[0] == 4

    def test_bad_json_config(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text("{")
        assert run("device", "--config", str(path))[0] == 2

    def test_empty_model_list_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            run("retention")
        assert exc.value.code == 2

    def test_tech_range(self):
        assert run("energy", "alexnet", "--set", "memory.glb_bytes=1")[0] == 2


class TestDevice:
    def test_rows(self):
        rows = {r["label"]: r for r in report.run_device(Config())}
        assert rows["glb"]["delta"] == pytest.approx(19.5, abs=0.3)
        assert rows["weights"]["delta"] == pytest.approx(39.0, abs=0.5)

    def test_csv_columns(self):
        code, text = run("device", "--csv", "-")
        header = text.splitlines()[0].split(",")
        assert code == 0 and header == list(report.DEVICE_COLUMNS)

    def test_guardband(self):
        rows = report.run_guardband(Config(), [39, 19.5, 12.5])
        assert [round(r["delta_gb"], 1) for r in rows] == [55.8, 27.9, 17.9]


class TestRetention:
    def test_resnet_batch16_passes(self):
        rows = report.run_retention(["resnet50"], Config(), [16], "bf16")
        (summary,) = [r for r in rows if r["pair"] == "MAX"]
        assert summary["status"] == "PASS" and summary["seconds"] < 1.5

    def test_one_summary_row_per_batch(self):
        rows = report.run_retention(["alexnet"], Config(), [1, 2, 4])
        assert [r["batch"] for r in rows if r["pair"] == "MAX"] == [1, 2, 4]

    def test_limit_flags_fail(self):
        rows = report.run_retention(["vgg16"], Config(), [16], "bf16", limit=0.1)
        assert rows[-1]["status"] == "FAIL"


class TestDse:
    def test_mostly_zero_extra_traffic(self):
        cfg = Config(overrides=[DRAM])
        rows = report.run_dse(cfg)
        assert len(rows) == 6
        zero = sum(1 for r in rows if r["extra_dram_bytes"] == 0)
        assert zero >= len(rows) - 1

    def test_lexicographic_order(self):
        cfg = Config(overrides=[DRAM, 'sweep.axes={"batch":[1,2],"glb_bytes":[8388608,12582912]}',
                                'sweep.models=["alexnet"]'])
        keys = [(r["batch"], r["glb_bytes"]) for r in report.run_dse(cfg)]
        assert keys == sorted(keys)

    def test_single_point_matches_components(self):
        cfg = Config(overrides=[DRAM, 'sweep.axes={"batch":[4],"datatype":["bf16"]}',
                                'sweep.models=["resnet50"]'])
        (row,) = report.run_dse(cfg)
        model = bundled_model("resnet50", "bf16")
        assert row["required_glb_bytes"] == required_glb(model, 4)
        assert row["retention_max_s"] == model_retention_profile(model, cfg.accelerator(), 4).max_seconds
        energy = {r["arch"]: r["total_j"] for r in report.run_energy(["resnet50"], cfg, 4, "bf16")}
        assert row["e_mram_scratch_j"] == energy["mram_scratch"]

    def test_workers_do_not_change_output(self):
        sets = [DRAM, 'sweep.axes={"batch":[1,2],"mac_array":["42x42","84x84"],"delta":[27.5,17.5]}']
        _, serial = run("dse", "--csv", "-", "--workers", "1", *sum([["--set", s] for s in sets], []))
        _, parallel = run("dse", "--csv", "-", "--workers", "4", *sum([["--set", s] for s in sets], []))
        assert serial == parallel and serial.count("\n") == 1 + 3 * 8

    def test_cap_refusal_prints_count(self, capsys):
        code, _ = run("dse", "--set", DRAM, "--set", "sweep.max_points=5")
        assert code == 2 and "6 design points" in capsys.readouterr().err

    @pytest.mark.parametrize("axes", ['{"warp":[1]}', '{}', '{"batch":[]}', '{"mac_array":["42x40"]}'])
    def test_bad_axes(self, axes):
        assert run("dse", "--set", DRAM, "--set", f"sweep.axes={axes}")[0] == 2


class TestSummary:
    def test_bundled(self):
        code, text = run("summary")
        assert code == 0 and text.count("PASS") == 4

    def test_baseline_only(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text("# schema_version=1\ndesign,name,area_mm2,dynamic_mw,leakage_mw\n"
                        "base,core,4,900,1\nbase,glb,16,50,0.2\n")
        code, text = run("summary", str(path))
        assert code == 0 and "saving" not in text
        assert "20" in text

    def test_negative_value(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text("# schema_version=1\ndesign,name,area_mm2,dynamic_mw,leakage_mw\nbase,core,-4,900,1\n")
        assert run("summary", str(path))[0] == 2

    def test_unmet_expectation(self, tmp_path):
        text = report.bundled_components_text().replace("expect stt_ai area_saving_pct 74.9",
                                                        "expect stt_ai area_saving_pct 60")
        path = tmp_path / "c.csv"
        path.write_text(text)
        assert run("summary", str(path))[0] == 1


class TestInject:
    def test_files(self, tmp_path):
        src, dst, side = tmp_path / "in.bin", tmp_path / "out.bin", tmp_path / "s.json"
        np.arange(50_000, dtype="<u2").tofile(src)
        args = ["inject", str(src), str(dst), "--seed", "3", "--sidecar", str(side),
                "--set", "ber.ber_rf=1e-3"]
        assert run(*args)[0] == 0
        first = dst.read_bytes(), side.read_text()
        assert run(*args)[0] == 0
        assert (dst.read_bytes(), side.read_text()) == first
        doc = json.loads(first[1])
        assert doc["flips"]["total"] == len(doc["positions"]) > 0


@pytest.mark.parametrize("argv", [
    ["device"], ["guardband"], ["workload", "alexnet", "vgg16", "--batch", "1", "2"],
    ["workload", "resnet50", "--layers"], ["retention", "vgg16", "--batch", "1", "16"],
    ["energy", "alexnet"], ["dse", "--set", DRAM], ["summary"]])
def test_byte_identical_reruns(tmp_path, argv):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(*argv, "--csv", str(a))[0] == 0
    assert run(*argv, "--csv", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes() and a.stat().st_size > 0
