import json

import numpy as np
import pytest

from llflow import cli
from llflow.fields import energy
from llflow.io import read_llf1
from llflow.lab import (PRESETS, ConfigError, ScenarioConfig, apply_overrides,
                        build_initial, build_sim_config, describe, load_config,
                        run_scenario, thread_count)

TINY_FLOW = """
[sim]
mode = flow
alpha = 1.0
beta = 0.5
grid_n = 32
half_extent = 4.0
scheme = imex
t_end = 0.05
ledger_every = 5
closure = constant

[init]
kind = gauss
amplitude = 1.0
lam = 1.5

[target]
kind = s2

[analysis]
radii = 1.0
checks = monotonicity,target_distance,dissipation
dissipation_coeff = 1e-2

[output]
dir = {outdir}
prefix = tiny
"""


def write_tiny(tmp_path, outdir=None):
    outdir = outdir or tmp_path / "out"
    path = tmp_path / "tiny.ini"
    path.write_text(TINY_FLOW.format(outdir=outdir))
    return path, outdir


class TestConfigValidation:
    def test_unknown_section_and_key(self):
        with pytest.raises(ConfigError, match="unknown section"):
            ScenarioConfig({"simulation": {}})
        with pytest.raises(ConfigError, match="unknown key"):
            ScenarioConfig({"sim": {"alpa": "1.0"}})

    def test_physical_sanity(self):
        base = {"mode": "flow", "alpha": "1.0", "grid_n": "32",
                "half_extent": "4.0"}
        ScenarioConfig({"sim": dict(base)})
        for key, bad in (("alpha", "0"), ("grid_n", "31"), ("grid_n", "8"),
                         ("half_extent", "-1")):
            with pytest.raises(ConfigError):
                ScenarioConfig({"sim": dict(base, **{key: bad})})

    def test_typed_getters(self):
        cfg = ScenarioConfig({"sim": {"mode": "groundstate"},
                              "analysis": {"radii": "2.0,1.0",
                                           "checks": "a, b"}})
        assert cfg.get_floats("analysis", "radii") == (2.0, 1.0)
        assert cfg.get_names("analysis", "checks") == ("a", "b")
        with pytest.raises(ConfigError, match="missing required"):
            cfg.get("analysis", "eps1", float)
        assert cfg.get("analysis", "eps1", float, 1.5) == 1.5

    def test_bad_value_cast(self):
        cfg = ScenarioConfig({"sim": {"mode": "groundstate"},
                              "analysis": {"eps1": "one"}})
        with pytest.raises(ConfigError, match="bad value"):
            cfg.get("analysis", "eps1", float)

    def test_overrides(self):
        data = apply_overrides({"sim": {"alpha": "1.0"}},
                               ["sim.alpha=2.0", "init.kind=gauss"], "t")
        assert data["sim"]["alpha"] == "2.0"
        assert data["init"]["kind"] == "gauss"
        with pytest.raises(ConfigError, match="duplicate"):
            apply_overrides({}, ["sim.alpha=1", "sim.alpha=2"], "t")
        with pytest.raises(ConfigError, match="section.key=value"):
            apply_overrides({}, ["alpha=1"], "t")

    def test_load_config_unknown_name(self):
        with pytest.raises(ConfigError, match="neither a preset"):
            load_config("no-such-preset")

    def test_presets_all_parse(self):
        for name in PRESETS:
            cfg = load_config(name)
            assert cfg.origin == name
            assert cfg.as_ini().startswith("[sim]")


class TestThreadCount:
    def test_env_parsing(self, monkeypatch):
        monkeypatch.setenv("LLFLOW_THREADS", "3")
        assert thread_count() == 3
        monkeypatch.setenv("LLFLOW_THREADS", "0")
        assert thread_count() >= 1
        monkeypatch.setenv("LLFLOW_THREADS", "two")
        with pytest.raises(ConfigError):
            thread_count()
        monkeypatch.setenv("LLFLOW_THREADS", "-1")
        with pytest.raises(ConfigError):
            thread_count()


class TestBuilders:
    def base(self, **init):
        return ScenarioConfig({
            "sim": {"mode": "flow", "alpha": "1.0", "grid_n": "32",
                    "half_extent": "4.0"},
            "init": {k: str(v) for k, v in init.items()}})

    @pytest.mark.parametrize("init", [
        {"kind": "bubble", "lam": 1.0},
        {"kind": "gauss", "amplitude": 1.0, "lam": 1.5},
        {"kind": "arctan", "lam": 1.0},
        {"kind": "calibrated-gauss", "energy": 5.0, "lam": 1.5},
    ])
    def test_sphere_kinds(self, init):
        u = build_initial(self.base(**init))
        assert u.m == 3
        if init["kind"] == "calibrated-gauss":
            assert energy(u) == pytest.approx(5.0, rel=1e-5)

    def test_torus_kind_and_unknown(self):
        u = build_initial(self.base(kind="torus-wave", amplitude=1.0))
        assert u.m == 4
        with pytest.raises(ConfigError, match="unknown init kind"):
            build_initial(self.base(kind="plane-wave"))

    def test_sim_config_closure_and_errors(self):
        cfg = ScenarioConfig({"sim": {"mode": "flow", "alpha": "1.0",
                                      "grid_n": "32", "half_extent": "4.0",
                                      "closure": "constant"}})
        sim = build_sim_config(cfg)
        assert sim.closure == "constant"
        assert build_sim_config(self.base(kind="gauss")).closure == "extend"
        bad = ScenarioConfig({"sim": {"mode": "flow", "alpha": "1.0",
                                      "grid_n": "32", "half_extent": "4.0",
                                      "closure": "mirror"}})
        with pytest.raises(ConfigError):
            build_sim_config(bad)


class TestRunScenario:
    def test_flow_artifacts_and_report(self, tmp_path, capsys):
        path, outdir = write_tiny(tmp_path)
        assert run_scenario(str(path)) == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == 3
        assert "FAIL" not in out
        ledger = (outdir / "tiny_ledger.csv").read_text()
        assert ledger.startswith("t,E,diss_cum,l4_cum,unit_drift")
        u, t = read_llf1(outdir / "tiny_final.llf1")
        assert t == pytest.approx(0.05, rel=1e-12)
        assert u.grid.n == 32
        report = json.loads((outdir / "tiny_report.json").read_text())
        assert report["schema_version"] == 1
        assert report["results"]["e0"] > 0
        assert all(c["passed"] for c in report["checks"])

    def test_bit_identical_reruns(self, tmp_path):
        (tmp_path / "a").mkdir()
        (tmp_path / "b").mkdir()
        path_a, out_a = write_tiny(tmp_path / "a")
        path_b, out_b = write_tiny(tmp_path / "b")
        assert run_scenario(str(path_a)) == 0
        assert run_scenario(str(path_b)) == 0
        for name in ("tiny_ledger.csv", "tiny_final.llf1"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_failed_check_exits_2(self, tmp_path, capsys):
        path, _ = write_tiny(tmp_path)
        code = run_scenario(str(path),
                            ["analysis.checks=energy_ratio",
                             "analysis.energy_ratio_max=1e-6"])
        assert code == 2
        assert "FAIL energy_ratio" in capsys.readouterr().out

    def test_config_error_exits_1(self, tmp_path, capsys):
        path, _ = write_tiny(tmp_path)
        assert run_scenario(str(path), ["sim.scheme=rk9"]) == 1
        assert "config error" in capsys.readouterr().out
        assert run_scenario("no-such-preset") == 1
        capsys.readouterr()

    def test_unknown_check_rejected(self, tmp_path, capsys):
        path, _ = write_tiny(tmp_path)
        assert run_scenario(str(path), ["analysis.checks=entropy"]) == 1
        assert "unknown check" in capsys.readouterr().out

    def test_describe(self, capsys):
        assert describe("harmonic-stationary") == 0
        out = capsys.readouterr().out
        assert "criteria:" in out and "[sim]" in out
        assert describe("nope") == 1
        capsys.readouterr()


class TestCli:
    def test_simulate_roundtrip(self, tmp_path, capsys):
        path, outdir = write_tiny(tmp_path)
        code = cli.main(["simulate", "--config", str(path)])
        assert code == 0
        assert (outdir / "tiny_report.json").is_file()
        capsys.readouterr()

    def test_usage_error_exits_1(self, capsys):
        assert cli.main(["simulate"]) == 1
        assert cli.main(["no-such-command"]) == 1
        capsys.readouterr()

    def test_harmonic_then_bubble_fit(self, tmp_path, capsys):
        snap = tmp_path / "bubble.llf1"
        assert cli.main(["harmonic", "--lambda", "1.0", "--out", str(snap),
                         "--grid-n", "256", "--half-extent", "8.0"]) == 0
        capsys.readouterr()
        assert cli.main(["bubble-fit", "--snapshot", str(snap)]) == 0
        fit = json.loads(capsys.readouterr().out)
        assert fit["lam_physical"] == pytest.approx(1.0, rel=0.05)
        assert fit["schema_version"] == 1

    def test_gauge_audit_requires_dt_with_prev(self, tmp_path, capsys):
        snap = tmp_path / "s.llf1"
        cli.main(["harmonic", "--lambda", "2.0", "--out", str(snap),
                  "--grid-n", "64", "--half-extent", "8.0"])
        capsys.readouterr()
        assert cli.main(["gauge-audit", "--snapshot", str(snap),
                         "--prev", str(snap)]) == 1
        capsys.readouterr()

    def test_missing_snapshot_exits_1(self, capsys):
        assert cli.main(["bubble-fit", "--snapshot", "/no/such.llf1"]) == 1
        capsys.readouterr()
