import json
import math

import pytest

from copula_risk.presets import (
    CYBER_PRESETS,
    EXPERIMENT_PRESETS,
    ConfigError,
    config_from_dict,
    cyber_preset,
    load_config,
    preset_config,
)


class TestPresets:
    @pytest.mark.parametrize("name", sorted(EXPERIMENT_PRESETS))
    def test_every_preset_validates(self, name):
        cfg = preset_config(name)
        assert cfg.scenario().grid[-1] == 200.0

    def test_cyber_presets(self):
        assert CYBER_PRESETS["example1"].t_patch == 48.0
        assert CYBER_PRESETS["results200"].t_patch == 60.0
        with pytest.raises(ConfigError, match="unknown cyber preset"):
            cyber_preset("nope")

    def test_t_copula_preset(self):
        cfg = preset_config("t-copula")
        assert cfg.copula.nu == 4.0 and cfg.safety.f0_offset == 0.1

    def test_dynamic_presets(self):
        for name in ("normal-dyn", "gumbel-dyn", "frank-dyn"):
            cfg = preset_config(name)
            assert cfg.safety.f0_offset == 0.2 and cfg.cyber.t_patch == 48.0
            assert math.isinf(cfg.dynamic.t_cut)
        assert preset_config("frank-dyn").dynamic.omega == 3.0
        assert preset_config("gumbel-dyn").dynamic.omega == 2.0

    def test_presets_are_not_mutated_by_overlays(self):
        before = json.dumps(EXPERIMENT_PRESETS, sort_keys=True, default=str)
        config_from_dict({"preset": "normal-200", "copula": {"rho": 0.5}, "grid": {"n_points": 3}})
        assert json.dumps(EXPERIMENT_PRESETS, sort_keys=True, default=str) == before


class TestOverlay:
    def test_partial_copula_update(self):
        cfg = config_from_dict({"preset": "normal-200", "copula": {"rho": -0.3}})
        assert cfg.copula.rho == -0.3 and cfg.copula.family == "normal"

    def test_family_switch_replaces_parameters(self):
        cfg = config_from_dict({"preset": "normal-200", "copula": {"family": "gumbel", "theta": 2.0}})
        assert cfg.copula.theta == 2.0 and cfg.copula.rho is None

    def test_cyber_preset_reference(self):
        cfg = config_from_dict({"preset": "normal-200", "cyber": {"preset": "example1", "gamma": 0.2}})
        assert cfg.cyber.t_patch == 48.0 and cfg.cyber.gamma == 0.2

    def test_safety_phase_keeps_offset(self):
        cfg = config_from_dict({"preset": "normal-dyn", "safety": {"phase": "wearout"}})
        assert cfg.safety.shape_k == 3.0 and cfg.safety.f0_offset == 0.2

    def test_explicit_weibull(self):
        cfg = config_from_dict(
            {"preset": "normal-200", "safety": {"shape_k": 2.0, "scale_lambda": 500.0, "f0_offset": 0.0}}
        )
        assert cfg.safety.shape_k == 2.0 and cfg.phase is None

    def test_uncapped_cyber(self):
        cfg = config_from_dict({"preset": "normal-200", "cyber": {"n_threshold": None}})
        assert not cfg.cyber.cap_enabled

    def test_standalone_document(self):
        doc = {
            "cyber": dict(vars(CYBER_PRESETS["example1"])),
            "safety": {"phase": "random"},
            "copula": {"family": "frank", "theta": 1.0},
            "dynamic": {"o1": 1.0, "o2": 0.5, "omega": 2.0, "t_cut": 100.0},
            "grid": {"t_max": 100.0, "n_points": 11},
            "output": {"format": "json", "path": "out.json"},
        }
        cfg = config_from_dict(doc)
        assert cfg.scenario().grid == tuple(float(x) for x in range(0, 101, 10))
        assert cfg.dynamic.t_cut == 100.0 and cfg.output_format == "json" and cfg.output_path == "out.json"


class TestValidation:
    @pytest.mark.parametrize(
        "doc, path",
        [
            ({"preset": "normal-200", "colour": 1}, "colour"),
            ({"preset": "normal-200", "copula": {"rh0": 0.2}}, "copula.rh0"),
            ({"preset": "normal-200", "cyber": {"alpha": 1.0}}, "cyber.alpha"),
            ({"preset": "normal-200", "grid": {"steps": 3}}, "grid.steps"),
            ({"preset": "normal-dyn", "dynamic": {"o3": 1.0}}, "dynamic.o3"),
            ({"preset": "normal-200", "output": {"dir": "x"}}, "output.dir"),
        ],
    )
    def test_unknown_key_names_path(self, doc, path):
        with pytest.raises(ConfigError, match=rf"^{path}: unknown key"):
            config_from_dict(doc)

    @pytest.mark.parametrize(
        "doc, prefix",
        [
            ({"preset": "missing"}, "preset"),
            ({"copula": {"family": "normal", "rho": 0.1}}, "cyber"),
            ({"preset": "normal-200", "copula": {"rho": 2.0}}, "copula"),
            ({"preset": "normal-200", "cyber": {"p0": -1.0}}, "cyber"),
            ({"preset": "normal-200", "safety": {"phase": "teen"}}, "safety.phase"),
            ({"preset": "normal-200", "safety": {"phase": "random", "shape_k": 2.0}}, "safety"),
            ({"preset": "normal-200", "grid": {"n_points": 0}}, "grid.n_points"),
            ({"preset": "normal-200", "grid": {"n_points": 2.5}}, "grid.n_points"),
            ({"preset": "normal-200", "grid": {"t_max": -5.0}}, "grid.t_max"),
            ({"preset": "normal-200", "output": {"format": "xml"}}, "output.format"),
            ({"preset": "normal-dyn", "dynamic": {"mode": "wild"}}, "dynamic"),
            ({"preset": "normal-200", "copula": []}, "copula"),
        ],
    )
    def test_invalid_values(self, doc, prefix):
        with pytest.raises(ConfigError, match=rf"^{prefix}"):
            config_from_dict(doc)


class TestLoadConfig:
    def test_file_with_preset_argument(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"copula": {"rho": 0.5}}))
        cfg = load_config(path, preset="normal-200")
        assert cfg.copula.rho == 0.5

    def test_preset_in_file_wins(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"preset": "gumbel-200"}))
        assert load_config(path, preset="normal-200").copula.family == "gumbel"

    @pytest.mark.parametrize("text, match", [("{bad", "invalid JSON"), ("[1, 2]", "JSON object")])
    def test_bad_files(self, tmp_path, text, match):
        path = tmp_path / "cfg.json"
        path.write_text(text)
        with pytest.raises(ConfigError, match=match):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "absent.json")
