"""Tests for configuration parsing and validation."""

import os
from unittest.mock import patch

import pytest

from subdecode.codes.patterns import CodeParams
from subdecode.core.config import (
    DEFAULT_SEED,
    ConfigManager,
    ExperimentConfig,
    ProblemSpec,
    available_presets,
    describe_error,
    parse_key_values,
)
from subdecode.core.exceptions import ConfigurationError, UnknownSchemeError
from subdecode.core.interfaces import (
    ErasureKind,
    ProblemKind,
    Scheme,
    SchemeLabel,
    SplitScheme,
)


class TestParseKeyValues:
    """Test the flat key = value format."""

    def test_typed_values(self):
        values = parse_key_values(
            "# header\nP = 20\nepsilon = 0.5\nschemes = [coded-d2, uncoded]\n"
            "accelerate = true\ngraph = er  # trailing comment\n\n"
        )
        assert values == {
            "P": 20,
            "epsilon": 0.5,
            "schemes": ["coded-d2", "uncoded"],
            "accelerate": True,
            "graph": "er",
        }

    def test_empty_value(self):
        assert parse_key_values("edge_list =")["edge_list"] is None

    def test_missing_equals(self):
        with pytest.raises(ConfigurationError, match="demo.conf:2"):
            parse_key_values("P = 4\njust words\n", "demo.conf")


class TestSchemeLabels:
    """Test scheme name parsing."""

    def test_degree_suffix(self):
        label = SchemeLabel.parse("coded-d3")
        assert label.scheme is Scheme.CODED
        assert label.degree == 3
        assert str(label) == "coded-d3"

    def test_aliases(self):
        assert Scheme.parse("replication") is Scheme.REPLICATION_COMM
        assert Scheme.parse("AGC") is Scheme.APPROX_GRADIENT_CODING
        assert Scheme.parse("replication-storage") is Scheme.REPLICATION_STORAGE

    def test_unknown_scheme(self):
        with pytest.raises(UnknownSchemeError) as excinfo:
            SchemeLabel.parse("turbo")
        assert "coded" in str(excinfo.value)

    def test_erasure_kinds(self):
        assert ErasureKind.parse("fixed_fraction") is ErasureKind.FIXED_FRACTION
        assert ErasureKind.parse("Bernoulli") is ErasureKind.BERNOULLI

    def test_baselines(self):
        assert Scheme.UNCODED.is_baseline
        assert not Scheme.CODED.is_baseline
        assert not Scheme.NOISELESS.is_baseline


class TestExperimentConfig:
    """Test experiment validation."""

    def test_defaults_are_valid(self):
        cfg = ExperimentConfig()
        cfg.validate()
        assert cfg.seed == DEFAULT_SEED

    def test_label_degree_overrides_code(self):
        cfg = ExperimentConfig(scheme=SchemeLabel(Scheme.CODED, 3))
        assert cfg.params == CodeParams(20, 10, 3)

    def test_label_degree_too_large(self):
        cfg = ExperimentConfig(scheme=SchemeLabel(Scheme.CODED, 11))
        with pytest.raises(ConfigurationError):
            cfg.validate()

    def test_combined_cyclic_needs_twice_k(self):
        with pytest.raises(ConfigurationError, match="P = 2k"):
            ExperimentConfig(code=CodeParams(21, 10, 2)).validate()

    def test_eigen_needs_column_split(self):
        cfg = ExperimentConfig(problem=ProblemSpec(problem=ProblemKind.EIGEN, graph="sbm"))
        with pytest.raises(ConfigurationError) as excinfo:
            cfg.validate()
        assert excinfo.value.field == "split"

    def test_summa_sizes(self):
        cfg = ExperimentConfig(split=SplitScheme.SUMMA, code=CodeParams(18, 9, 2))
        cfg.validate()
        assert cfg.group_params == CodeParams(6, 3, 2)
        with pytest.raises(ConfigurationError):
            ExperimentConfig(split=SplitScheme.SUMMA, code=CodeParams(20, 10, 2)).validate()

    def test_gradient_coding_only_for_gd(self):
        cfg = ExperimentConfig(scheme=SchemeLabel(Scheme.APPROX_GRADIENT_CODING))
        with pytest.raises(ConfigurationError):
            cfg.validate()

    def test_negative_iterations(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(iterations=-1).validate()

    def test_edgelist_needs_path(self):
        spec = ProblemSpec(graph="edgelist")
        with pytest.raises(ConfigurationError) as excinfo:
            spec.validate()
        assert "edge_list" in describe_error(excinfo.value)

    def test_edge_probability_from_mean_degree(self):
        assert ProblemSpec(n_nodes=11, mean_degree=5.0).edge_probability() == 0.5


class TestConfigManager:
    """Test the configuration manager."""

    def test_file_and_overrides(self, tmp_path):
        path = tmp_path / "exp.conf"
        path.write_text("schemes = [uncoded, coded-d3]\nn_nodes = 50\nruns = 7\n")
        manager = ConfigManager(path, overrides={"runs": 2, "seed": None}, use_env=False)
        configs = manager.get_experiment_configs()
        assert [str(c.scheme) for c in configs] == ["uncoded", "coded-d3"]
        assert configs[0].runs == 2
        assert configs[0].seed == DEFAULT_SEED
        assert configs[1].problem.n_nodes == 50

    def test_yaml_file(self, tmp_path):
        path = tmp_path / "exp.yaml"
        path.write_text("problem: gd\nn_rows: 40\ndim: 5\nschemes: coded\n")
        cfg = ConfigManager(path, use_env=False).get_experiment_configs()[0]
        assert cfg.problem.problem is ProblemKind.GD
        assert cfg.problem.graph == "gaussian"

    def test_environment_overrides(self, tmp_path):
        path = tmp_path / "exp.conf"
        path.write_text("runs = 7\n")
        with patch.dict(os.environ, {"SUBDECODE_RUNS": "3", "SUBDECODE_SEED": "9"}):
            cfg = ConfigManager(path).get_experiment_configs()[0]
        assert cfg.runs == 3
        assert cfg.seed == 9

    def test_environment_ignored_when_disabled(self, tmp_path):
        path = tmp_path / "exp.conf"
        path.write_text("runs = 7\n")
        with patch.dict(os.environ, {"SUBDECODE_RUNS": "3"}):
            cfg = ConfigManager(path, use_env=False).get_experiment_configs()[0]
        assert cfg.runs == 7

    def test_bad_type(self, tmp_path):
        path = tmp_path / "exp.conf"
        path.write_text("runs = many\n")
        with pytest.raises(ConfigurationError) as excinfo:
            ConfigManager(path, use_env=False).get_experiment_configs()
        assert excinfo.value.field == "runs"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="Failed to load"):
            ConfigManager(tmp_path / "absent.conf", use_env=False)

    def test_unknown_keys_warn(self, tmp_path):
        path = tmp_path / "exp.conf"
        path.write_text("colour = blue\n")
        with patch("subdecode.core.config.logger") as logger:
            ConfigManager(path, use_env=False)
        logger.warning.assert_called_once()

    def test_verify_config(self, tmp_path):
        path = tmp_path / "verify.conf"
        path.write_text("checks = lemma1\ndegrees = [3]\nlemma1_samples = 10\n")
        cfg = ConfigManager(path, use_env=False).get_verify_config()
        assert cfg.checks == ["lemma1"]
        assert cfg.degrees == [3]
        assert cfg.lemma1_samples == 10

    def test_unknown_check(self, tmp_path):
        path = tmp_path / "verify.conf"
        path.write_text("checks = [lemma7]\n")
        with pytest.raises(ConfigurationError, match="lemma7"):
            ConfigManager(path, use_env=False).get_verify_config()

    def test_gen_config(self, tmp_path):
        path = tmp_path / "gen.conf"
        path.write_text("generator = sbm\nn_nodes = 10\n")
        cfg = ConfigManager(path, use_env=False).get_gen_config()
        assert cfg.generator == "sbm"
        assert cfg.n_nodes == 10


class TestPresets:
    """Test the shipped presets."""

    def test_presets_listed(self):
        assert {"twitter-scaled", "delta-table", "gd-least-squares"} <= set(available_presets())

    @pytest.mark.parametrize(
        "name", ["twitter-scaled", "pagerank-column", "pagerank-summa", "spectral-sbm",
                 "svd-planted", "gd-least-squares"]
    )
    def test_experiment_presets_validate(self, name):
        configs = ConfigManager.from_preset(name, use_env=False).get_experiment_configs()
        assert configs

    def test_twitter_schemes(self):
        configs = ConfigManager.from_preset("twitter-scaled", use_env=False).get_experiment_configs()
        assert [str(c.scheme) for c in configs] == [
            "noiseless", "uncoded", "replication_comm", "coded-d2", "coded-d3"
        ]
        assert configs[0].problem.n_nodes == 5000
        assert configs[0].runs == 100

    def test_table_preset(self):
        cfg = ConfigManager.from_preset("delta-table", use_env=False).get_verify_config()
        assert cfg.checks == ["delta_table"]
        assert cfg.degrees == [2, 3, 4, 5]

    def test_unknown_preset(self):
        with pytest.raises(ConfigurationError, match="unknown preset"):
            ConfigManager.from_preset("nope")
