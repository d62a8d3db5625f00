"""Configuration management for subdecode."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import yaml
from dotenv import load_dotenv

from subdecode.codes.patterns import CodeParams, PatternKind
from subdecode.core.exceptions import ConfigurationError, PatternError, SubdecodeError
from subdecode.core.interfaces import (
    ErasureKind,
    ProblemKind,
    Scheme,
    SchemeLabel,
    SplitScheme,
)
from subdecode.kernel.dense import DEFAULT_RANK_TOL
from subdecode.simharness.erasure import ErasureModel
from subdecode.utils.logging import get_logger

# Load environment variables from .env file
load_dotenv()

logger = get_logger(__name__)

DEFAULT_SEED = 20190101

PRESET_DIR = Path(__file__).resolve().parents[2] / "presets"

__all__ = [
    "DEFAULT_SEED",
    "CodeParams",
    "ConfigManager",
    "ErasureModel",
    "ExperimentConfig",
    "GenConfig",
    "ProblemSpec",
    "VerifyConfig",
    "available_presets",
    "describe_error",
    "parse_key_values",
]


@dataclass
class ProblemSpec:
    """Which problem instance an experiment iterates on."""

    problem: ProblemKind = ProblemKind.PAGERANK
    graph: str = "er"

    # graph sizes and densities
    n_nodes: int = 1000
    mean_degree: float | None = 20.0
    edge_prob: float | None = None
    p_in: float = 0.02
    p_out: float = 0.003

    # pagerank
    damping: float = 0.15
    dangling: str = "keep"

    # eigen / svd
    rank: int = 2
    isolates: str = "reject"
    background_prob: float = 0.01
    planted_blocks: int = 5
    block_size: int = 50
    block_prob: float = 0.2

    # gradient descent
    n_rows: int = 500
    dim: int = 100
    step_size: float = 0.5
    normalize_step: bool = True

    # inputs
    edge_list: str | None = None
    matrix_file: str | None = None
    regenerate_per_run: bool = False

    def edge_probability(self) -> float:
        """ER edge probability from ``edge_prob`` or ``mean_degree / (N − 1)``."""
        if self.edge_prob is not None:
            return self.edge_prob
        if self.mean_degree is None:
            raise ConfigurationError("set edge_prob or mean_degree", "edge_prob")
        return min(1.0, self.mean_degree / max(self.n_nodes - 1, 1))

    def validate(self) -> None:
        if self.n_nodes < 2:
            raise ConfigurationError(f"n_nodes must be at least 2, got {self.n_nodes}", "n_nodes")
        for name in ("p_in", "p_out", "background_prob", "block_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1], got {value}", name)
        if self.edge_prob is not None and not 0.0 <= self.edge_prob <= 1.0:
            raise ConfigurationError(f"edge_prob must lie in [0, 1], got {self.edge_prob}", "edge_prob")
        if not 0.0 < self.damping < 1.0:
            raise ConfigurationError(f"damping must lie in (0, 1), got {self.damping}", "damping")
        if self.dangling not in ("keep", "uniform"):
            raise ConfigurationError(f"dangling must be keep or uniform, got {self.dangling}", "dangling")
        if self.isolates not in ("reject", "drop"):
            raise ConfigurationError(f"isolates must be reject or drop, got {self.isolates}", "isolates")
        if self.rank < 1:
            raise ConfigurationError(f"rank must be positive, got {self.rank}", "rank")
        if self.step_size <= 0:
            raise ConfigurationError(f"step_size must be positive, got {self.step_size}", "step_size")
        if self.problem is ProblemKind.GD and self.n_rows < self.dim:
            raise ConfigurationError(
                f"least squares needs n_rows >= dim, got {self.n_rows} < {self.dim}", "n_rows"
            )
        graphs = {
            ProblemKind.PAGERANK: ("er", "edgelist"),
            ProblemKind.EIGEN: ("sbm", "er", "edgelist"),
            ProblemKind.SVD: ("planted", "triplets"),
            ProblemKind.GD: ("gaussian",),
        }[self.problem]
        if self.problem is not ProblemKind.GD and self.graph not in graphs:
            raise ConfigurationError(
                f"{self.problem.value} problems take graph in {graphs}, got {self.graph}", "graph"
            )
        if self.graph == "edgelist" and not self.edge_list:
            raise ConfigurationError("graph = edgelist needs edge_list", "edge_list")
        if self.graph == "triplets" and not self.matrix_file:
            raise ConfigurationError("graph = triplets needs matrix_file", "matrix_file")


@dataclass
class ExperimentConfig:
    """One scheme of one experiment: problem, code, erasures and run counts."""

    problem: ProblemSpec = field(default_factory=ProblemSpec)
    scheme: SchemeLabel = field(default_factory=lambda: SchemeLabel(Scheme.CODED))
    split: SplitScheme = SplitScheme.ROW
    code: CodeParams = field(default_factory=lambda: CodeParams(20, 10, 2))
    erasure: ErasureModel = field(default_factory=ErasureModel)
    iterations: int = 30
    runs: int = 100
    seed: int = DEFAULT_SEED

    # numerics and execution
    rank_tol: float = DEFAULT_RANK_TOL
    accelerate: bool = False
    pattern_kind: PatternKind = PatternKind.COMBINED_CYCLIC
    pattern_file: str | None = None
    jobs: int = 1
    shared: bool = False

    @property
    def params(self) -> CodeParams:
        """Code parameters with the scheme label's degree applied."""
        if self.scheme.degree is None:
            return self.code
        try:
            return replace(self.code, d=self.scheme.degree)
        except PatternError as e:
            raise ConfigurationError(str(e), "d") from e

    @property
    def group_params(self) -> CodeParams:
        """SUMMA: the per-group (P/√k, √k) code."""
        side = math.isqrt(self.code.k)
        params = self.params
        return CodeParams(params.P // side, side, min(params.d, side))

    def validate(self) -> None:
        """Check field ranges and scheme / split / problem compatibility."""
        self.problem.validate()
        if self.iterations < 0:
            raise ConfigurationError(f"iterations must be >= 0, got {self.iterations}", "iterations")
        if self.runs < 1:
            raise ConfigurationError(f"runs must be >= 1, got {self.runs}", "runs")
        if self.jobs < 1:
            raise ConfigurationError(f"jobs must be >= 1, got {self.jobs}", "jobs")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {self.seed}", "seed")

        kind, scheme = self.problem.problem, self.scheme.scheme
        required = {
            ProblemKind.EIGEN: SplitScheme.COLUMN,
            ProblemKind.SVD: SplitScheme.ROW,
            ProblemKind.GD: SplitScheme.ROW,
        }.get(kind)
        if required is not None and self.split is not required:
            raise ConfigurationError(
                f"{kind.value} problems need split = {required.value}", "split"
            )
        if scheme is Scheme.APPROX_GRADIENT_CODING and kind is not ProblemKind.GD:
            raise ConfigurationError(
                "approx_gradient_coding applies to gradient descent only", "schemes"
            )

        params = self.params
        P, k = params.P, params.k
        if self.split is SplitScheme.SUMMA:
            side = math.isqrt(k)
            if side * side != k:
                raise ConfigurationError(f"SUMMA needs a perfect-square k, got {k}", "k")
            if P % side or P // side < side:
                raise ConfigurationError(
                    f"SUMMA needs P divisible by √k={side} with groups of at least {side}", "P"
                )
            P, k = P // side, side
        if scheme is Scheme.REPLICATION_COMM and P % 2:
            raise ConfigurationError(f"replication needs an even worker count, got {P}", "P")
        if scheme is Scheme.APPROX_GRADIENT_CODING and (k % 2 or P % (k // 2)):
            raise ConfigurationError(
                f"fractional repetition needs even k dividing 2P, got P={P}, k={k}", "k"
            )
        if (
            scheme in (Scheme.CODED, Scheme.REPLICATION_STORAGE)
            and self.pattern_kind is PatternKind.COMBINED_CYCLIC
            and self.pattern_file is None
            and P != 2 * k
        ):
            raise ConfigurationError(
                f"combined-cyclic patterns need P = 2k, got P={P}, k={k}", "pattern"
            )


@dataclass
class VerifyConfig:
    """Oracle checks to run and their sample counts and thresholds."""

    checks: list[str] = field(
        default_factory=lambda: ["lemma1", "theorem1", "theorem2", "norm_lemmas"]
    )
    seed: int = DEFAULT_SEED

    # lemma1
    P: int = 20
    k: int = 10
    degrees: list[int] = field(default_factory=lambda: [2, 3])
    epsilon: float = 0.5
    lemma1_samples: int = 100_000
    delta_samples: int = 10_000
    offdiag_tol: float = 0.01
    spread_tol: float = 0.02
    mean_tol: float = 0.02

    # theorem1 / theorem2
    theorem_runs: int = 2000
    theorem_iterations: int = 5
    contraction_norm: float = 0.85
    theorem2_P: int = 16
    theorem2_k: int = 8
    theorem2_n: int = 32
    se_factor: float = 3.0

    # norm lemmas
    graph_nodes: int = 2000
    graph_prob: float = 0.02
    lemma_eps: float = 0.3
    lemma_k: int = 10
    n_graphs: int = 100

    def validate(self) -> None:
        from subdecode.verify.checks import CHECKS

        for name in self.checks:
            if name not in CHECKS:
                raise ConfigurationError(
                    f"unknown check {name!r} (expected one of: {', '.join(CHECKS)})", "checks"
                )
        for name in (
            "lemma1_samples", "delta_samples", "theorem_runs", "n_graphs", "theorem_iterations"
        ):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be positive", name)
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigurationError(f"epsilon must lie in [0, 1], got {self.epsilon}", "epsilon")


@dataclass
class GenConfig:
    """Synthetic input to write to disk."""

    generator: str = "er"
    n_nodes: int = 1000
    edge_prob: float = 0.02
    p_in: float = 0.02
    p_out: float = 0.003
    background_prob: float = 0.01
    planted_blocks: int = 5
    block_size: int = 50
    block_prob: float = 0.2
    seed: int = DEFAULT_SEED

    def validate(self) -> None:
        if self.generator not in ("er", "sbm", "planted"):
            raise ConfigurationError(
                f"generator must be er, sbm or planted, got {self.generator}", "generator"
            )
        if self.n_nodes < 1:
            raise ConfigurationError(f"n_nodes must be positive, got {self.n_nodes}", "n_nodes")
        for name in ("edge_prob", "p_in", "p_out", "background_prob", "block_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1], got {value}", name)


def _field_names(cls: type) -> set[str]:
    return {f.name for f in fields(cls)}


_PROBLEM_KEYS = _field_names(ProblemSpec)
_EXPERIMENT_KEYS = {
    "schemes", "split", "P", "k", "d", "erasure", "epsilon", "iterations", "runs",
    "seed", "rank_tol", "accelerate", "pattern", "pattern_file", "jobs", "shared",
}  # fmt: skip
_VERIFY_KEYS = _field_names(VerifyConfig)
_GEN_KEYS = _field_names(GenConfig) | {"generator"}
KNOWN_KEYS = _PROBLEM_KEYS | _EXPERIMENT_KEYS | _VERIFY_KEYS | _GEN_KEYS | {"log_level"}

_ENV_OVERRIDES = {
    "seed": "SUBDECODE_SEED",
    "runs": "SUBDECODE_RUNS",
    "iterations": "SUBDECODE_ITERS",
    "log_level": "SUBDECODE_LOG_LEVEL",
}


def parse_key_values(text: str, source: str = "<config>") -> dict[str, Any]:
    """
    Parse ``key = value`` lines.

    ``#`` starts a comment and blank lines are skipped. Values are typed with
    ``yaml.safe_load``, so ``[2, 3]``, ``0.5``, ``true`` and bare words work.
    """
    values: dict[str, Any] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigurationError(f"{source}:{number}: expected 'key = value', got {raw!r}")
        try:
            values[key] = yaml.safe_load(value.strip()) if value.strip() else None
        except yaml.YAMLError as e:
            raise ConfigurationError(f"{source}:{number}: bad value for {key}: {e}", key) from e
    return values


class ConfigManager:
    """Manages configuration for subdecode."""

    DEFAULT_CONFIG_PATHS = [
        "subdecode.conf",
        "subdecode.yaml",
        "subdecode.yml",
        ".subdecode.conf",
    ]

    def __init__(
        self,
        config_path: str | Path | None = None,
        overrides: dict[str, Any] | None = None,
        use_env: bool = True,
    ):
        self.config_path = config_path
        self._config: dict[str, Any] = {}
        self._load_config(use_env)
        for key, value in (overrides or {}).items():
            if value is not None:
                self._config[key] = value

    @classmethod
    def from_preset(cls, name: str, **kwargs: Any) -> "ConfigManager":
        """Configuration from a preset shipped in ``presets/``."""
        path = PRESET_DIR / f"{name}.conf"
        if not path.exists():
            raise ConfigurationError(
                f"unknown preset {name!r} (available: {', '.join(available_presets())})",
                "preset",
            )
        return cls(path, **kwargs)

    def _load_config(self, use_env: bool) -> None:
        """Load configuration from file and environment variables."""
        if self.config_path:
            self._load_config_file(self.config_path)
        else:
            for path in self.DEFAULT_CONFIG_PATHS:
                expanded_path = Path(path).expanduser()
                if expanded_path.exists():
                    self._load_config_file(expanded_path)
                    break

        if use_env:
            self._load_env_config()

        unknown = sorted(set(self._config) - KNOWN_KEYS)
        if unknown:
            logger.warning(f"ignoring unknown configuration keys: {', '.join(unknown)}")

    def _load_config_file(self, path: str | Path) -> None:
        """Load a flat key-value file, or a YAML mapping for .yaml/.yml files."""
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise ConfigurationError(f"Failed to load config file {path}: {e}") from e

        if Path(path).suffix in (".yaml", ".yml"):
            try:
                loaded = yaml.safe_load(text) or {}
            except yaml.YAMLError as e:
                raise ConfigurationError(f"Failed to load config file {path}: {e}") from e
            if not isinstance(loaded, dict):
                raise ConfigurationError(f"config file {path} must hold a mapping")
            self._config.update(loaded)
        else:
            self._config.update(parse_key_values(text, str(path)))

    def _load_env_config(self) -> None:
        """Load configuration from environment variables."""
        for key, env_var in _ENV_OVERRIDES.items():
            if value := os.getenv(env_var):
                self._config[key] = yaml.safe_load(value)

    def get(self, key: str, default: Any = None) -> Any:
        """Get a configuration value."""
        return self._config.get(key, default)

    def set(self, key: str, value: Any) -> None:
        """Set a configuration value."""
        self._config[key] = value

    @property
    def log_level(self) -> str:
        return str(self._config.get("log_level", "WARNING")).upper()

    def _typed(self, key: str, kind: type, default: Any) -> Any:
        value = self._config.get(key, default)
        if value is None:
            return None
        try:
            if kind is bool and isinstance(value, str):
                return value.strip().lower() in ("1", "true", "yes", "on")
            return kind(value)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(
                f"{key} must be of type {kind.__name__}, got {value!r}", key
            ) from e

    def _fill(self, cls: type, keys: set[str], **parsed: Any) -> Any:
        defaults = cls()
        values: dict[str, Any] = {}
        for f in fields(cls):
            if f.name in parsed:
                values[f.name] = parsed[f.name]
            elif f.name in self._config and f.name in keys:
                current = getattr(defaults, f.name)
                if isinstance(current, list):
                    raw = self._config[f.name]
                    values[f.name] = list(raw) if isinstance(raw, list | tuple) else [raw]
                elif current is None:
                    values[f.name] = self._config[f.name]
                else:
                    values[f.name] = self._typed(f.name, type(current), current)
        return cls(**values)

    def get_problem_spec(self) -> ProblemSpec:
        kind = ProblemKind.parse(str(self._config.get("problem", "pagerank")))
        graph = self._config.get("graph")
        if graph is None:
            graph = {
                ProblemKind.PAGERANK: "er",
                ProblemKind.EIGEN: "sbm",
                ProblemKind.SVD: "planted",
                ProblemKind.GD: "gaussian",
            }[kind]
        return self._fill(ProblemSpec, _PROBLEM_KEYS, problem=kind, graph=str(graph))

    def scheme_labels(self) -> list[SchemeLabel]:
        raw = self._config.get("schemes", ["coded"])
        if isinstance(raw, str):
            raw = [part for part in raw.replace(",", " ").split() if part]
        return [SchemeLabel.parse(str(label)) for label in raw]

    def get_experiment_configs(self) -> list[ExperimentConfig]:
        """One validated ExperimentConfig per configured scheme."""
        problem = self.get_problem_spec()
        try:
            code = CodeParams(
                self._typed("P", int, 20), self._typed("k", int, 10), self._typed("d", int, 2)
            )
            erasure = ErasureModel(
                ErasureKind.parse(str(self._config.get("erasure", "fixed"))),
                self._typed("epsilon", float, 0.5),
            )
        except PatternError as e:
            raise ConfigurationError(str(e), "d") from e

        pattern_file = self._config.get("pattern_file")
        base = ExperimentConfig(
            problem=problem,
            split=SplitScheme.parse(str(self._config.get("split", "row"))),
            code=code,
            erasure=erasure,
            iterations=self._typed("iterations", int, 30),
            runs=self._typed("runs", int, 100),
            seed=self._typed("seed", int, DEFAULT_SEED),
            rank_tol=self._typed("rank_tol", float, DEFAULT_RANK_TOL),
            accelerate=self._typed("accelerate", bool, False),
            pattern_kind=_parse_pattern_kind(str(self._config.get("pattern", "combined_cyclic"))),
            pattern_file=str(pattern_file) if pattern_file else None,
            jobs=self._typed("jobs", int, 1),
            shared=self._typed("shared", bool, False),
        )
        configs = [replace(base, scheme=label) for label in self.scheme_labels()]
        for cfg in configs:
            cfg.validate()
        return configs

    def get_verify_config(self) -> VerifyConfig:
        cfg = self._fill(VerifyConfig, _VERIFY_KEYS)
        cfg.validate()
        return cfg

    def get_gen_config(self) -> GenConfig:
        cfg = self._fill(GenConfig, _GEN_KEYS)
        cfg.validate()
        return cfg


def _parse_pattern_kind(name: str) -> PatternKind:
    key = name.strip().lower().replace("-", "_")
    for kind in (PatternKind.COMBINED_CYCLIC, PatternKind.RANDOM_REGULAR):
        if kind.value == key:
            return kind
    raise ConfigurationError(
        f"pattern must be combined_cyclic or random_regular, got {name}", "pattern"
    )


def available_presets() -> list[str]:
    return sorted(path.stem for path in PRESET_DIR.glob("*.conf"))


def describe_error(error: SubdecodeError) -> str:
    """One-line description of a library error, naming the field when known."""
    field_name = getattr(error, "field", None)
    return f"{error} (field: {field_name})" if field_name else str(error)
