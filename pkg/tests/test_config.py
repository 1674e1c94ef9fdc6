"""Tests for runtime settings and experiment configuration."""

import os
from pathlib import Path
from unittest import mock

import numpy as np
import pytest

from src.artifacts import write_idx
from src.sigma_extrapolation.config import (
    ExperimentConfig,
    RuntimeSettings,
    build_family,
    build_solver_config,
    load_experiment,
)
from src.sigma_extrapolation.domain import Annulus, Cube, SectorPair
from src.sigma_extrapolation.errors import ConfigError
from src.sigma_extrapolation.family import DiscreteInterpolant
from src.sigma_extrapolation.quadrature import RuleKind
from src.sigma_extrapolation.spectral import SetKind

EXPERIMENTS = Path(__file__).resolve().parents[1] / "experiments"

MINIMAL = """
name = "minimal"
alpha = 2.0
pipeline = ["solve"]

[domain]
shape = "cube"
half_width = 0.5

[family]
members = [{ kind = "sinc_power" }]

[solver]
delta = 0.1
tau_g = 0.01
tau_sigma = 0.5
iterations = 3
tensor_resolution = 64
"""


def write_config(tmp_path, text, name="config.toml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestRuntimeSettings:
    """Process settings read from the environment."""

    @mock.patch.dict(os.environ, {
        "LOG_LEVEL": "DEBUG",
        "SIGMA_LOG_DIR": "/tmp/sigma-logs",
        "SIGMA_OUTPUT_DIR": "/tmp/sigma-out",
        "SIGMA_PNG": "yes",
        "SIGMA_SEED": "17",
    })
    def test_from_env(self):
        settings = RuntimeSettings()
        assert settings.log_level == "DEBUG"
        assert settings.log_dir == Path("/tmp/sigma-logs")
        assert settings.output_dir == Path("/tmp/sigma-out")
        assert settings.png_enabled is True
        assert settings.seed == 17

    @mock.patch.dict(os.environ, {}, clear=True)
    def test_defaults(self):
        settings = RuntimeSettings()
        assert settings.log_level == "INFO"
        assert settings.output_dir == Path("out")
        assert settings.png_enabled is False
        assert settings.seed is None


class TestCheckedInExperiments:
    def test_single_sinc(self):
        config = load_experiment(EXPERIMENTS / "single_sinc" / "config.toml")
        assert config.domain.build() == Cube(1, 0.5)
        assert config.solver.spectral_set.kind is SetKind.NUCLEAR_BALL
        assert config.pipeline == ["validate-params", "solve", "extrapolate", "gp-baseline"]

    def test_multiresolution(self):
        config = load_experiment(EXPERIMENTS / "multiresolution" / "config.toml")
        assert config.multiplier.source == "single"
        assert config.multiresolution.terms == 257

    def test_digit_experiment_needs_data(self):
        if (EXPERIMENTS / "mnist" / "data").exists():
            pytest.skip("digit data is installed")
        with pytest.raises(ConfigError, match="IDX file"):
            load_experiment(EXPERIMENTS / "mnist" / "config.toml")


class TestLoadExperiment:
    def test_minimal(self, tmp_path):
        config = load_experiment(write_config(tmp_path, MINIMAL))
        assert config.seed == 0
        assert config.outputs.directory == Path("out")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_experiment(tmp_path / "absent.toml")

    def test_invalid_toml(self, tmp_path):
        with pytest.raises(ConfigError):
            load_experiment(write_config(tmp_path, "name = [unclosed"))

    @pytest.mark.parametrize(
        "edit",
        [
            lambda text: text + "\nunknown_key = 1\n",
            lambda text: text.replace('["solve"]', '["solve", "cascade"]'),
            lambda text: text.replace("alpha = 2.0", "alpha = 1.0"),
            lambda text: text.replace("delta = 0.1", "delta = 0.0"),
            lambda text: text.replace("tensor_resolution = 64", ""),
            lambda text: text.replace("half_width = 0.5", "half_width = -0.5"),
            lambda text: text.replace('"solve"]', '"teleport"]'),
            lambda text: text + '\n[family.translates]\noffsets = [[0.0]]\nbase = { kind = "sinc_power" }\n',
        ],
    )
    def test_rejected(self, tmp_path, edit):
        with pytest.raises(ConfigError):
            load_experiment(write_config(tmp_path, edit(MINIMAL)))

    def test_even_periodization_terms(self, tmp_path):
        text = MINIMAL.replace('["solve"]', '["cascade"]') + "\n[multiresolution]\nterms = 256\n"
        with pytest.raises(ConfigError, match="odd"):
            load_experiment(write_config(tmp_path, text))

    def test_overrides(self, tmp_path):
        config = load_experiment(write_config(tmp_path, MINIMAL)).with_overrides(seed=5, output_dir=tmp_path / "o")
        assert config.seed == 5
        assert config.outputs.directory == tmp_path / "o"


class TestBuilders:
    def base(self, **family):
        return ExperimentConfig.model_validate(
            {
                "name": "b",
                "alpha": 2.0,
                "domain": {"shape": "annulus", "r_min": 0.5, "r_max": 2.0},
                "family": family,
                "pipeline": ["solve"],
                "solver": {
                    "delta": 1e-6,
                    "tau_g": 0.15,
                    "tau_sigma": 0.75,
                    "iterations": 2,
                    "schedule": {"min_nodes": 10, "max_nodes": 20},
                },
            }
        )

    def test_domains(self):
        config = self.base(members=[{"kind": "sinc_power", "modulation": [0.0, 0.0]}])
        assert config.domain.build() == Annulus(2, 0.5, 2.0)

    def test_sector_domain(self):
        config = ExperimentConfig.model_validate(
            {
                "name": "s",
                "alpha": 2.0,
                "domain": {"shape": "sector_pair", "axis": [0.0, 1.0], "cos_half_angle": 0.5, "r_max": 1.0},
                "family": {"members": [{"kind": "sinc_power", "modulation": [0.0, 0.0]}]},
                "pipeline": ["cascade"],
                "multiresolution": {},
            }
        )
        assert isinstance(config.domain.build(), SectorPair)

    def test_translates(self):
        config = self.base(translates={"base": {"kind": "sinc_power"}, "offsets": [[0.25]]})
        family = build_family(config.family)
        assert family.n == 2
        assert family.members[1].modulation == (0.25,)

    def test_scalings(self):
        config = self.base(scalings={"base": {"kind": "indicator_box"}, "factor": 2.0, "count": 3})
        assert build_family(config.family).n == 3

    def test_discrete_member(self):
        config = self.base(members=[{"kind": "discrete", "values": [[0.0, 1.0], [1.0, 0.0]]}])
        member = build_family(config.family).members[0]
        assert isinstance(member, DiscreteInterpolant)
        assert member.dx == 0.5

    def test_idx_family_resolves_relative_paths(self, tmp_path):
        rng = np.random.default_rng(0)
        write_idx(tmp_path / "img.idx3-ubyte", rng.integers(0, 256, size=(4, 5, 5), dtype=np.uint8))
        write_idx(tmp_path / "lab.idx1-ubyte", np.array([8, 8, 3, 8], dtype=np.uint8))
        text = MINIMAL.replace(
            '[family]\nmembers = [{ kind = "sinc_power" }]',
            '[family.idx]\nimages = "img.idx3-ubyte"\nlabels = "lab.idx1-ubyte"\ndigit = 8\ncount = 3',
        )
        config = load_experiment(write_config(tmp_path, text))
        family = build_family(config.family)
        assert family.n == 3
        assert family.dimension == 2

    def test_solver_config(self):
        spec = self.base(translates={"base": {"kind": "sinc_power"}, "offsets": [[0.5]]}).solver
        solver = build_solver_config(spec, Annulus(2, 0.5, 2.0), seed=3)
        assert solver.schedule.max_nodes == 20
        assert solver.rule is None
        assert solver.seed == 3

    def test_tensor_rule_is_built(self, tmp_path):
        config = load_experiment(write_config(tmp_path, MINIMAL))
        solver = build_solver_config(config.solver, config.domain.build(), seed=0)
        assert solver.rule.kind is RuleKind.TENSOR
        assert solver.rule.size == 64
