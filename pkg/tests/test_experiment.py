"""
Tests for experiment loading, overrides and assembly
"""

from pathlib import Path

import pytest

from risdcc.core.errors import ConfigError, ConstraintViolation
from risdcc.core.experiment import (
    apply_overrides,
    build_link,
    build_search_space,
    build_stack,
    build_stopping,
    build_sweep,
    load_experiment,
    parse_override,
    trellis_spec,
)
from risdcc.core.geofile import write_geometry
from risdcc.core.geometry import stack_digest

REPETITION = """
seed = 1
modulation = "BPSK"

[geometry]
preset = "repetition_42"
params = { a = 0.4, h = 0.2, dz = 10.0 }

[code]
type = "block"

[sweep]
start_db = 0.0
stop_db = 4.0
step_db = 2.0
"""


@pytest.fixture
def experiment_file(tmp_path):
    path = tmp_path / "repetition.toml"
    path.write_text(REPETITION)
    return path


@pytest.mark.parametrize("item,expected", [
    ("seed=5", (["seed"], 5)),
    ("geometry.params.dz=12.5", (["geometry", "params", "dz"], 12.5)),
    ("modulation=QPSK", (["modulation"], "QPSK")),
    ('label="my code"', (["label"], "my code")),
    ("sweep.points=[0, 1.5]", (["sweep", "points"], [0, 1.5])),
    ("geometry.allow_near_field=true", (["geometry", "allow_near_field"], True)),
])
def test_parse_override(item, expected):
    assert parse_override(item) == expected


@pytest.mark.parametrize("item", ["seed", "=3", "a..b=1"])
def test_malformed_override(item):
    with pytest.raises(ConfigError):
        parse_override(item)


def test_override_into_scalar_fails():
    with pytest.raises(ConfigError):
        apply_overrides({"seed": 1}, ["seed.x=2"])


def test_load_and_build(experiment_file):
    config = load_experiment(experiment_file)
    assert config.seed == 1
    stack = build_stack(config)
    assert (stack.input_dim, stack.output_dim) == (2, 4)
    assert build_sweep(config) == [0.0, 2.0, 4.0]
    assert build_stopping(config).frames_per_batch == 2000
    link = build_link(config)
    assert link.scheme == "dcc"
    assert link.detector == "ml"


def test_precedence_of_overrides(experiment_file):
    config = load_experiment(experiment_file, ["seed=5", "modulation=QPSK"], seed=9, output="out.csv")
    assert config.seed == 9
    assert config.modulation == "QPSK"
    assert config.output == "out.csv"
    assert load_experiment(experiment_file, ["seed=5"]).seed == 5


def test_missing_key_names_its_path(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[geometry]\nparams = { a = 0.4 }\n")
    with pytest.raises(ConfigError) as excinfo:
        load_experiment(path)
    assert "geometry.preset" in str(excinfo.value)
    assert excinfo.value.exit_code == 2


@pytest.mark.parametrize("overrides", [
    ["code.type=trellis"],
    ["code.type=hamming", "modulation=QPSK"],
    ["label=a,b"],
    ["sweep.step_db=0"],
    ["stopping.max_bits=-1"],
    ["geometry.preset=systematic_42"],
    ["code.typo=1"],
])
def test_invalid_combinations(experiment_file, overrides):
    with pytest.raises(ConfigError):
        load_experiment(experiment_file, overrides)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_experiment(tmp_path / "absent.toml")


def test_malformed_toml(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("seed = \n")
    with pytest.raises(ConfigError):
        load_experiment(path)


def test_preset_constraint_violation(experiment_file):
    config = load_experiment(experiment_file, ["geometry.params.a=0.05"])
    with pytest.raises(ConstraintViolation) as excinfo:
        build_stack(config)
    assert "spacing_below_min" in excinfo.value.report.constraint_ids


def test_geometry_file_preset(tmp_path, experiment_file, repetition_stack):
    geom = tmp_path / "stack.geom"
    write_geometry(repetition_stack, geom)
    config = load_experiment(experiment_file, ["geometry.preset=file", f'geometry.file="{geom}"'])
    assert stack_digest(build_stack(config)) == stack_digest(repetition_stack)


def test_metre_units(experiment_file, wl):
    config = load_experiment(experiment_file, [
        'geometry.units="m"', f"geometry.params={{ a = {0.4 * wl}, h = {0.2 * wl}, dz = {10 * wl} }}",
    ])
    assert build_stack(config).separation_m == pytest.approx(10 * wl)


def test_trellis_stack_from_code_section(experiment_file):
    config = load_experiment(experiment_file, [
        "geometry.preset=evenly_spaced", "geometry.params={ pitch = 0.4, dz = 10.0 }",
        "code.type=trellis", "code.variant=extra_atoms", "code.k=1", "code.n=2", "code.mu=2",
    ])
    stack = build_stack(config)
    assert (stack.input_dim, stack.output_dim) == (3, 2)
    assert trellis_spec(config, stack).layer1_atoms == 3
    link = build_link(config)
    assert link.scheme == "trellis_extra_atoms"


def test_baseline_links(experiment_file):
    config = load_experiment(experiment_file, ["code.type=conv", "code.decoding=soft", "code.message_bits=64"])
    link = build_link(config)
    assert link.scheme == "conv213_soft"
    assert link.info_bits_per_frame == 64


def test_search_space(experiment_file, wl):
    config = load_experiment(experiment_file, ["optimizer.z_max=20.0", 'optimizer.free=["separation", "layer2.x"]'])
    space = build_search_space(config)
    assert space.dim == 5
    assert space.upper[0] == pytest.approx(20 * wl)


def test_search_space_needs_block_code(experiment_file):
    config = load_experiment(experiment_file, ["code.type=concatenated"])
    with pytest.raises(ConfigError):
        build_search_space(config)


EXPERIMENTS = sorted((Path(__file__).parents[1] / "experiments").glob("*.toml"))


@pytest.mark.parametrize("path", EXPERIMENTS, ids=lambda p: p.stem)
def test_sample_experiments_build(path):
    config = load_experiment(path)
    link = build_link(config)
    assert build_sweep(config)[0] == 0.0
    assert link.info_bits_per_frame > 0


@pytest.mark.parametrize("name,states,modulation", [("trellis_213_bpsk", 8, "BPSK"), ("trellis_213_qpsk", 64, "QPSK")])
def test_213_trellis_experiments(name, states, modulation):
    config = load_experiment(Path(__file__).parents[1] / "experiments" / f"{name}.toml")
    link = build_link(config)
    assert (link.spec.k, link.spec.n, link.spec.mu) == (1, 2, 3)
    assert link.spec.state_count == states
    assert link.modulation == modulation
    assert build_stack(config).input_dim == 4
