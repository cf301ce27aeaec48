"""Tests for configuration files, presets and RunConfig assembly."""

import math
from pathlib import Path

import pytest

from fhzip.domain import ChannelConfig, CodecConfig, ConfigError, DatasetConfig, PrecoderConfig, StorageError
from fhzip.repositories import ConfigRepository, FileRepository
from fhzip.services import ConfigService
from fhzip.services.config_service import apply_stage_count


@pytest.fixture
def repo() -> ConfigRepository:
    """Create a config repository over the real file system."""
    return ConfigRepository(FileRepository())


@pytest.fixture
def service(repo) -> ConfigService:
    """Create a config service."""
    return ConfigService(repo)


def write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "run.cfg"
    path.write_text(text)
    return path


class TestConfigRepository:
    """Tests for ConfigRepository parsing."""

    def test_key_values(self, repo, tmp_path):
        """Comments and blank lines are ignored; keys are normalized."""
        path = write(tmp_path, "# comment\n\nTX-Antennas = 8\nusers=2  # trailing\n")

        assert repo.load_key_values(path) == {"tx_antennas": "8", "users": "2"}

    def test_missing_equals(self, repo, tmp_path):
        """Lines need key=value."""
        path = write(tmp_path, "users 2\n")

        with pytest.raises(ConfigError):
            repo.load_key_values(path)

    def test_duplicate_key(self, repo, tmp_path):
        """A key may only be set once."""
        path = write(tmp_path, "users=2\nusers=3\n")

        with pytest.raises(ConfigError) as exc_info:
            repo.load_key_values(path)

        assert exc_info.value.field == "users"

    def test_missing_file(self, repo, tmp_path):
        """Unreadable files are storage errors."""
        with pytest.raises(StorageError):
            repo.load_key_values(tmp_path / "absent.cfg")

    def test_presets_shipped(self, repo):
        """The packaged presets are available."""
        presets = repo.load_presets()

        assert {"desk", "panel-8x16-dual", "paper-outdoor"} <= set(presets)
        assert presets["panel-8x16-dual"]["tx_antennas"] == 256

    def test_yaml_must_be_mapping(self, repo, tmp_path):
        """A YAML list is not a configuration."""
        path = tmp_path / "list.yaml"
        path.write_text("- a\n- b\n")

        with pytest.raises(ConfigError):
            repo.load_yaml(path)

    def test_empty_yaml(self, repo, tmp_path):
        """An empty YAML file is an empty mapping."""
        path = tmp_path / "empty.yaml"
        path.write_text("")

        assert repo.load_yaml(path) == {}


class TestConfigService:
    """Tests for ConfigService.build."""

    def test_default_preset(self, service):
        """With nothing given the desk preset applies."""
        cfg = service.build()

        assert cfg.channel.num_tx_antennas == 16
        assert cfg.channel.num_users == 4
        assert cfg.channel.rms_delay_spread == pytest.approx(800e-9)
        assert cfg.codec.latent_dim == 32
        assert cfg.codec.codebook_sizes == (64, 64, 64, 64)
        assert cfg.dataset.num_samples == 512

    def test_named_preset(self, service):
        """A preset override switches every field it names."""
        cfg = service.build(overrides={"preset": "paper-outdoor"})

        assert cfg.channel.num_tx_antennas == 256
        assert cfg.channel.num_users == 8
        assert cfg.channel.num_rbs == 52
        assert cfg.dataset.num_samples == 2048

    def test_layer_priority(self, service, tmp_path):
        """File values beat the preset and overrides beat the file."""
        path = write(tmp_path, "users = 2\nrbs = 8\nbudget_bits_per_token = 6.5\n")

        cfg = service.build(path, {"rbs": 4, "users": None})

        assert cfg.channel.num_users == 2
        assert cfg.channel.num_rbs == 4
        assert cfg.codec.budget_bits_per_token == 6.5
        assert cfg.codec.budget == 6.5

    def test_file_selects_preset(self, service, tmp_path):
        """A preset named in the file is honoured."""
        path = write(tmp_path, "preset = panel-8x16-dual\n")

        assert service.build(path).channel.num_tx_antennas == 256

    def test_value_conversion(self, service, tmp_path):
        """Lists, booleans and units are converted."""
        path = write(
            tmp_path,
            "codebook_sizes = 16, 8\n"
            "rb_average = yes\n"
            "delay_spread_ns = 300\n"
            "rb_weights = 1,2,1,1,1,1,1,1,1,1,1,1,1,1,1,1\n"
            "stage_policy = RD\n",
        )

        cfg = service.build(path)

        assert cfg.codec.codebook_sizes == (16, 8)
        assert cfg.channel.rb_average is True
        assert cfg.channel.rms_delay_spread == pytest.approx(300e-9)
        assert cfg.precoder.rb_weights[1] == 2.0
        assert cfg.codec.stage_policy == "rd"

    def test_unlimited_budget(self, service):
        """'none' leaves the budget unlimited."""
        cfg = service.build(overrides={"budget_bits_per_token": "none"})

        assert cfg.codec.budget_bits_per_token is None
        assert math.isinf(cfg.codec.budget)

    def test_seed_sets_channel_and_dataset(self, service):
        """The master seed reaches both generators."""
        cfg = service.build(overrides={"seed": 42})

        assert cfg.channel.seed == 42
        assert cfg.dataset.seed == 42

    def test_stage_count(self, service):
        """--stages truncates or extends the size list."""
        assert service.build(overrides={"stages": 2}).codec.codebook_sizes == (64, 64)
        assert service.build(overrides={"stages": 6}).codec.codebook_sizes == (64,) * 6

    def test_out_dir(self, service, tmp_path):
        """out sets the output directory."""
        assert service.build(overrides={"out": tmp_path}).out_dir == tmp_path

    def test_unknown_key(self, service, tmp_path):
        """Unknown keys are rejected by name."""
        path = write(tmp_path, "antennas = 8\n")

        with pytest.raises(ConfigError) as exc_info:
            service.build(path)

        assert exc_info.value.field == "antennas"

    def test_unknown_preset(self, service):
        """Unknown presets are rejected."""
        with pytest.raises(ConfigError) as exc_info:
            service.build(overrides={"preset": "lab"})

        assert exc_info.value.field == "preset"

    def test_unparsable_value(self, service):
        """Non-numeric values for numeric keys are rejected."""
        with pytest.raises(ConfigError) as exc_info:
            service.build(overrides={"users": "many"})

        assert exc_info.value.field == "users"

    def test_validation_runs(self, service):
        """Out-of-range values fail validation naming the field."""
        with pytest.raises(ConfigError) as exc_info:
            service.build(overrides={"users": 0})

        assert exc_info.value.field == "num_users"

    def test_latent_dim_bounded_by_antennas(self, service):
        """d may not exceed 2 Nt."""
        with pytest.raises(ConfigError) as exc_info:
            service.build(overrides={"latent_dim": 33})

        assert exc_info.value.field == "latent_dim"

    def test_preset_names(self, service):
        """Preset names are listed sorted."""
        assert service.preset_names() == sorted(service.preset_names())
        assert "desk" in service.preset_names()


class TestValidation:
    """Tests for per-section validation."""

    def test_apply_stage_count(self):
        """Stage counts below one are invalid."""
        assert apply_stage_count((4, 8), 3) == (4, 8, 8)
        with pytest.raises(ConfigError):
            apply_stage_count((4,), 0)

    @pytest.mark.parametrize(
        "config,field",
        [
            (PrecoderConfig(total_power=0.0), "total_power"),
            (PrecoderConfig(noise_power=-1.0), "noise_power"),
            (PrecoderConfig(max_iters=0), "max_iters"),
            (DatasetConfig(num_samples=1), "num_samples"),
            (DatasetConfig(train_fraction=1.0), "train_fraction"),
            (ChannelConfig(carrier_freq=0.0), "carrier_freq"),
        ],
    )
    def test_field_errors(self, config, field):
        """Each invalid value names its field."""
        with pytest.raises(ConfigError) as exc_info:
            config.validate()

        assert exc_info.value.field == field

    @pytest.mark.parametrize(
        "kwargs,field",
        [
            ({"codebook_sizes": ()}, "codebook_sizes"),
            ({"entropy_order": 2}, "entropy_order"),
            ({"rate_weight": -0.1}, "rate_weight"),
            ({"budget_bits_per_token": -1.0}, "budget_bits_per_token"),
            ({"stage_policy": "greedy"}, "stage_policy"),
        ],
    )
    def test_codec_field_errors(self, kwargs, field):
        """Codec settings are validated against the antenna count."""
        with pytest.raises(ConfigError) as exc_info:
            CodecConfig(**kwargs).validate(num_tx_antennas=16)

        assert exc_info.value.field == field
