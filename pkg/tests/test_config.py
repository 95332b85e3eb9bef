import os

import pytest

from convnets.config import load_run_config, parse_run_config
from convnets.model_zoo import infer_shapes
from convnets.utils.errors import ConfigError, ShapeChainError

EXAMPLE = """
# desk-scale model1 run
train_paths = data/data_batch_1.bin, data/data_batch_2.bin
pipeline = gcn-zca
model = model1
variant = dropout
map_scale = 0.25
max_units = none
base_lr = 0.05
batch_size = 50
max_norm = none
seed = 7
"""


class TestParse:
    """Flat ``key = value`` run files."""

    def test_defaults(self):
        config = parse_run_config("")
        assert config.pipeline == "gcn-zca"
        assert config.model == "model1"
        assert config.schedule.base_lr == 0.17
        assert config.prepared_path == os.path.join("runs", "prepared")
        assert config.wall_clock is False

    def test_example(self):
        config = parse_run_config(EXAMPLE)
        assert config.train_paths == ["data/data_batch_1.bin",
                                      "data/data_batch_2.bin"]
        assert config.variant == "dropout"
        assert config.map_scale == 0.25
        assert config.max_units is None
        assert config.seed == 7
        assert config.schedule.base_lr == 0.05
        assert config.schedule.batch_size == 50
        assert config.schedule.max_norm is None
        assert config.schedule.momentum_end == 0.6

    def test_unknown_key_names_line(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_run_config("seed = 1\nlearning_rate = 0.1\n")

    def test_missing_equals(self):
        with pytest.raises(ConfigError):
            parse_run_config("model1\n")

    def test_invalid_value(self):
        with pytest.raises(ConfigError):
            parse_run_config("train_fraction = 1.5")

    def test_unknown_pipeline(self):
        with pytest.raises(ConfigError, match="valid names"):
            parse_run_config("pipeline = whiten")

    def test_preset_then_file_values(self):
        config = parse_run_config("schedule_preset = baseline\n"
                                  "base_lr = 0.2\n")
        assert config.schedule.momentum_kind == "classical"
        assert config.schedule.max_epochs == 30
        assert config.schedule.base_lr == 0.2

    def test_overrides_win(self):
        config = parse_run_config("seed = 1\nout_dir = a\n",
                                  {"seed": 5, "out_dir": None,
                                   "max_epochs": 3})
        assert config.seed == 5
        assert config.out_dir == "a"
        assert config.schedule.max_epochs == 3

    def test_gray_image_shape(self):
        config = parse_run_config("pipeline = gray-gcn\nmodel = initial_cnn")
        assert config.image_shape() == (1, 32, 32)
        assert config.model_spec().input_shape == (1, 32, 32)


class TestInlineModel:
    def test_layers(self):
        config = parse_run_config("""
            layer = input shape=3,32,32
            layer = conv maps=8 kernel=5
            layer = activation fn=relu
            layer = maxpool region=2 stride=2
            layer = dropout p_retain=0.5
            layer = dense units=10 max_norm=2.0
            layer = softmax classes=10
        """)
        spec = config.model_spec()
        assert spec.name == "inline"
        assert spec.layers[1].kernel == (5, 5)
        assert spec.layers[3].region == (2, 2)
        assert spec.layers[5].max_norm == 2.0
        assert infer_shapes(spec)[3] == (8, 14, 14)

    def test_flat_input(self):
        config = parse_run_config("layer = input shape=12\n"
                                  "layer = dense units=10\n"
                                  "layer = softmax\n")
        assert config.model_spec().input_shape == (12,)

    def test_bad_chain(self):
        config = parse_run_config("layer = input shape=1,4,4\n"
                                  "layer = conv maps=2 kernel=5\n"
                                  "layer = dense units=10\n"
                                  "layer = softmax\n")
        with pytest.raises(ShapeChainError):
            config.model_spec()

    def test_bad_pair(self):
        with pytest.raises(ConfigError):
            parse_run_config("layer = conv maps 8")


class TestHash:
    def test_outputs_do_not_change_hash(self):
        a = parse_run_config("out_dir = a\nmax_epochs = 3\n")
        b = parse_run_config("out_dir = b\nmax_epochs = 9\n"
                             "wall_clock = true\n")
        assert a.resolved_hash() == b.resolved_hash()

    def test_seed_changes_hash(self):
        assert parse_run_config("seed = 1").resolved_hash() != \
            parse_run_config("seed = 2").resolved_hash()

    def test_metadata(self):
        meta = parse_run_config("seed = 4").metadata()
        assert meta["seed"] == 4
        assert meta["config"]["schedule"]["base_lr"] == 0.17
        assert len(meta["config_hash"]) == 64


class TestLoad:
    def test_file(self, tmp_path):
        path = os.path.join(str(tmp_path), "run.cfg")
        with open(path, "w") as f:
            f.write(EXAMPLE)
        assert load_run_config(path).seed == 7

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_run_config(os.path.join(str(tmp_path), "none.cfg"))

    def test_no_file(self):
        assert load_run_config(None, {"seed": 3}).seed == 3
