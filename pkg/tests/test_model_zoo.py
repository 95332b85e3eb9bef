import math

import numpy as np
import pytest

from convnets.model_zoo import (BUILTINS, VARIANTS, InitPolicy, Network,
                                builtin, infer_shapes, initialize,
                                model_from_layers, param_shapes,
                                parameter_count)
from convnets.optimizer import TrainSchedule
from convnets.utils.errors import (ConfigError, DimensionError,
                                   ShapeChainError)


def tiny_spec(name="tiny", extra=()):
    return model_from_layers(name, [
        {"kind": "input", "shape": (3, 8, 8)},
        {"kind": "conv", "maps": 2, "kernel": (3, 3)},
        {"kind": "activation", "fn": "relu"},
        {"kind": "maxpool", "region": (2, 2), "stride": 2},
        *extra,
        {"kind": "dense", "units": 4},
        {"kind": "activation", "fn": "relu"},
        {"kind": "dense", "units": 10},
        {"kind": "softmax", "classes": 10},
    ])


def spatial(chain, indices):
    return [chain[i][1] for i in indices]


class TestModelSpec:
    def test_needs_single_final_softmax(self):
        with pytest.raises(ConfigError):
            model_from_layers("x", [{"kind": "input", "shape": (10,)},
                                    {"kind": "dense", "units": 10}])
        with pytest.raises(ConfigError):
            model_from_layers("x", [{"kind": "input", "shape": (10,)},
                                    {"kind": "softmax", "classes": 10},
                                    {"kind": "dense", "units": 10}])

    def test_needs_input_first(self):
        with pytest.raises(ConfigError):
            model_from_layers("x", [{"kind": "dense", "units": 10},
                                    {"kind": "softmax", "classes": 10}])

    @pytest.mark.parametrize("p", [0.0, 1.2])
    def test_dropout_range(self, p):
        with pytest.raises(ConfigError):
            model_from_layers("x", [{"kind": "input", "shape": (10,)},
                                    {"kind": "dropout", "p_retain": p},
                                    {"kind": "softmax", "classes": 10}])

    def test_kernel_larger_than_input(self):
        spec = model_from_layers("x", [
            {"kind": "input", "shape": (1, 5, 5)},
            {"kind": "conv", "maps": 2, "kernel": (8, 8)},
            {"kind": "dense", "units": 10},
            {"kind": "softmax", "classes": 10},
        ])
        with pytest.raises(ShapeChainError) as err:
            infer_shapes(spec)
        assert err.value.layer_index == 1

    def test_softmax_width_must_match(self):
        spec = model_from_layers("x", [{"kind": "input", "shape": (10,)},
                                       {"kind": "dense", "units": 7},
                                       {"kind": "softmax", "classes": 10}])
        with pytest.raises(ShapeChainError) as err:
            infer_shapes(spec)
        assert err.value.layer_index == 2

    def test_input_shape_override(self):
        chain = infer_shapes(tiny_spec(), (3, 10, 10))
        assert chain[1] == (2, 8, 8)
        assert chain[3] == (2, 4, 4)


class TestBuiltins:
    """Named architectures and their shape chains on 3x32x32 input."""

    @pytest.mark.parametrize("name", BUILTINS)
    @pytest.mark.parametrize("variant", VARIANTS)
    def test_every_builtin_chains(self, name, variant):
        spec = builtin(name, variant)
        chain = infer_shapes(spec)
        assert chain[-1] == (10,)
        assert spec.layers[-1].kind == "softmax"

    def test_model1_chain(self):
        spec = builtin("model1")
        chain = infer_shapes(spec)
        convs = [i for i, l in enumerate(spec.layers) if l.kind == "conv"]
        pools = [i for i, l in enumerate(spec.layers) if l.kind == "maxpool"]
        assert spatial(chain, convs) == [28, 10, 1]
        assert spatial(chain, pools) == [14, 5]
        assert param_shapes(spec)[0] == ((64, 3, 5, 5), (64,))
        assert param_shapes(spec)[3] == ((160, 1000), (1000,))

    def test_model1_first_layer_parameters(self):
        w, b = param_shapes(builtin("model1"))[0]
        assert math.prod(w) == 4800
        assert math.prod(b) == 64

    def test_model2_chain(self):
        spec = builtin("model2")
        chain = infer_shapes(spec)
        spatial_layers = [i for i, l in enumerate(spec.layers)
                          if l.kind in ("conv", "maxpool")]
        assert spatial(chain, spatial_layers) == [28, 13, 9, 4, 2, 1]

    def test_model3_and_model4_chains(self):
        for name, expected in (("model3", [28, 27, 23, 11, 7, 3]),
                               ("model4", [25, 24, 20, 19, 17, 15, 13, 12])):
            spec = builtin(name)
            chain = infer_shapes(spec)
            idx = [i for i, l in enumerate(spec.layers)
                   if l.kind in ("conv", "maxpool")]
            assert spatial(chain, idx) == expected

    def test_baseline_layers(self):
        spec = builtin("baseline")
        assert [l.kind for l in spec.layers] == [
            "input", "dense", "activation", "dense", "softmax"]
        assert spec.input_shape == (3072,)
        assert spec.layers[1].units == 1000
        assert spec.layers[2].fn == "sigmoid"

    def test_initial_cnn_is_gray_sigmoid(self):
        spec = builtin("initial_cnn")
        assert spec.input_shape == (1, 32, 32)
        assert {l.fn for l in spec.layers if l.kind == "activation"} == \
            {"sigmoid"}
        assert [l.maps for l in spec.layers if l.kind == "conv"] == [6, 12]

    def test_models_use_relu(self):
        for name in ("model1", "model2", "model3", "model4"):
            fns = {l.fn for l in builtin(name).layers
                   if l.kind == "activation"}
            assert fns == {"relu"}

    def test_dropout_variant_placement(self):
        spec = builtin("model1", "dropout")
        kinds = [l.kind for l in spec.layers]
        assert kinds[1] == "dropout"
        assert spec.layers[1].p_retain == 0.8
        dense = [i for i, k in enumerate(kinds) if k == "dense"]
        # hidden dense -> activation -> dropout 0.5
        assert spec.layers[dense[0] + 2].p_retain == 0.5
        assert spec.name == "model1-dropout"

    def test_maxout_variant_multiplies_pieces(self):
        plain, maxout = builtin("model2"), builtin("model2", "maxout")
        plain_maps = [l.maps for l in plain.layers if l.kind == "conv"]
        maxout_maps = [l.maps for l in maxout.layers if l.kind == "conv"]
        assert maxout_maps == [2 * m for m in plain_maps]
        plain_units = [l.units for l in plain.layers if l.kind == "dense"]
        maxout_units = [l.units for l in maxout.layers if l.kind == "dense"]
        assert maxout_units[:-1] == [5 * u for u in plain_units[:-1]]
        assert maxout_units[-1] == 10
        assert "activation" not in [l.kind for l in maxout.layers]

    def test_scaling(self):
        spec = builtin("model1", map_scale=0.25, max_units=8)
        assert [l.maps for l in spec.layers if l.kind == "conv"] == \
            [16, 24, 40]
        assert [l.units for l in spec.layers if l.kind == "dense"] == [8, 10]

    @pytest.mark.parametrize("kwargs", [
        {"name": "model9"},
        {"name": "model1", "variant": "bagging"},
        {"name": "model1", "activation": "softplus"},
        {"name": "model1", "map_scale": 0.0},
    ])
    def test_invalid_requests(self, kwargs):
        kwargs = dict(kwargs)
        name = kwargs.pop("name")
        with pytest.raises(ConfigError):
            builtin(name, **kwargs)

    def test_parameter_count(self):
        assert parameter_count(builtin("baseline")) == \
            3072 * 1000 + 1000 + 1000 * 10 + 10


class TestInitialize:
    def test_ranges_and_zero_biases(self):
        spec = model_from_layers("wide", [
            {"kind": "input", "shape": (40, 6, 6)},
            {"kind": "conv", "maps": 100, "kernel": (5, 5)},
            {"kind": "dense", "units": 10},
            {"kind": "softmax", "classes": 10},
        ])
        conv, dense = initialize(spec, seed=3)
        assert conv.weights.size == 100000
        assert np.abs(conv.weights).max() <= 0.5
        assert np.abs(dense.weights).max() <= 0.05
        sigma = 0.5 / math.sqrt(3) / math.sqrt(conv.weights.size)
        assert abs(conv.weights.mean()) < 4 * sigma
        assert not conv.biases.any() and not dense.biases.any()

    def test_seeded(self):
        a = initialize(tiny_spec(), seed=5)
        b = initialize(tiny_spec(), seed=5)
        for pa, pb in zip(a, b):
            np.testing.assert_array_equal(pa.weights, pb.weights)

    def test_policy_seed(self):
        from_policy = initialize(tiny_spec(), InitPolicy(seed=9))
        explicit = initialize(tiny_spec(), seed=9)
        overridden = initialize(tiny_spec(), InitPolicy(seed=9), seed=1)
        for pa, pb, pc in zip(from_policy, explicit, overridden):
            np.testing.assert_array_equal(pa.weights, pb.weights)
            assert not np.array_equal(pa.weights, pc.weights)

    def test_layer_range_override(self):
        spec = model_from_layers("x", [
            {"kind": "input", "shape": (20,)},
            {"kind": "dense", "units": 10, "init_range": 1e-3},
            {"kind": "softmax", "classes": 10},
        ])
        (params,) = initialize(spec, InitPolicy(dense_range=10.0))
        assert np.abs(params.weights).max() <= 1e-3


class TestNetwork:
    def network(self, spec=None, seed=0, dropout_seed=0):
        spec = spec or tiny_spec()
        return Network(spec, initialize(spec, seed=seed), dropout_seed)

    def test_probabilities(self, rng):
        probs = self.network().forward(rng.normal(size=(5, 3, 8, 8)))
        assert probs.shape == (5, 10)
        np.testing.assert_allclose(probs.sum(axis=1), 1.0)

    def test_flat_input_is_reshaped(self, rng):
        net = self.network()
        x = rng.normal(size=(2, 3, 8, 8))
        np.testing.assert_array_equal(net.forward(x),
                                      net.forward(x.reshape(2, -1)))

    def test_wrong_input(self):
        with pytest.raises(DimensionError):
            self.network().forward(np.ones((1, 3, 7, 7)))

    def test_param_groups(self):
        spec = builtin("model1", max_maps=2, max_units=4)
        groups = self.network(spec).param_groups(TrainSchedule())
        first, second, dense = groups[0], groups[1], groups[3]
        assert (first.kind, first.lr_scale) == ("conv", 0.05)
        assert first.constraint.cap == 0.9
        assert first.constraint.grouping == "kernel"
        assert second.constraint.cap == pytest.approx(math.sqrt(15) / 4)
        assert (dense.kind, dense.lr_scale) == ("dense", 1.0)
        assert dense.constraint.grouping == "column"

    def test_project_caps_norms(self):
        spec = builtin("model1", max_maps=2, max_units=4)
        net = self.network(spec)
        schedule = TrainSchedule()
        net.project(schedule)
        for group, layer in zip(net.param_groups(schedule),
                                net.parametric_layers):
            norms = group.constraint.group_norms(layer.params.weights)
            assert np.all(norms <= group.constraint.cap + 1e-8)

    def test_set_parameters_shape_check(self):
        net = self.network()
        arrays = net.parameters()
        arrays[0] = np.zeros((1, 1))
        with pytest.raises(DimensionError):
            net.set_parameters(arrays)

    def test_inference_leaves_dropout_streams_alone(self, rng):
        spec = tiny_spec(extra=[{"kind": "dropout", "p_retain": 0.5}])
        net = self.network(spec)
        before = net.rng_states()
        net.predict(rng.normal(size=(4, 3, 8, 8)))
        assert net.rng_states() == before

    def test_dropout_seed_reproducible(self, rng):
        spec = tiny_spec(extra=[{"kind": "dropout", "p_retain": 0.5}])
        x = rng.normal(size=(4, 3, 8, 8))
        a = self.network(spec, dropout_seed=9).forward(x, train=True)
        b = self.network(spec, dropout_seed=9).forward(x, train=True)
        np.testing.assert_array_equal(a, b)

    def test_locate_nonfinite(self, rng):
        net = self.network()
        arrays = net.parameters()
        arrays[2] = np.full_like(arrays[2], np.inf)
        net.set_parameters(arrays)
        assert net.locate_nonfinite(rng.normal(size=(2, 3, 8, 8))) == \
            (4, "dense")
