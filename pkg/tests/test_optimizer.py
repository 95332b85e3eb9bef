import math

import numpy as np
import pytest
from pydantic import ValidationError

from convnets.optimizer import (MAX_NORM_DEFAULT, SCHEDULE_PRESETS,
                                NormConstraint, TrainSchedule,
                                baseline_schedule, classical_step,
                                initial_cnn_schedule, lr_at, momentum_at,
                                nag_step, project_maxnorm, zero_velocity)
from convnets.utils.errors import DimensionError


class TestSchedule:
    """Piecewise-linear learning rate and momentum."""

    def test_defaults(self):
        s = TrainSchedule()
        assert s.base_lr == 0.17
        assert s.momentum_kind == "nesterov"
        assert s.conv_grad_scale == 0.05
        assert s.batch_size == 100
        assert s.max_norm == pytest.approx(math.sqrt(15) / 4)
        assert s.first_layer_max_norm == 0.9
        assert s.early_stop_window == 20

    @pytest.mark.parametrize("epoch,expected", [
        (0, 0.17),
        (250, 0.17 - 0.5 * (0.17 - 0.0017)),
        (500, 0.0017),
        (900, 0.0017),
    ])
    def test_learning_rate(self, epoch, expected):
        assert lr_at(TrainSchedule(), epoch) == pytest.approx(expected,
                                                              rel=1e-12)

    @pytest.mark.parametrize("epoch,expected", [
        (0, 0.5),
        (125, 0.55),
        (250, 0.6),
        (1000, 0.6),
    ])
    def test_momentum(self, epoch, expected):
        assert momentum_at(TrainSchedule(), epoch) == pytest.approx(expected)

    def test_monotone(self):
        s = TrainSchedule()
        lrs = [lr_at(s, e) for e in range(0, 600, 7)]
        mus = [momentum_at(s, e) for e in range(0, 600, 7)]
        assert all(b <= a for a, b in zip(lrs, lrs[1:]))
        assert all(b >= a for a, b in zip(mus, mus[1:]))

    def test_negative_epoch(self):
        with pytest.raises(ValueError):
            lr_at(TrainSchedule(), -1)

    def test_decreasing_momentum_rejected(self):
        with pytest.raises(ValidationError):
            TrainSchedule(momentum_start=0.9, momentum_end=0.5)

    def test_presets(self):
        base = baseline_schedule()
        assert (base.base_lr, base.momentum_kind, base.max_epochs) == \
            (0.12, "classical", 30)
        assert momentum_at(base, 17) == 0.9
        assert lr_at(base, 400) == 0.12
        first = initial_cnn_schedule()
        assert (first.base_lr, momentum_at(first, 3)) == (1.0, 0.0)
        assert set(SCHEDULE_PRESETS) == {"default", "baseline", "initial_cnn"}


class TestMomentum:
    def test_nag_trace(self):
        """f(t) = t^2 / 2 from t = 1: lookahead at 1 + 0.5 * (-0.1)."""
        seen = []

        def grad_fn(point):
            seen.append(point[0].copy())
            return [point[0]]

        p1, v1 = nag_step([np.array([1.0])], [np.array([0.0])], grad_fn,
                          lr=0.1, mu=0.5)
        np.testing.assert_allclose(p1[0], [0.9])
        np.testing.assert_allclose(v1[0], [-0.1])
        p2, v2 = nag_step(p1, v1, grad_fn, lr=0.1, mu=0.5)
        np.testing.assert_allclose(seen[1], [0.85])
        np.testing.assert_allclose(v2[0], [0.5 * -0.1 - 0.1 * 0.85])
        np.testing.assert_allclose(p2[0], [0.9 - 0.05 - 0.085])

    def test_classical_uses_current_gradient(self):
        p, v = classical_step([np.array([1.0])], [np.array([-0.1])],
                              [np.array([2.0])], lr=0.1, mu=0.5)
        np.testing.assert_allclose(v[0], [-0.25])
        np.testing.assert_allclose(p[0], [0.75])

    def test_group_scales(self):
        params = [np.ones(2), np.ones(2)]
        p, _ = classical_step(params, zero_velocity(params),
                              [np.ones(2), np.ones(2)], lr=1.0, mu=0.0,
                              scales=[0.05, 1.0])
        np.testing.assert_allclose(p[0], 0.95)
        np.testing.assert_allclose(p[1], 0.0)

    def test_inputs_untouched(self):
        params, velocity = [np.ones(3)], [np.full(3, 0.5)]
        nag_step(params, velocity, lambda pts: [np.ones(3)], 0.1, 0.9)
        np.testing.assert_array_equal(params[0], np.ones(3))
        np.testing.assert_array_equal(velocity[0], np.full(3, 0.5))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            classical_step([np.ones(2)], [np.ones(3)], [np.ones(2)], 0.1, 0.5)
        with pytest.raises(DimensionError):
            classical_step([np.ones(2)], [np.ones(2)], [np.ones(4)], 0.1, 0.5)


class TestMaxNorm:
    """Projection of weight groups onto the norm ball."""

    def test_dense_columns(self):
        w = np.array([[3.0, 0.1], [4.0, 0.2]])
        out = project_maxnorm(w, NormConstraint(cap=1.0, grouping="column"))
        np.testing.assert_allclose(out[:, 0], [0.6, 0.8])
        np.testing.assert_array_equal(out[:, 1], w[:, 1])

    def test_conv_kernels(self, rng):
        w = rng.normal(size=(4, 3, 5, 5))
        w[1] *= 1e-3
        constraint = NormConstraint(cap=MAX_NORM_DEFAULT, grouping="kernel")
        out = project_maxnorm(w, constraint)
        norms = constraint.group_norms(out)
        assert np.all(norms <= MAX_NORM_DEFAULT * (1 + 1e-12))
        np.testing.assert_array_equal(out[1], w[1])
        np.testing.assert_allclose(norms[[0, 2, 3]], MAX_NORM_DEFAULT)

    def test_inside_ball_is_unchanged(self):
        w = np.full((2, 2), 0.1)
        out = project_maxnorm(w, NormConstraint(cap=5.0, grouping="column"))
        np.testing.assert_array_equal(out, w)
        assert out is not w

    def test_idempotent(self, rng):
        constraint = NormConstraint(cap=0.9, grouping="column")
        once = project_maxnorm(rng.normal(size=(6, 4)), constraint)
        np.testing.assert_allclose(project_maxnorm(once, constraint), once,
                                   rtol=1e-15)

    def test_grouping_needs_rank(self):
        with pytest.raises(DimensionError):
            project_maxnorm(np.ones((2, 2)),
                            NormConstraint(cap=1.0, grouping="kernel"))

    def test_positive_cap(self):
        with pytest.raises(ValidationError):
            NormConstraint(cap=0.0, grouping="column")
