import os

import numpy as np
import pytest

from convnets.preprocess import (Dictionary, PipelineSpec, PreprocStats,
                                 apply_pipeline, apply_zca, encode,
                                 extract_patches, fit_pipeline, fit_zca, gcn,
                                 grayscale, learn_dictionary, pipeline_hash,
                                 rescale_center)
from convnets.preprocess.transforms import fit_center
from convnets.utils.errors import ConfigError, DataError, DimensionError


class TestTransforms:
    def test_gcn_rows(self, rng):
        x = rng.uniform(0, 255, size=(5, 48))
        out = gcn(x)
        np.testing.assert_allclose(out.mean(axis=1), 0.0, atol=1e-12)
        rms = np.sqrt(np.mean(out ** 2, axis=1))
        np.testing.assert_allclose(rms, 1.0, rtol=1e-10)

    def test_gcn_ignores_row_contrast_and_brightness(self, rng):
        x = rng.uniform(0, 255, size=(6, 48))
        a = rng.uniform(0.1, 10.0, size=(6, 1))
        b = rng.uniform(-100.0, 100.0, size=(6, 1))
        np.testing.assert_allclose(gcn(a * x + b), gcn(x), rtol=0,
                                   atol=1e-10)

    def test_gcn_constant_row_is_zero(self):
        out = gcn(np.full((1, 10), 7.0))
        np.testing.assert_array_equal(out, np.zeros((1, 10)))

    def test_gcn_needs_flat_rows(self):
        with pytest.raises(DimensionError):
            gcn(np.ones((2, 3, 4)))

    def test_rescale_center(self, rng):
        x = rng.uniform(0, 255, size=(20, 12))
        mean = fit_center(x)
        out = rescale_center(x, mean)
        np.testing.assert_allclose(out.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(out, x / 255.0 - mean)

    def test_grayscale_weights(self):
        x = np.zeros((1, 3, 2, 2))
        x[0, 0] = 100.0
        x[0, 1] = 200.0
        x[0, 2] = 50.0
        out = grayscale(x)
        assert out.shape == (1, 1, 2, 2)
        np.testing.assert_allclose(out, 0.299 * 100 + 0.587 * 200
                                   + 0.114 * 50)


class TestZca:
    """Whitening fitted on training rows only."""

    def test_whitened_covariance_is_identity(self, rng):
        mixing = rng.normal(size=(6, 6))
        x = rng.normal(size=(2000, 6)) @ mixing
        stats = fit_zca(x, fudge=0.0)
        white = apply_zca(stats, x)
        cov = white.T @ white / x.shape[0]
        np.testing.assert_allclose(cov, np.eye(6), atol=1e-6)

    def test_fudge_shrinks_eigenvalues(self, rng):
        x = rng.normal(size=(200, 16)) @ rng.normal(size=(16, 16))
        centered = x - x.mean(axis=0)
        lam = np.linalg.eigvalsh(centered.T @ centered / 200)
        stats = fit_zca(x, fudge=0.01)
        white = apply_zca(stats, x)
        got = np.linalg.eigvalsh(white.T @ white / 200)
        np.testing.assert_allclose(got, lam / (lam + 0.01), atol=1e-8)

    def test_matrix_symmetric(self, rng):
        stats = fit_zca(rng.normal(size=(50, 8)))
        np.testing.assert_allclose(stats.zca, stats.zca.T, atol=0)

    def test_fudge_keeps_singular_finite(self):
        x = np.tile(np.array([[1.0, 2.0, 3.0]]), (10, 1))
        x[::2, 0] += 1.0
        stats = fit_zca(x, fudge=0.01)
        assert np.all(np.isfinite(apply_zca(stats, x)))

    def test_one_sample(self):
        with pytest.raises(DataError):
            fit_zca(np.ones((1, 4)))

    def test_dimension_mismatch(self, rng):
        stats = fit_zca(rng.normal(size=(10, 4)))
        with pytest.raises(DimensionError):
            apply_zca(stats, np.ones((3, 5)))

    def test_stats_file(self, tmp_path, rng):
        stats = fit_zca(rng.normal(size=(10, 4)))
        stats.pipeline = "gcn-zca"
        path = os.path.join(str(tmp_path), "stats.bin")
        stats.save(path)
        loaded = PreprocStats.load(path)
        np.testing.assert_array_equal(loaded.zca, stats.zca)
        np.testing.assert_array_equal(loaded.mean, stats.mean)
        assert loaded.fingerprint() == stats.fingerprint()


class TestPipelines:
    def test_names(self):
        spec = PipelineSpec.from_name("gray-gcn-zca", "after")
        assert spec.gray and spec.base == "gcn-zca"
        assert spec.name == "gray-gcn-zca"
        assert spec.label == "gray-gcn-zca+rescale-after"
        assert PipelineSpec.from_name("raw", "after").label == "raw"

    def test_unknown(self):
        with pytest.raises(ConfigError):
            PipelineSpec.from_name("whiten")

    def test_raw_is_identity(self, small_dataset):
        spec = PipelineSpec.from_name("raw")
        assert fit_pipeline(spec, small_dataset.images) is None
        np.testing.assert_array_equal(
            apply_pipeline(spec, None, small_dataset.images),
            small_dataset.images)

    def test_gray_shape(self, small_dataset):
        spec = PipelineSpec.from_name("gray-gcn")
        out = apply_pipeline(spec, None, small_dataset.images)
        assert out.shape == (30, 1, 32, 32)

    def test_stats_come_from_training_rows(self, small_dataset):
        spec = PipelineSpec.from_name("rescale-center")
        train = small_dataset.images[:20]
        stats = fit_pipeline(spec, train)
        np.testing.assert_allclose(stats.mean,
                                   (train / 255.0).reshape(20, -1).mean(0))
        other = apply_pipeline(spec, stats, small_dataset.images[20:])
        np.testing.assert_allclose(
            other.reshape(10, -1),
            small_dataset.images[20:].reshape(10, -1) / 255.0 - stats.mean)

    def test_rescale_after_maps_train_to_unit_range(self, small_dataset):
        spec = PipelineSpec.from_name("gcn", "after")
        stats = fit_pipeline(spec, small_dataset.images)
        out = apply_pipeline(spec, stats, small_dataset.images)
        assert out.min() == pytest.approx(0.0, abs=1e-12)
        assert out.max() == pytest.approx(1.0, abs=1e-12)

    def test_rescale_before_matches_scaled_gcn(self, small_dataset):
        before = PipelineSpec.from_name("gcn", "before")
        out = apply_pipeline(before, None, small_dataset.images)
        expected = gcn(small_dataset.flat / 255.0)
        np.testing.assert_allclose(out.reshape(30, -1), expected)

    def test_stateful_needs_stats(self, small_dataset):
        with pytest.raises(DataError):
            apply_pipeline(PipelineSpec.from_name("gcn-zca"), None,
                           small_dataset.images)

    def test_hash_depends_on_stats(self, small_dataset):
        spec = PipelineSpec.from_name("rescale-center")
        a = fit_pipeline(spec, small_dataset.images[:10])
        b = fit_pipeline(spec, small_dataset.images[10:])
        assert pipeline_hash(spec, a) == pipeline_hash(spec, a)
        assert pipeline_hash(spec, a) != pipeline_hash(spec, b)


class TestDictionary:
    """Spherical K-means and the thresholded encoder."""

    def test_columns_unit_norm(self, small_dataset):
        patches = extract_patches(small_dataset.images, 6, 300, seed=0)
        assert patches.shape == (300, 3 * 36)
        d = learn_dictionary(patches, 16, iters=5, seed=0)
        assert d.D.shape == (108, 16)
        np.testing.assert_allclose(d.column_norms(), 1.0, atol=1e-12)

    def test_seeded(self, small_dataset):
        patches = extract_patches(small_dataset.images, 6, 100, seed=2)
        a = learn_dictionary(patches, 8, iters=3, seed=1)
        b = learn_dictionary(patches, 8, iters=3, seed=1)
        np.testing.assert_array_equal(a.D, b.D)

    def test_recovers_separated_directions(self, rng):
        directions = np.eye(4)
        patches = np.repeat(directions, 25, axis=0) * \
            rng.uniform(1.0, 3.0, size=(100, 1))
        d = learn_dictionary(patches, 4, iters=20, seed=0, patch_size=2,
                             channels=1)
        found = sorted(np.argmax(np.abs(d.D), axis=0).tolist())
        assert found == [0, 1, 2, 3]

    def test_encoder_threshold(self):
        d = Dictionary(D=np.eye(3), alpha=0.25, patch_size=1, channels=3)
        codes = encode(d, np.array([1.0, -0.5, 0.1]))
        np.testing.assert_allclose(codes, [0.75, 0.25, 0.0])

    def test_alpha_zero_is_absolute_projection(self, rng):
        d = Dictionary(D=np.eye(3), alpha=0.0, patch_size=1, channels=3)
        x = rng.normal(size=(4, 3))
        np.testing.assert_allclose(encode(d, x), np.abs(x))

    def test_too_few_patches(self):
        with pytest.raises(DataError):
            learn_dictionary(np.ones((3, 4)), 5)

    def test_dictionary_file(self, tmp_path):
        d = Dictionary(D=np.eye(4)[:, :2], alpha=0.5, patch_size=2,
                       channels=1)
        path = os.path.join(str(tmp_path), "d.bin")
        d.save(path)
        loaded = Dictionary.load(path)
        np.testing.assert_array_equal(loaded.D, d.D)
        assert (loaded.alpha, loaded.patch_size, loaded.channels) == \
            (0.5, 2, 1)
