import math

import numpy as np
import pytest
from pydantic import ValidationError

from conftest import make_window
from gaze_expertise.core.errors import ConfigurationError, ContractError, NumericError, ParseError
from gaze_expertise.core.schemas import Label
from gaze_expertise.features.normalize import FeatureStats
from gaze_expertise.models.checkpoint import load_checkpoint, save_checkpoint
from gaze_expertise.models.gradcheck import check_layer_gradients, check_loss_gradient, check_model_gradients
from gaze_expertise.models.layers import Conv1d, Dense, GlobalAvgPool1d, ReLU, ResidualBlock, softmax
from gaze_expertise.models.multistream import (
    Model,
    ModelConfig,
    forward,
    init_model,
    loss_and_gradients,
    predict_expertise,
    predict_scores,
)

GRAD_TOLERANCE = 1e-5


def _batch(config: ModelConfig, n: int = 4, seed: int = 0):
    rng = np.random.default_rng(seed)
    gaze = rng.uniform(0.0, 1.0, size=(n, 2, config.input_length))
    scalars = rng.normal(size=(n, 3))
    labels = np.array([i % 2 for i in range(n)])
    return gaze, scalars, labels


def _layer_params(layer, seed: int = 0):
    rng = np.random.default_rng(seed)
    params = {}
    for name, spec in layer.parameters().items():
        params[name] = rng.normal(0.0, 1.0 / math.sqrt(spec.fan_in), spec.shape)
    return params


class TestConfig:
    def test_default_parameter_count(self):
        model = init_model(ModelConfig())
        # cnn 93744, scalar streams 3 x 304, fusion 112*64+64 and 64*2+2
        assert model.parameter_count() == 93744 + 912 + 7232 + 130
        assert ModelConfig().embedding_size == 112

    @pytest.mark.parametrize(
        "kwargs",
        [{"kernel_size": 4}, {"block_channels": [16, 0]}, {"stem_channels": 8}, {"block_channels": []}],
    )
    def test_invalid_config(self, kwargs):
        with pytest.raises(ValidationError):
            ModelConfig(**kwargs)

    def test_same_seed_same_parameters(self, tiny_config):
        a, b = init_model(tiny_config), init_model(tiny_config)
        assert all(np.array_equal(a.params[k], b.params[k]) for k in a.params)

    def test_different_seed(self, tiny_config):
        a = init_model(tiny_config)
        b = init_model(tiny_config.model_copy(update={"seed": 1}))
        assert any(not np.array_equal(a.params[k], b.params[k]) for k in a.params)

    def test_biases_start_at_zero(self, tiny_config):
        model = init_model(tiny_config)
        assert all(not v.any() for k, v in model.params.items() if k.endswith(".bias"))

    def test_mismatched_parameters_rejected(self, tiny_config):
        params = dict(init_model(tiny_config).params)
        params["fusion.out.weight"] = np.zeros((3, 3))
        with pytest.raises(ConfigurationError, match="fusion.out.weight"):
            Model(tiny_config, params)
        del params["fusion.out.weight"]
        with pytest.raises(ConfigurationError, match="missing"):
            Model(tiny_config, params)


class TestForward:
    def test_scores_are_distributions(self, tiny_config):
        model = init_model(tiny_config)
        gaze, scalars, _ = _batch(tiny_config, n=6)
        scores = forward(model, (gaze, scalars))
        assert scores.shape == (6, 2)
        assert np.all(scores >= 0.0)
        np.testing.assert_allclose(scores.sum(axis=1), 1.0, atol=1e-9)

    def test_zero_head_gives_even_odds(self, tiny_config):
        model = init_model(tiny_config.model_copy(update={"zero_init_head": True}))
        gaze, scalars, _ = _batch(tiny_config)
        assert np.all(forward(model, (gaze, scalars)) == 0.5)

    def test_duplicated_rows_identical(self, tiny_config):
        model = init_model(tiny_config)
        gaze, scalars, _ = _batch(tiny_config, n=1)
        scores = forward(model, (np.repeat(gaze, 3, axis=0), np.repeat(scalars, 3, axis=0)))
        assert np.array_equal(scores[0], scores[1]) and np.array_equal(scores[1], scores[2])

    def test_window_features_input(self, tiny_config):
        model = init_model(tiny_config)
        gaze, scalars, _ = _batch(tiny_config, n=3)
        windows = [
            make_window(f"P{i}", Label.EXPERT, gaze[i], afd=scalars[i, 0], fc=scalars[i, 1], aed=scalars[i, 2], index=i)
            for i in range(3)
        ]
        np.testing.assert_allclose(predict_scores(model, windows, chunk_size=2), forward(model, (gaze, scalars))[:, 1])
        assert 0.0 <= predict_expertise(model, windows[0]) <= 1.0

    def test_float32_default(self):
        config = ModelConfig(input_length=32, stem_channels=4, block_channels=[4], scalar_widths=[4], fusion_hidden=4)
        model = init_model(config)
        assert model.params["cnn.stem.weight"].dtype == np.float32
        gaze, scalars, _ = _batch(config)
        np.testing.assert_allclose(forward(model, (gaze, scalars)).sum(axis=1), 1.0, atol=1e-9)

    def test_shape_mismatch(self, tiny_config):
        model = init_model(tiny_config)
        gaze, scalars, _ = _batch(tiny_config)
        with pytest.raises(ContractError):
            forward(model, (gaze[:, :, :-1], scalars))
        with pytest.raises(ContractError):
            forward(model, (gaze, scalars[:, :2]))

    def test_skip_connection_is_wired(self, tiny_config):
        with_skip = init_model(tiny_config)
        without = init_model(tiny_config.model_copy(update={"residual_skip": False}))
        gaze, scalars, _ = _batch(tiny_config)
        assert not np.allclose(forward(with_skip, (gaze, scalars)), forward(without, (gaze, scalars)))

    def test_expert_score_monotone_in_expert_logit(self):
        logits = np.array([[0.3, x] for x in np.linspace(-3, 3, 13)])
        scores = softmax(logits)[:, 1]
        assert np.all(np.diff(scores) > 0)


class TestLoss:
    def test_symmetric_model_loss_is_ln2(self, tiny_config):
        model = init_model(tiny_config.model_copy(update={"zero_init_head": True}))
        gaze, scalars, labels = _batch(tiny_config, n=8)
        loss, grads = loss_and_gradients(model, (gaze, scalars), labels)
        assert loss == pytest.approx(math.log(2.0), abs=1e-6)
        assert set(grads) == set(model.params)

    def test_confident_correct_predictions(self, tiny_config):
        model = init_model(tiny_config)
        gaze, scalars, labels = _batch(tiny_config)
        params = dict(model.params)
        params["fusion.out.weight"] = np.zeros_like(params["fusion.out.weight"])
        params["fusion.out.bias"] = np.array([0.0, 50.0])
        loss, _ = loss_and_gradients(model, (gaze, scalars), np.ones(4, dtype=int), params=params)
        assert loss < 1e-12

    def test_labels_accept_enum_values(self, tiny_config):
        model = init_model(tiny_config)
        gaze, scalars, labels = _batch(tiny_config)
        named = [Label.EXPERT if y else Label.NON_EXPERT for y in labels]
        by_name, _ = loss_and_gradients(model, (gaze, scalars), named)
        by_index, _ = loss_and_gradients(model, (gaze, scalars), labels)
        assert by_name == by_index

    def test_non_finite_loss_names_batch(self, tiny_config):
        model = init_model(tiny_config)
        gaze, scalars, labels = _batch(tiny_config)
        gaze[0, 0, 3] = np.nan
        with pytest.raises(NumericError) as info:
            loss_and_gradients(model, (gaze, scalars), labels, batch_index=7)
        assert info.value.batch_index == 7

    def test_label_count_mismatch(self, tiny_config):
        model = init_model(tiny_config)
        gaze, scalars, labels = _batch(tiny_config)
        with pytest.raises(ContractError):
            loss_and_gradients(model, (gaze, scalars), labels[:3])


class TestGradients:
    @pytest.mark.parametrize(
        "layer, shape",
        [
            (Conv1d("conv", 2, 3, 3, stride=1, padding=1), (4, 2, 11)),
            (Conv1d("conv", 3, 2, 7, stride=2, padding=3), (4, 3, 15)),
            (Conv1d("conv", 2, 2, 5, stride=3, padding=0), (2, 2, 17)),
            (Dense("dense", 5, 3), (4, 5)),
            (ReLU("relu"), (4, 3, 6)),
            (GlobalAvgPool1d("pool"), (4, 3, 9)),
            (ResidualBlock("block", 3, 3, skip=True), (4, 3, 10)),
            (ResidualBlock("block", 3, 3, skip=False), (4, 3, 10)),
        ],
        ids=["conv", "conv-stride2", "conv-stride3", "dense", "relu", "pool", "residual", "residual-noskip"],
    )
    def test_layer(self, layer, shape):
        x = np.random.default_rng(9).normal(size=shape)
        result = check_layer_gradients(layer, _layer_params(layer), x)
        assert result.max_error < GRAD_TOLERANCE
        assert result.checked["input"] > 0

    def test_softmax_cross_entropy(self):
        logits = np.random.default_rng(3).normal(size=(4, 2)) * 3.0
        assert check_loss_gradient(logits, np.array([0, 1, 1, 0])) < GRAD_TOLERANCE

    def test_full_model(self, tiny_config):
        model = init_model(tiny_config)
        gaze, scalars, labels = _batch(tiny_config, n=4, seed=1)
        result = check_model_gradients(model, gaze, scalars, labels)
        assert set(result.relative_error) == set(model.params)
        assert result.max_error < GRAD_TOLERANCE
        assert result.skipped_fraction < 0.05


class TestCheckpoint:
    def test_round_trip(self, tmp_path, tiny_config):
        model = init_model(tiny_config)
        stats = FeatureStats(
            mean={"afd_ms": 250.0, "fc": 9.0, "aed": 0.1},
            std={"afd_ms": 40.0, "fc": 2.0, "aed": 0.02},
        )
        path = save_checkpoint(model, tmp_path / "model_5s.npz", window_size=5.0, nominal_rate=3.2, stats=stats)
        ckpt = load_checkpoint(path)
        assert ckpt.model.config == tiny_config
        assert ckpt.stats == stats
        assert ckpt.window_size == 5.0
        assert all(np.array_equal(ckpt.model.params[k], model.params[k]) for k in model.params)
        gaze, scalars, _ = _batch(tiny_config)
        np.testing.assert_array_equal(forward(ckpt.model, (gaze, scalars)), forward(model, (gaze, scalars)))

    def test_not_a_checkpoint(self, tmp_path):
        path = tmp_path / "model.npz"
        np.savez(path, weights=np.zeros(3))
        with pytest.raises(ParseError) as info:
            load_checkpoint(path)
        assert info.value.to_dict()["error"] == "parse_error"

    def test_future_version(self, tmp_path, tiny_config, monkeypatch):
        import gaze_expertise.models.checkpoint as checkpoint

        monkeypatch.setattr(checkpoint, "CHECKPOINT_VERSION", 99)
        path = save_checkpoint(init_model(tiny_config), tmp_path / "model.npz", window_size=5.0, nominal_rate=3.2)
        monkeypatch.setattr(checkpoint, "CHECKPOINT_VERSION", 1)
        with pytest.raises(ConfigurationError, match="version 99"):
            load_checkpoint(path)
