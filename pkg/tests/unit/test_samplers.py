import numpy as np
import pytest

from src.data import partition, synth_linear
from src.errors import StateError
from src.models import gaussian_toy_model, linear_regression_model
from src.network import barbell_schedule, fixed_schedule
from src.network.topology import MixingMatrix
from src.samplers import (
    DE_SGLD,
    DIGING,
    SAMPLER_KINDS,
    ULA_REFERENCE,
    NetworkState,
    SamplerConfig,
    TrialStreams,
    de_sgld_step,
    diging_sgld_step,
    run,
    trajectories_frame,
    ula_reference_step,
)
from src.samplers.steps import ula_stepsize_limit
from src.samplers.streams import NoiseFingerprint, first_batch_mismatch

HALF = np.full((2, 2), 0.5)


@pytest.fixture
def toy():
    return gaussian_toy_model([[1.0], [3.0]], 2)


@pytest.fixture
def linear_model():
    dataset, _ = synth_linear(n=40, d=3, lam=0.1, seed=2)
    return linear_regression_model(partition(dataset, 4, seed=0).split(dataset), 0.1, 4)


def quiet(eta=0.1, iterations=1, **kwargs):
    return SamplerConfig(eta=eta, iterations=iterations, noise=False, init="zeros", **kwargs)


class TestDigingStep:

    #### DIGING_SGLD_STEP() TESTS ####
    # Test the two-agent toy step against the hand computation.
    def test_hand_oracle(self, toy):
        state = NetworkState(x=np.zeros((2, 1)), y=np.array([[-1.0], [-3.0]]), prev_grad=np.array([[-1.0], [-3.0]]))
        new = diging_sgld_step(state, MixingMatrix(HALF), toy, quiet())
        assert new.x.ravel() == pytest.approx([0.1, 0.3], abs=1e-14)
        assert new.y.ravel() == pytest.approx([-1.9, -1.7], abs=1e-14)
        assert new.y_bar[0] == pytest.approx(toy.stacked_gradient(new.x).mean(), abs=1e-14)
        assert new.iteration == 1

    # Test the same step through run(), which builds y^(0) from the exact gradient.
    def test_hand_oracle_through_run(self, toy):
        trajectory = run(DIGING, fixed_schedule(HALF), toy, quiet(record_y=True), trial_seed=0)
        assert trajectory.iterations.tolist() == [0, 1]
        assert trajectory.x[1].ravel() == pytest.approx([0.1, 0.3], abs=1e-14)
        assert trajectory.y[0].ravel() == pytest.approx([-1.0, -3.0], abs=1e-14)
        assert trajectory.y[1].ravel() == pytest.approx([-1.9, -1.7], abs=1e-14)

    # Test that one agent with W = I is plain SGLD.
    def test_single_agent_is_sgld(self):
        model = gaussian_toy_model([[2.0]], 1)
        config = SamplerConfig(eta=0.05, iterations=1, init="zeros")
        trajectory = run(DIGING, fixed_schedule(np.eye(1)), model, config, trial_seed=7)
        w = TrialStreams(7).langevin_noise(1, (1, 1))
        expected = 0.0 - 0.05 * (0.0 - 2.0) + np.sqrt(0.1) * w
        np.testing.assert_allclose(trajectory.x[1], expected, rtol=0, atol=1e-14)

    # Test that with one agent DIGing, DE-SGLD and the centralized chain coincide.
    def test_single_agent_samplers_agree(self):
        model = gaussian_toy_model([[1.0, -2.0]], 1)
        config = SamplerConfig(eta=0.1, iterations=50)
        runs = [run(kind, fixed_schedule(np.eye(1)), model, config, trial_seed=3) for kind in SAMPLER_KINDS]
        for other in runs[1:]:
            np.testing.assert_allclose(other.x, runs[0].x, rtol=1e-12, atol=1e-12)

    # Test that the network average follows x_bar <- x_bar - eta y_bar + sqrt(2 eta) w_bar.
    def test_average_iterate_recursion(self, linear_model):
        schedule = barbell_schedule(4, period=3, seed=2)
        config = SamplerConfig(eta=1e-3, iterations=30, record_y=True)
        trajectory = run(DIGING, schedule, linear_model, config, trial_seed=4)
        streams = TrialStreams(4)
        for k in range(config.iterations):
            w_bar = streams.langevin_noise(k + 1, (4, linear_model.dim)).mean(axis=0)
            expected = trajectory.x_bar[k] - config.eta * trajectory.y_bar[k] + np.sqrt(2.0 * config.eta) * w_bar
            np.testing.assert_allclose(trajectory.x_bar[k + 1], expected, rtol=0, atol=1e-10)

    # Test that eta = 0 without noise is pure consensus.
    def test_zero_stepsize_is_consensus(self, linear_model):
        W = barbell_schedule(4, period=1, seed=0).at(0)
        x0 = np.arange(4 * linear_model.dim, dtype=float).reshape(4, -1)
        g0 = linear_model.stacked_gradient(x0)
        state = NetworkState(x=x0, y=g0, prev_grad=g0)
        new = diging_sgld_step(state, W, linear_model, quiet(eta=0.0))
        np.testing.assert_allclose(new.x, W.entries @ x0)

    # Test that a missing tracker is a state error.
    def test_missing_tracker(self, toy):
        with pytest.raises(StateError, match="tracker"):
            diging_sgld_step(NetworkState(x=np.zeros((2, 1))), MixingMatrix(HALF), toy, quiet())

    # Test that mismatched iterates are rejected.
    def test_shape_mismatch(self, toy):
        state = NetworkState(x=np.zeros((3, 1)), y=np.zeros((3, 1)), prev_grad=np.zeros((3, 1)))
        with pytest.raises(StateError, match="shape"):
            diging_sgld_step(state, MixingMatrix(HALF), toy, quiet())

    # Test that noise without random streams is rejected.
    def test_noise_needs_streams(self, toy):
        state = NetworkState(x=np.zeros((2, 1)), y=np.zeros((2, 1)), prev_grad=np.zeros((2, 1)))
        config = SamplerConfig(eta=0.1, iterations=1)
        with pytest.raises(StateError, match="streams"):
            diging_sgld_step(state, MixingMatrix(HALF), toy, config)


class TestDeSgldStep:

    #### DE_SGLD_STEP() TESTS ####
    # Test that the first DE-SGLD step agrees with DIGing on the toy.
    def test_first_step_matches_diging(self, toy):
        new = de_sgld_step(NetworkState(x=np.zeros((2, 1))), MixingMatrix(HALF), toy, quiet())
        assert new.x.ravel() == pytest.approx([0.1, 0.3], abs=1e-14)
        assert new.y is None

    # Test that the two samplers part ways from the second step on.
    def test_second_step_differs(self, toy):
        schedule = fixed_schedule(HALF)
        diging = run(DIGING, schedule, toy, quiet(iterations=2), trial_seed=0)
        de_sgld = run(DE_SGLD, schedule, toy, quiet(iterations=2), trial_seed=0)
        np.testing.assert_array_equal(diging.x[1], de_sgld.x[1])
        assert not np.allclose(diging.x[2], de_sgld.x[2])


class TestUlaReference:

    #### ULA_REFERENCE_STEP() TESTS ####
    # Test that the minimizer is a fixed point without noise.
    def test_fixed_point(self, linear_model):
        x = ula_reference_step(linear_model.minimizer, linear_model, 1e-3)
        np.testing.assert_allclose(x, linear_model.minimizer, atol=1e-10)

    # Test the toy recursion x <- (1 - eta) x + eta * mean(a) + sqrt(2 eta) mean(w).
    def test_toy_recursion(self, toy):
        noise = np.array([[0.4], [-1.0]])
        x = ula_reference_step(np.array([2.0]), toy, 0.2, noise=noise)
        expected = 0.8 * 2.0 + 0.2 * 2.0 + np.sqrt(0.4) * (-0.3)
        assert x[0] == pytest.approx(expected, abs=1e-14)

    # Test that the limit in per-agent constants is 2 / (mu + L).
    def test_stepsize_limit_per_agent(self, toy, linear_model):
        for model in (toy, linear_model):
            assert ula_stepsize_limit(model) == pytest.approx(2.0 / (model.mu + model.lips), rel=1e-12)

    # Test that stepsizes above 2/(mu+L) are rejected with a warning.
    def test_stepsize_limit(self, toy, caplog):
        with pytest.raises(StateError, match="exceeds"):
            ula_reference_step(np.zeros(1), toy, 1.5)
        assert "exceeds the stable limit" in caplog.text


class TestRun:

    #### RUN() TESTS ####
    # Test that all samplers run on the same trial seed consume identical noise.
    def test_paired_noise(self, linear_model):
        schedule = barbell_schedule(4, period=3, seed=0)
        config = SamplerConfig(eta=1e-3, iterations=20)
        prints = {kind: run(kind, schedule, linear_model, config, 5).noise_fingerprint for kind in (DIGING, DE_SGLD, ULA_REFERENCE)}
        assert len(set(prints.values())) == 1
        assert run(DIGING, schedule, linear_model, config, 6).noise_fingerprint != prints[DIGING]

    # Test that samplers sharing a trial seed draw identical minibatch indices per key.
    def test_paired_minibatch_indices(self, linear_model):
        schedule = barbell_schedule(4, period=3, seed=0)
        config = SamplerConfig(eta=1e-3, iterations=20, gradient_mode="minibatch", batch=2)
        diging = run(DIGING, schedule, linear_model, config, 5).batch_fingerprint
        de = run(DE_SGLD, schedule, linear_model, config, 5).batch_fingerprint
        assert sorted(diging) == list(range(1, 21))
        assert sorted(de) == list(range(0, 20))
        assert first_batch_mismatch([diging, de]) is None
        assert diging[7] == de[7]
        other = run(DE_SGLD, schedule, linear_model, config, 6).batch_fingerprint
        assert first_batch_mismatch([diging, other]) == 1

    # Test that exact gradients record no minibatch draws.
    def test_exact_mode_draws_no_indices(self, linear_model):
        schedule = barbell_schedule(4, period=3, seed=0)
        trajectory = run(DIGING, schedule, linear_model, SamplerConfig(eta=1e-3, iterations=5), 5)
        assert trajectory.batch_fingerprint == {}

    # Test that a trial is fully determined by its seed.
    def test_deterministic(self, linear_model):
        schedule = barbell_schedule(4, period=3, seed=0)
        config = SamplerConfig(eta=1e-3, iterations=15, gradient_mode="minibatch", batch=2)
        a = run(DIGING, schedule, linear_model, config, 9)
        b = run(DIGING, schedule, linear_model, config, 9)
        np.testing.assert_array_equal(a.x, b.x)

    # Test the tracking identity: the mean tracker equals the mean gradient.
    def test_tracking_identity(self, linear_model):
        schedule = barbell_schedule(4, period=5, seed=1)
        config = SamplerConfig(eta=1e-3, iterations=200, record_y=True)
        trajectory = run(DIGING, schedule, linear_model, config, 0)
        for x, y_bar in zip(trajectory.x, trajectory.y_bar):
            mean_grad = linear_model.stacked_gradient(x).mean(axis=0)
            assert np.linalg.norm(y_bar - mean_grad) / (1.0 + np.linalg.norm(y_bar)) <= 1e-10

    # Test that snapshots follow the stride and always include the last iteration.
    def test_stride(self, toy):
        trajectory = run(DE_SGLD, fixed_schedule(HALF), toy, quiet(iterations=10, stride=4), 0)
        assert trajectory.iterations.tolist() == [0, 4, 8, 10]
        assert trajectory.x.shape == (4, 2, 1)

    # Test that the centralized chain keeps a single row.
    def test_ula_shape(self, toy):
        trajectory = run(ULA_REFERENCE, fixed_schedule(HALF), toy, SamplerConfig(eta=0.1, iterations=3), 0)
        assert trajectory.x.shape == (4, 1, 1)

    # Test that unknown samplers and mismatched schedules are rejected.
    def test_invalid_inputs(self, toy):
        with pytest.raises(StateError, match="Unknown sampler"):
            run("langevin", fixed_schedule(HALF), toy, quiet(), 0)
        with pytest.raises(StateError, match="agents"):
            run(DIGING, barbell_schedule(4, period=1, seed=0), toy, quiet(), 0)

    # Test that an invalid ULA stepsize surfaces with the iteration it failed at.
    def test_ula_failure_wrapped(self, toy):
        with pytest.raises(StateError, match="iteration 0"):
            run(ULA_REFERENCE, fixed_schedule(HALF), toy, SamplerConfig(eta=1.5, iterations=2), 0)

    #### TRAJECTORIES_FRAME() TESTS ####
    # Test the long-format export.
    def test_trajectories_frame(self, toy):
        trajectories = [run(DIGING, fixed_schedule(HALF), toy, quiet(iterations=2), seed) for seed in (0, 1)]
        frame = trajectories_frame(trajectories)
        assert len(frame) == 2 * 3 * 2
        assert set(frame["trial"]) == {0, 1}


class TestConfigAndStreams:

    #### SAMPLERCONFIG TESTS ####
    # Test the config checks.
    @pytest.mark.parametrize(
        "kwargs, message",
        [
            ({"eta": -0.1}, "nonnegative"),
            ({"gradient_mode": "sag"}, "gradient mode"),
            ({"stride": 0}, "stride"),
            ({"init": "uniform"}, "initialization"),
        ],
    )
    def test_invalid_config(self, kwargs, message):
        params = {"eta": 0.1, "iterations": 1, **kwargs}
        with pytest.raises(StateError, match=message):
            SamplerConfig(**params)

    #### TRIALSTREAMS TESTS ####
    # Test that draws depend only on (seed, purpose, iteration).
    def test_streams_are_keyed(self):
        streams = TrialStreams(3)
        later = streams.langevin_noise(10, 4)
        streams.langevin_noise(1, 100)
        streams.minibatch(10).integers(0, 5, size=20)
        np.testing.assert_array_equal(TrialStreams(3).langevin_noise(10, 4), later)
        assert not np.array_equal(streams.langevin_noise(11, 4), later)
        assert not np.array_equal(TrialStreams(4).langevin_noise(10, 4), later)

    # Test that index draws come from the minibatch key and land in the fingerprint.
    def test_minibatch_indices_recorded(self):
        fingerprint = NoiseFingerprint(3)
        idx = TrialStreams(3, fingerprint).minibatch_indices(4, 5, 10, 2)
        np.testing.assert_array_equal(idx, TrialStreams(3).minibatch(4).integers(0, 10, size=(5, 2)))
        assert list(fingerprint.batches) == [4]
        again = NoiseFingerprint(3)
        TrialStreams(3, again).minibatch_indices(4, 5, 10, 2)
        assert again.batches == fingerprint.batches
        assert first_batch_mismatch([fingerprint.batches]) is None
