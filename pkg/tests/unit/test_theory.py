import math

import numpy as np
import pytest

from src.errors import DomainError
from src.models import gaussian_toy_model
from src.network import fixed_schedule
from src.samplers import SamplerConfig
from src.theory import (
    InitStats,
    TheoryInputs,
    bound_d_bar,
    contraction_gammas,
    corollary_schedule,
    d_constant,
    estimate_init_stats,
    evaluate_constants,
    gibbs_second_moment_bound,
    lemma_bound_params,
)


def flat_stats(window, value=1.0):
    return InitStats(
        x0_norm=value,
        avg_gap_norm=value,
        x_consensus=(value,) * window,
        y_consensus=(value,) * window,
    )


def make_inputs(eta, lam, mu=0.005, lips=12.0, num_agents=20, window=50, delta=0.5, sigma=0.0, dim=6):
    kappa = lips / mu
    return TheoryInputs(
        mu=mu,
        lips=lips,
        num_agents=num_agents,
        dim=dim,
        sigma=sigma,
        delta=delta,
        window=window,
        eta=eta,
        lambda_param=lam,
        alpha=1.0,
        beta=2.0 * kappa,
        init_stats=flat_stats(window),
    )


class TestLemma:

    #### LEMMA_BOUND_PARAMS() TESTS ####
    # Test that the smallest admissible lambda beats the mixing rate on random settings.
    def test_lambda_above_mixing_rate(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            mu = float(rng.uniform(0.01, 1.0))
            kappa = float(rng.uniform(1.0, 100.0))
            window = int(rng.integers(1, 61))
            delta = float(rng.uniform(0.0, 0.99))
            lemma = lemma_bound_params(mu, kappa * mu, int(rng.integers(1, 51)), window, delta)
            assert delta ** (1.0 / window) < lemma.underline_lambda < 1.0

    # Test the unit case kappa = N = B = 1, delta = 0: J1 = 15 and lambda = sqrt(240)/16.
    def test_unit_case(self):
        lemma = lemma_bound_params(1.0, 1.0, 1, 1, 0.0)
        assert lemma.J1 == 15.0
        assert lemma.underline_lambda == pytest.approx(math.sqrt(240.0) / 16.0, abs=1e-12)
        assert lemma.eta_bar_printed == pytest.approx(0.2)
        assert lemma.eta_bar == pytest.approx(0.1 * (1 - 1e-9))
        assert lemma.eta_bar_clamped

    # Test that the three closed forms of the smallest lambda agree.
    @pytest.mark.parametrize("delta, window", [(0.0, 1), (0.5, 50), (0.95, 10), (0.3, 3)])
    def test_lambda_forms_agree(self, delta, window):
        forms = lemma_bound_params(0.005, 12.0, 20, window, delta).underline_lambda_forms
        assert max(forms) - min(forms) <= 1e-12

    # Test that lambda(eta) is continuous at the branch point and attains its minimum there.
    def test_lambda_of_eta(self):
        lemma = lemma_bound_params(0.005, 12.0, 20, 50, 0.5)
        assert 0.0 < lemma.check_eta < lemma.eta_bar
        at = lemma.lambda_of(lemma.check_eta)
        assert at == pytest.approx(lemma.underline_lambda, abs=1e-12)
        above = lemma.lambda_of(lemma.check_eta * (1 + 1e-9))
        assert above == pytest.approx(at, abs=1e-9)
        for eta in np.linspace(lemma.eta_bar / 50, lemma.eta_bar, 50):
            lam = lemma.lambda_of(eta)
            assert lemma.underline_lambda - 1e-12 <= lam < 1.0

    # Test that stepsizes outside (0, eta_bar] are refused.
    def test_lambda_of_domain(self):
        lemma = lemma_bound_params(1.0, 2.0, 4, 2, 0.3)
        for eta in (0.0, -1.0, 2.0 * lemma.eta_bar):
            with pytest.raises(DomainError, match="outside"):
                lemma.lambda_of(eta)

    # Test the input checks.
    def test_invalid_inputs(self):
        with pytest.raises(DomainError, match="delta"):
            lemma_bound_params(1.0, 1.0, 1, 1, 1.0)
        with pytest.raises(DomainError, match="mu"):
            lemma_bound_params(2.0, 1.0, 1, 1, 0.0)

    # Test the serialized lemma parameters.
    def test_to_dict(self):
        document = lemma_bound_params(1.0, 3.0, 2, 1, 0.0).to_dict()
        assert document["alpha"] == 1.0 and document["beta"] == 6.0
        assert len(document["underline_lambda_forms"]) == 3


class TestConstants:

    #### CONTRACTION_GAMMAS() TESTS ####
    # Test the gammas against a hand evaluation.
    def test_gammas_by_hand(self):
        gammas = contraction_gammas(0.5, 0.0, 1, 1.0, 1.0, 1, 1.0, 2.0, 0.01)
        assert gammas == pytest.approx((1.0, 3.0, 5.0, 0.02), abs=1e-15)

    # Test that lambda must beat the mixing rate.
    def test_lambda_below_delta(self):
        with pytest.raises(DomainError, match="exceed"):
            contraction_gammas(0.5, 0.5, 1, 1.0, 1.0, 1, 1.0, 2.0, 0.01)
        with pytest.raises(DomainError, match=r"\(0, 1\)"):
            contraction_gammas(1.0, 0.0, 1, 1.0, 1.0, 1, 1.0, 2.0, 0.01)

    #### TheoryInputs TESTS ####
    # Test that init statistics must carry one entry per window step.
    def test_inputs_window_mismatch(self):
        with pytest.raises(DomainError, match="consensus norms"):
            TheoryInputs(1.0, 1.0, 1, 1, 0.0, 0.0, 2, 0.1, 0.5, 1.0, 2.0, flat_stats(3))

    # Test that nonpositive stepsizes are refused.
    def test_inputs_bad_eta(self):
        with pytest.raises(DomainError, match="eta"):
            make_inputs(0.0, 0.99)

    #### EVALUATE_CONSTANTS() TESTS ####
    # Test the feasibility sweep over 50 stepsizes up to eta_bar with lambda(eta).
    def test_feasibility_sweep(self):
        lemma = lemma_bound_params(0.005, 12.0, 20, 50, 0.5)
        dbar = bound_d_bar(make_inputs(lemma.eta_bar, lemma.underline_lambda, sigma=3.0), lemma)
        for eta in np.linspace(lemma.eta_bar / 50, lemma.eta_bar, 50):
            lam = lemma.lambda_of(eta)
            report = evaluate_constants(make_inputs(eta, lam, sigma=3.0))
            assert report.feasible, report.conditions
            assert report.D * math.sqrt(eta) <= dbar * (1.0 + 1e-12)

    # Test that an infeasible contraction leaves D undefined with a warning.
    def test_product_above_one(self):
        report = evaluate_constants(make_inputs(0.04, 0.999))
        assert report.D is None
        assert not report.conditions["contraction"]
        assert report.product_condition is None
        assert any("not below 1" in w for w in report.warnings)

    # Test the near-singular warning when lambda^B is close to delta.
    def test_near_singular_warning(self):
        delta = 0.5
        lam = (delta + 1e-10) ** (1.0 / 50)
        report = evaluate_constants(make_inputs(1e-9, lam, delta=delta))
        assert any("nearly zero" in w for w in report.warnings)

    # Test that d_constant agrees with the report at the same point.
    def test_d_constant_matches_report(self):
        lemma = lemma_bound_params(0.005, 12.0, 20, 50, 0.5)
        eta = lemma.eta_bar / 4
        inputs = make_inputs(eta, lemma.lambda_of(eta))
        assert d_constant(inputs, inputs.lambda_param, eta) == evaluate_constants(inputs).D

    #### ERROR TERMS TESTS ####
    # Test the deterministic E1 term: start value at k=0, then geometric decay to the floor.
    def test_e1(self):
        lemma = lemma_bound_params(0.005, 12.0, 20, 50, 0.5)
        eta = lemma.eta_bar
        report = evaluate_constants(make_inputs(eta, lemma.lambda_of(eta)))
        floor = 1.65 * 12.0 / 0.005 * math.sqrt(eta * 6 / 20)
        assert report.e1(0) == pytest.approx(1.0 + math.sqrt(2.0 * 6 / (0.005 * 20)) + floor)
        assert report.e1(0) > report.e1(1000) > floor

    # Test that E2 starts without the transient and E3 settles at its steady value.
    def test_e2_e3(self):
        lemma = lemma_bound_params(0.005, 12.0, 20, 50, 0.5)
        eta = lemma.eta_bar / 2
        report = evaluate_constants(make_inputs(eta, lemma.lambda_of(eta), sigma=1.0))
        assert report.e2(0) < report.e2(5)
        assert report.e3(10**7) == pytest.approx(report.e3_steady(), rel=1e-12)
        assert report.e3(0) > report.e3_steady()

    # Test that the steady consensus term scales like sqrt(eta) at small stepsizes.
    def test_e3_sqrt_eta_scaling(self):
        lemma = lemma_bound_params(0.005, 12.0, 20, 50, 0.5)
        eta = lemma.eta_bar / 100

        def steady(step):
            return evaluate_constants(make_inputs(step, lemma.lambda_of(step))).e3_steady()

        assert 1.9 <= steady(eta) / steady(eta / 4) <= 2.1

    # Test that E2 and E3 need a mixing rate strictly inside (0, 1).
    def test_e2_needs_positive_delta(self):
        report = evaluate_constants(make_inputs(1e-6, 0.999, delta=0.0))
        with pytest.raises(DomainError, match="delta"):
            report.e2(1)
        document = report.to_dict(k_grid=[0, 10])
        assert document["E2"] is None and document["E3"] is None
        assert document["E1"]["10"] > 0.0

    # Test the report document with lemma and corollary attached.
    def test_report_document(self):
        lemma = lemma_bound_params(0.005, 12.0, 20, 50, 0.5)
        eta = lemma.eta_bar / 2
        inputs = make_inputs(eta, lemma.lambda_of(eta))
        report = evaluate_constants(inputs).with_lemma(lemma, 2.0)
        report = report.with_corollary(corollary_schedule(inputs, 1.0, lemma))
        document = report.to_dict(k_grid=[0, 100])
        assert document["Dbar"] == 2.0
        assert document["lemma"]["J1"] == lemma.J1
        assert set(document["corollary"]) >= {"eta_star", "k_star", "Cbar1"}
        assert set(document["E2"]) == {"0", "100"}

    #### GIBBS_SECOND_MOMENT_BOUND() TESTS ####
    # Test the closed form 2d / (N mu).
    def test_gibbs_bound(self):
        assert gibbs_second_moment_bound(0.5, 6, 20) == pytest.approx(1.2)
        with pytest.raises(DomainError):
            gibbs_second_moment_bound(0.0, 6, 20)


class TestCorollary:

    #### CORRECTED STEPSIZE SCHEDULE TESTS ####
    # Test that the schedule respects the lemma bound and the k* formula.
    def test_schedule(self):
        inputs = make_inputs(1e-6, 0.9999, sigma=2.0)
        schedule = corollary_schedule(inputs, 0.5)
        lemma = lemma_bound_params(inputs.mu, inputs.lips, inputs.num_agents, inputs.window, inputs.delta)
        assert schedule.eta_star == min(lemma.eta_bar, schedule.eta_noise)
        expected = math.ceil(3.0 / (inputs.mu * schedule.eta_star) * math.log(3.0 * (schedule.cbar1 + schedule.cbar2) / 0.5))
        assert schedule.k_star == expected
        assert schedule.dbar == pytest.approx(bound_d_bar(inputs, lemma))

    # Test that halving epsilon multiplies the horizon by between 4 and 8.
    def test_halving_epsilon(self):
        inputs = make_inputs(1e-6, 0.9999, sigma=2.0)
        base = corollary_schedule(inputs, 1.0)
        # Keep eta* in the regime where eta_noise = epsilon^2 / (9 Cbar3^2) is binding.
        lemma = lemma_bound_params(inputs.mu, inputs.lips, inputs.num_agents, inputs.window, inputs.delta)
        epsilon = min(
            0.1 * min(3.0 * base.cbar3**2 / base.cbar4, 3.0 * base.cbar3 * math.sqrt(lemma.eta_bar)),
            0.75 * (base.cbar1 + base.cbar2),
        )
        coarse = corollary_schedule(inputs, epsilon)
        fine = corollary_schedule(inputs, epsilon / 2)
        assert coarse.eta_star == pytest.approx(epsilon**2 / (9.0 * base.cbar3**2))
        assert 4.0 <= fine.k_star / coarse.k_star <= 8.0

    # Test that the statement constant never shortens the horizon.
    def test_statement_constant(self):
        inputs = make_inputs(1e-6, 0.9999)
        proof = corollary_schedule(inputs, 0.5)
        statement = corollary_schedule(inputs, 0.5, statement_constant=True)
        assert statement.log_constant == 4.0 and proof.log_constant == 3.0
        assert statement.k_star >= proof.k_star

    # Test that a loose accuracy target needs no iterations.
    def test_loose_epsilon(self):
        assert corollary_schedule(make_inputs(1e-6, 0.9999), 1e12).k_star == 0

    # Test the domain checks.
    def test_domain(self):
        with pytest.raises(DomainError, match="epsilon"):
            corollary_schedule(make_inputs(1e-6, 0.9999), 0.0)
        with pytest.raises(DomainError, match="delta"):
            corollary_schedule(make_inputs(1e-6, 0.9999, delta=0.0), 0.1)


class TestInitStats:

    @pytest.fixture
    def toy_setup(self):
        model = gaussian_toy_model([[1.0], [3.0]], 2)
        schedule = fixed_schedule(np.full((2, 2), 0.5), window=3)
        return schedule, model, SamplerConfig(eta=0.1, iterations=100)

    #### ESTIMATE_INIT_STATS() TESTS ####
    # Test the layout and the x0 second moment of a standard normal start.
    def test_estimate(self, toy_setup):
        stats = estimate_init_stats(*toy_setup, warmup_trials=30, workers=2)
        assert stats.window == 3 and stats.trials == 30
        assert len(stats.x_consensus_se) == 3
        assert stats.x0_norm == pytest.approx(math.sqrt(stats.x0_sq_mean))
        assert 0.5 < stats.x0_sq_mean < 3.5
        assert all(v > 0.0 for v in stats.x_consensus)
        assert stats.to_dict()["trials"] == 30

    # Test that the estimate is reproducible from the base seed.
    def test_reproducible(self, toy_setup):
        a = estimate_init_stats(*toy_setup, base_seed=4)
        b = estimate_init_stats(*toy_setup, base_seed=4)
        assert a == b

    # Test that too few warmup trials are refused.
    def test_too_few_trials(self, toy_setup):
        with pytest.raises(DomainError, match="at least 30"):
            estimate_init_stats(*toy_setup, warmup_trials=10)
