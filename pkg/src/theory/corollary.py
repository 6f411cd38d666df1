import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

from src.errors import DomainError
from src.theory.constants import TheoryInputs, d_constant
from src.theory.lemma import LemmaParams, lemma_bound_params

logger = logging.getLogger(__name__)

PROOF_CONSTANT = 3.0
STATEMENT_CONSTANT = 4.0


@dataclass(frozen=True)
class CorollarySchedule:
    epsilon: float
    cbar1: float
    cbar2: float
    cbar3: float
    cbar4: float
    dbar: float
    eta_noise: float
    eta_star: float
    k_star: int
    log_constant: float

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "Cbar1": self.cbar1,
            "Cbar2": self.cbar2,
            "Cbar3": self.cbar3,
            "Cbar4": self.cbar4,
            "Dbar": self.dbar,
            "eta_noise": self.eta_noise,
            "eta_star": self.eta_star,
            "k_star": self.k_star,
            "log_constant": self.log_constant,
        }


def lemma_for(inputs: TheoryInputs) -> LemmaParams:
    return lemma_bound_params(inputs.mu, inputs.lips, inputs.num_agents, inputs.window, inputs.delta)


def bound_d_bar(inputs: TheoryInputs, lemma: Optional[LemmaParams] = None) -> float:
    # D evaluated at (underline lambda, eta bar) with alpha=1, beta=2 kappa, times sqrt(eta bar)
    lemma = lemma or lemma_for(inputs)
    at_bound = replace(
        inputs, eta=lemma.eta_bar, lambda_param=lemma.underline_lambda, alpha=lemma.alpha, beta=lemma.beta
    )
    D = d_constant(at_bound, lemma.underline_lambda, lemma.eta_bar)
    if D is None:
        raise DomainError("Contraction product at the stepsize bound is not below 1")
    return D * math.sqrt(lemma.eta_bar)


def corollary_schedule(
    inputs: TheoryInputs,
    epsilon: float,
    lemma: Optional[LemmaParams] = None,
    statement_constant: bool = False,
) -> CorollarySchedule:
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    delta = inputs.delta
    if not (0.0 < delta < 1.0):
        raise DomainError(f"The stepsize schedule needs delta in (0, 1), got {delta}")
    lemma = lemma or lemma_for(inputs)
    dbar = bound_d_bar(inputs, lemma)

    mu, L, N, d, B = inputs.mu, inputs.lips, inputs.num_agents, inputs.dim, inputs.window
    sigma, stats = inputs.sigma, inputs.init_stats
    d1 = delta ** (1.0 / B)
    d2 = delta ** (2.0 / B)

    cbar1 = stats.avg_gap_norm + math.sqrt(2.0 * d / (mu * N))

    radicand = 1.0 - lemma.eta_bar * mu / 1.5 - d2
    if radicand <= 0:
        raise DomainError(f"Non-positive radicand {radicand:.3e} in the transient constant")
    cbar2 = (
        math.sqrt(3.0) * L / (delta * math.sqrt(N)) * d1 * stats.x0_norm / math.sqrt(radicand)
        + math.sqrt(3.0) / (delta * math.sqrt(N)) * stats.x0_norm
    )

    grad_term = math.sqrt(6.0 * d * L**2 / delta**2 / (1.0 - d2))
    drift_term = math.sqrt(3.0 * L**2 / delta**2 / (N * (1.0 - d1) ** 2))
    cbar3 = (
        1.65 * L / mu * math.sqrt(d / N)
        + math.sqrt(6.0 * d) / (delta * math.sqrt(1.0 - d2))
        + 2.0 * sigma / math.sqrt(3.0 * mu * N)
        + 2.0 / mu * grad_term
        + math.sqrt(3.0) * dbar / (delta * math.sqrt(N) * (1.0 - d1))
        + 2.0 * dbar / mu * drift_term
    )
    cbar4 = 2.0 / math.sqrt(3.0 * mu) * grad_term + 2.0 / math.sqrt(3.0 * mu) * drift_term * dbar

    eta_noise = min(epsilon**2 / (9.0 * cbar3**2), epsilon / (3.0 * cbar4))
    eta_star = min(lemma.eta_bar, eta_noise)
    constant = STATEMENT_CONSTANT if statement_constant else PROOF_CONSTANT
    argument = constant * (cbar1 + cbar2) / epsilon
    k_star = math.ceil(3.0 / (mu * eta_star) * math.log(argument)) if argument > 1.0 else 0

    logger.info("Corollary schedule for epsilon=%g: eta*=%.3e, k*=%d", epsilon, eta_star, k_star)
    return CorollarySchedule(
        epsilon=epsilon,
        cbar1=cbar1,
        cbar2=cbar2,
        cbar3=cbar3,
        cbar4=cbar4,
        dbar=dbar,
        eta_noise=eta_noise,
        eta_star=eta_star,
        k_star=k_star,
        log_constant=constant,
    )
