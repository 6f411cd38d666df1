import math
from dataclasses import dataclass
from typing import Tuple

from src.errors import DomainError

# The largest stepsize for which lambda(eta) < 1 is 1.5 (1 - delta)^2 / (mu J1).
# The operational bound sits a hair inside it.
ADMISSIBLE_MARGIN = 1e-9


@dataclass(frozen=True)
class LemmaParams:
    mu: float
    lips: float
    num_agents: int
    window: int
    delta: float
    J1: float
    eta_bar: float
    eta_bar_printed: float
    check_eta: float
    underline_lambda: float
    underline_lambda_forms: Tuple[float, float, float]

    @property
    def kappa(self) -> float:
        return self.lips / self.mu

    @property
    def alpha(self) -> float:
        return 1.0

    @property
    def beta(self) -> float:
        return 2.0 * self.kappa

    @property
    def eta_bar_clamped(self) -> bool:
        return self.eta_bar < self.eta_bar_printed

    def lambda_of(self, eta: float) -> float:
        # Piecewise choice of lambda; continuous at check_eta.
        if eta <= 0 or eta > self.eta_bar * (1.0 + 1e-12):
            raise DomainError(f"eta={eta} lies outside (0, {self.eta_bar}]")
        B = self.window
        if eta <= self.check_eta:
            return (1.0 - eta * self.mu / 1.5) ** (1.0 / (2 * B))
        return (math.sqrt(eta * self.mu * self.J1 / 1.5) + self.delta) ** (1.0 / B)

    def to_dict(self) -> dict:
        return {
            "J1": self.J1,
            "eta_bar": self.eta_bar,
            "eta_bar_printed": self.eta_bar_printed,
            "eta_bar_clamped": self.eta_bar_clamped,
            "check_eta": self.check_eta,
            "alpha": self.alpha,
            "beta": self.beta,
            "underline_lambda": self.underline_lambda,
            "underline_lambda_forms": list(self.underline_lambda_forms),
        }


def underline_lambda_forms(J1: float, delta: float, window: int) -> Tuple[float, float, float]:
    # Three closed forms of the smallest admissible lambda; they agree algebraically.
    r = math.sqrt(J1 * J1 + (1.0 - delta * delta) * J1)
    # r - delta J1 without cancellation
    spread = (1.0 - delta * delta) * J1 * (J1 + 1.0) / (r + delta * J1)
    first = (1.0 - spread * spread / (J1 * (J1 + 1.0) ** 2)) ** (1.0 / (2 * window))
    second = (spread / (J1 + 1.0) + delta) ** (1.0 / window)
    third = ((r + delta) / (J1 + 1.0)) ** (1.0 / window)
    return first, second, third


def lemma_bound_params(mu: float, lips: float, num_agents: int, window: int, delta: float) -> LemmaParams:
    if mu <= 0 or lips < mu:
        raise DomainError(f"Need 0 < mu <= L, got mu={mu}, L={lips}")
    if num_agents < 1 or window < 1:
        raise DomainError(f"Need N >= 1 and B >= 1, got N={num_agents}, B={window}")
    if not (0.0 <= delta < 1.0):
        raise DomainError(f"delta must lie in [0, 1), got {delta}")

    kappa = lips / mu
    J1 = 3.0 * kappa * window**2 * (1.0 + 4.0 * math.sqrt(num_agents) * math.sqrt(kappa))
    printed = 3.0 * (1.0 - delta**2) / (mu * J1)
    admissible = (1.0 - ADMISSIBLE_MARGIN) * 1.5 * (1.0 - delta) ** 2 / (mu * J1)

    r = math.sqrt(J1 * J1 + (1.0 - delta * delta) * J1)
    spread = (1.0 - delta * delta) * J1 * (J1 + 1.0) / (r + delta * J1)
    check_eta = 1.5 * spread**2 / (mu * J1 * (J1 + 1.0) ** 2)

    forms = underline_lambda_forms(J1, delta, window)
    return LemmaParams(
        mu=mu,
        lips=lips,
        num_agents=num_agents,
        window=window,
        delta=delta,
        J1=J1,
        eta_bar=min(printed, admissible),
        eta_bar_printed=printed,
        check_eta=check_eta,
        underline_lambda=forms[2],
        underline_lambda_forms=forms,
    )
