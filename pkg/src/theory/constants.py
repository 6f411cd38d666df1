"""
Evaluation of the explicit constants behind the DIGing-SGLD error bounds.

All quantities are plain binary64 arithmetic. Near-singular choices (lambda^B close
to delta, or a contraction product at or above one) are reported through the
``warnings`` list of the report instead of being returned as silent infinities.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Tuple

from src.errors import DomainError
from src.theory.init_stats import InitStats

logger = logging.getLogger(__name__)

FEASIBILITY_RTOL = 1e-12
NEAR_SINGULAR_GAP = 1e-8
RATIO_COINCIDENCE_RTOL = 1e-12


@dataclass(frozen=True)
class TheoryInputs:
    mu: float
    lips: float
    num_agents: int
    dim: int
    sigma: float
    delta: float
    window: int
    eta: float
    lambda_param: float
    alpha: float
    beta: float
    init_stats: InitStats

    def __post_init__(self) -> None:
        positive = {"mu": self.mu, "lips": self.lips, "eta": self.eta, "alpha": self.alpha, "beta": self.beta}
        for name, value in positive.items():
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f"{name} must be finite and positive, got {value}")
        if self.lips < self.mu:
            raise DomainError(f"Need mu <= L, got mu={self.mu}, L={self.lips}")
        if self.num_agents < 1 or self.dim < 1 or self.window < 1:
            raise DomainError("num_agents, dim and window must be at least 1")
        if not math.isfinite(self.sigma) or self.sigma < 0:
            raise DomainError(f"sigma must be finite and nonnegative, got {self.sigma}")
        if not (0.0 <= self.delta < 1.0):
            raise DomainError(f"delta must lie in [0, 1), got {self.delta}")
        if len(self.init_stats.x_consensus) != self.window or len(self.init_stats.y_consensus) != self.window:
            raise DomainError(f"init_stats must carry {self.window} consensus norms per sequence")

    @property
    def kappa(self) -> float:
        return self.lips / self.mu


def _geometric_sum(lam: float, window: int) -> float:
    # sum_{i<B} lam^i, finite as lam -> 1
    return math.fsum(lam**i for i in range(window))


def _check_lambda(lam: float, delta: float, window: int) -> None:
    if not (0.0 < lam < 1.0):
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")
    if lam**window <= delta:
        raise DomainError(f"lambda={lam} must exceed delta^(1/B)={delta ** (1.0 / window)}")


def contraction_gammas(
    lambda_param: float,
    delta: float,
    window: int,
    lips: float,
    mu: float,
    num_agents: int,
    alpha: float,
    beta: float,
    eta: float,
) -> Tuple[float, float, float, float]:
    _check_lambda(lambda_param, delta, window)
    lam = lambda_param
    gap = lam**window - delta
    spread = _geometric_sum(lam, window) / gap
    gamma1 = lam * spread
    gamma2 = lips * (1.0 + 1.0 / lam)
    gamma3 = 1.0 + math.sqrt(num_agents) / lam * math.sqrt(lips * (1.0 + alpha) / (mu * alpha) + beta)
    gamma4 = eta * spread
    return gamma1, gamma2, gamma3, gamma4


def _omegas(inputs: TheoryInputs, lam: float, eta: float) -> Dict[str, float]:
    B, N = inputs.window, inputs.num_agents
    weight = lam**B / (lam**B - inputs.delta)
    stats = inputs.init_stats
    y_sum = math.fsum(lam ** (1 - t) * stats.y_consensus[t - 1] for t in range(1, B + 1))
    x_sum = math.fsum(lam ** (1 - t) * stats.x_consensus[t - 1] for t in range(1, B + 1))
    root = math.sqrt(inputs.lips * (1.0 + inputs.alpha) / (inputs.mu * inputs.alpha) + inputs.beta)
    return {
        "omega1_tilde": weight * y_sum,
        "omega1_hat": weight * 2.0 * B * inputs.sigma * math.sqrt(N),
        "omega3_tilde": 2.0 * math.sqrt(N) * stats.avg_gap_norm,
        "omega3_hat": math.sqrt(N) / lam * root / inputs.mu * (inputs.sigma + math.sqrt(2.0 * inputs.dim / eta)),
        "omega4_tilde": weight * x_sum,
        "omega4_hat": weight * B * math.sqrt(2.0 * eta * N * inputs.dim),
    }


def _d_value(
    inputs: TheoryInputs,
    gammas: Tuple[float, float, float, float],
    omegas: Dict[str, float],
) -> Optional[float]:
    g1, g2, g3, g4 = gammas
    product = g1 * g2 * g3 * g4
    if not (product < 1.0):
        return None
    w1 = omegas["omega1_tilde"] + omegas["omega1_hat"]
    w3 = omegas["omega3_tilde"] + omegas["omega3_hat"]
    w4 = omegas["omega4_tilde"] + omegas["omega4_hat"]
    scale = 1.0 - product
    first = (g1 * g2 * g3 * w4 + g1 * g2 * w3 + w1) / scale
    second = (g3 * g4 * w1 + g3 * w4 + w3) / scale
    N = inputs.num_agents
    return math.sqrt(2.0 * first**2 + 4.0 * inputs.lips**2 / N * second**2 + 4.0 / N * inputs.sigma**2)


def d_constant(inputs: TheoryInputs, lambda_param: float, eta: float) -> Optional[float]:
    """D at an arbitrary (lambda, eta), or None when the contraction product is not below one."""
    gammas = contraction_gammas(
        lambda_param, inputs.delta, inputs.window, inputs.lips, inputs.mu,
        inputs.num_agents, inputs.alpha, inputs.beta, eta,
    )
    return _d_value(inputs, gammas, _omegas(inputs, lambda_param, eta))


def gibbs_second_moment_bound(mu: float, dim: float, num_agents: float) -> float:
    if mu <= 0 or dim <= 0 or num_agents <= 0:
        raise DomainError(f"mu, d and N must be positive, got {mu}, {dim}, {num_agents}")
    return 2.0 * dim / (num_agents * mu)


@dataclass(frozen=True)
class TheoryReport:
    inputs: TheoryInputs
    gammas: Tuple[float, float, float, float]
    omegas: Dict[str, float]
    product: float
    D: Optional[float]
    conditions: Dict[str, bool]
    warnings: List[str] = field(default_factory=list)
    lemma: Optional[object] = None
    dbar: Optional[float] = None
    corollary: Optional[object] = None

    @property
    def feasible(self) -> bool:
        return all(self.conditions.values())

    @property
    def product_condition(self) -> Optional[float]:
        return 1.0 / (1.0 - self.product) if self.product < 1.0 else None

    def with_lemma(self, lemma, dbar: Optional[float] = None) -> "TheoryReport":
        return replace(self, lemma=lemma, dbar=dbar)

    def with_corollary(self, corollary) -> "TheoryReport":
        return replace(self, corollary=corollary)

    def _require_mixing(self) -> Tuple[float, int]:
        delta = self.inputs.delta
        if not (0.0 < delta < 1.0):
            raise DomainError(f"E2 and E3 need delta in (0, 1), got {delta}")
        if self.D is None:
            raise DomainError("D is undefined because the contraction product is not below 1")
        return delta, self.inputs.window

    def e1(self, k: int) -> float:
        p = self.inputs
        decay = (1.0 - p.mu * p.eta) ** k
        start = p.init_stats.avg_gap_norm + math.sqrt(2.0 * p.dim / (p.mu * p.num_agents))
        return decay * start + 1.65 * p.lips / p.mu * math.sqrt(p.eta * p.dim / p.num_agents)

    def e2(self, k: int) -> float:
        delta, B = self._require_mixing()
        p = self.inputs
        eta, L, mu, N, d = p.eta, p.lips, p.mu, p.num_agents, p.dim
        q = 1.0 - eta * L / 2.0
        if q <= 0:
            raise DomainError(f"E2 needs eta < 2/L, got eta={eta}")
        inv_delta2 = delta**-2
        lead = math.sqrt(eta) * math.sqrt(eta / (mu * q) + (1.0 + eta * L) ** 2 / (mu * q) ** 2)
        bracket = (
            3.0 * L**2 * self.D**2 * eta * inv_delta2 / (N * (1.0 - delta ** (1.0 / B)) ** 2)
            + 6.0 * d * L**2 * inv_delta2 / (1.0 - delta ** (2.0 / B))
        )
        noise = math.sqrt(eta) * p.sigma / math.sqrt(mu * q * N)

        rho1 = delta ** (2.0 / B)
        rho2 = 1.0 - eta * mu * q
        if k == 0:
            ratio = 0.0
        elif abs(rho1 - rho2) <= RATIO_COINCIDENCE_RTOL * max(abs(rho1), abs(rho2)):
            # removable singularity
            ratio = k * rho1 ** (k - 1)
        else:
            ratio = (rho1**k - rho2**k) / (rho1 - rho2)
        transient = (
            math.sqrt(max(ratio, 0.0)) * math.sqrt(3.0) * L / (delta * math.sqrt(N))
            * delta ** (1.0 / B) * p.init_stats.x0_norm
        )
        return lead * math.sqrt(bracket) + noise + transient

    def e3_steady(self) -> float:
        delta, B = self._require_mixing()
        p = self.inputs
        return (
            math.sqrt(3.0) * self.D * p.eta / (delta * math.sqrt(p.num_agents) * (1.0 - delta ** (1.0 / B)))
            + math.sqrt(6.0 * p.dim * p.eta) / (delta * math.sqrt(1.0 - delta ** (2.0 / B)))
        )

    def e3(self, k: int) -> float:
        delta, B = self._require_mixing()
        p = self.inputs
        transient = math.sqrt(3.0) / delta * delta ** (k / B) / math.sqrt(p.num_agents) * p.init_stats.x0_norm
        return transient + self.e3_steady()

    def to_dict(self, k_grid: Iterable[int] = ()) -> dict:
        p = self.inputs
        out = {
            "inputs": {
                "mu": p.mu,
                "lips": p.lips,
                "kappa": p.kappa,
                "num_agents": p.num_agents,
                "dim": p.dim,
                "sigma": p.sigma,
                "delta": p.delta,
                "window": p.window,
                "eta": p.eta,
                "lambda": p.lambda_param,
                "alpha": p.alpha,
                "beta": p.beta,
                "init_stats": p.init_stats.to_dict(),
            },
            "gammas": list(self.gammas),
            "omegas": dict(self.omegas),
            "product": self.product,
            "product_condition": self.product_condition,
            "D": self.D,
            "conditions": dict(self.conditions),
            "feasible": self.feasible,
            "warnings": list(self.warnings),
        }
        grid = list(k_grid)
        if grid:
            out["E1"] = {str(k): self.e1(k) for k in grid}
            try:
                out["E2"] = {str(k): self.e2(k) for k in grid}
                out["E3"] = {str(k): self.e3(k) for k in grid}
                out["E3_steady"] = self.e3_steady()
            except DomainError as e:
                out["E2"] = out["E3"] = out["E3_steady"] = None
                out["warnings"].append(str(e))
        if self.lemma is not None:
            out["lemma"] = self.lemma.to_dict()
            out["Dbar"] = self.dbar
        if self.corollary is not None:
            out["corollary"] = self.corollary.to_dict()
        return out


def evaluate_constants(inputs: TheoryInputs) -> TheoryReport:
    lam, eta = inputs.lambda_param, inputs.eta
    gammas = contraction_gammas(
        lam, inputs.delta, inputs.window, inputs.lips, inputs.mu,
        inputs.num_agents, inputs.alpha, inputs.beta, eta,
    )
    omegas = _omegas(inputs, lam, eta)
    product = gammas[0] * gammas[1] * gammas[2] * gammas[3]

    tol = 1.0 + FEASIBILITY_RTOL
    conditions = {
        "lambda_window": math.sqrt(max(0.0, 1.0 - eta * inputs.mu * inputs.beta / (inputs.beta + 1.0))) <= lam * tol
        and lam < 1.0,
        "stepsize": eta <= tol / ((1.0 + inputs.alpha) * inputs.lips),
        "contraction": 0.0 < product < 1.0,
    }

    warnings: List[str] = []
    if lam**inputs.window - inputs.delta < NEAR_SINGULAR_GAP:
        warnings.append(f"lambda^B - delta = {lam ** inputs.window - inputs.delta:.3e} is nearly zero")
    D = _d_value(inputs, gammas, omegas)
    if D is None:
        warnings.append(f"contraction product {product:.6g} is not below 1; D is undefined")
    elif not math.isfinite(D):
        warnings.append("D overflowed")
        D = None
    if not all(math.isfinite(v) for v in (*gammas, *omegas.values())):
        warnings.append("non-finite constant encountered")
    for message in warnings:
        logger.warning(message)

    return TheoryReport(
        inputs=inputs,
        gammas=gammas,
        omegas=omegas,
        product=product,
        D=D,
        conditions=conditions,
        warnings=warnings,
    )
