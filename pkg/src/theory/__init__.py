from src.theory.constants import (
    TheoryInputs,
    TheoryReport,
    contraction_gammas,
    d_constant,
    evaluate_constants,
    gibbs_second_moment_bound,
)
from src.theory.corollary import CorollarySchedule, bound_d_bar, corollary_schedule
from src.theory.init_stats import InitStats, estimate_init_stats
from src.theory.lemma import LemmaParams, lemma_bound_params

__all__ = [
    "CorollarySchedule",
    "InitStats",
    "LemmaParams",
    "TheoryInputs",
    "TheoryReport",
    "bound_d_bar",
    "contraction_gammas",
    "corollary_schedule",
    "d_constant",
    "estimate_init_stats",
    "gibbs_second_moment_bound",
    "lemma_bound_params",
]
