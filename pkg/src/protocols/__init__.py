"""
End-to-end secure computations

PROTOCOLS maps a descriptor name to the callable that runs it on a SimNet.
"""

from .algebra import (exponentiate, invert, masked_inverse, newton_inverse_rounds,
                      power_of_shares, solve_linear)
from .chain import chain_multiply
from .conversion import convert_shares, to_elementwise, transpose_shares
from .expression import eval_matrix_polynomial, parse_expression
from .pipeline import optimal_cost_pipeline
from .sdmm import sdmm2, sdmm2_own_data, usersecure_round
from .straggler import StragglerConfig, straggler_sdmm


PROTOCOLS = {
    'sdmm2': sdmm2,
    'sdmm2_own_data': sdmm2_own_data,
    'straggler_sdmm': straggler_sdmm,
    'chain_multiply': chain_multiply,
    'exponentiate': exponentiate,
    'invert': invert,
    'solve_linear': solve_linear,
    'newton_inverse_rounds': newton_inverse_rounds,
    'eval_matrix_polynomial': eval_matrix_polynomial,
    'optimal_cost_pipeline': optimal_cost_pipeline,
}
