"""Mittag-Leffler balance indices, cycle censuses and diffusion on signed graphs."""

from .balance import (
    BalanceReport,
    alpha_c,
    balance_profile,
    k_exp,
    k_ml,
    k_ml_gap_approx,
    k_ml_log,
    moment_ledger,
)
from .cycles import cycle_census, cycle_graph, petersen_signings
from .dynamics import altafini_evolve, consensus_time, frac_diffuse
from .errors import EdgeListParseError, GraphValidationError, MLOverflowError
from .graph import SignedGraph, is_balanced, parse_edge_list, read_edge_list, switch
from .spectral import MLParams, ml_matrix, ml_scalar

__version__ = "0.1.0"

__all__ = [
    "BalanceReport",
    "EdgeListParseError",
    "GraphValidationError",
    "MLOverflowError",
    "MLParams",
    "SignedGraph",
    "alpha_c",
    "altafini_evolve",
    "balance_profile",
    "consensus_time",
    "cycle_census",
    "cycle_graph",
    "frac_diffuse",
    "is_balanced",
    "k_exp",
    "k_ml",
    "k_ml_gap_approx",
    "k_ml_log",
    "ml_matrix",
    "ml_scalar",
    "moment_ledger",
    "parse_edge_list",
    "petersen_signings",
    "read_edge_list",
    "switch",
]
