"""Assortment optimization bounds, clairvoyant revenue and prophet-inequality certificates."""

from .bounds import BoundChain, HeuristicReport, bound_chain, constrained_bounds, heuristic_suite
from .certificates import Certificate, certify, phi_search
from .choice import choice_prob, choice_probs, derive_vectors, expected_revenue, odds_ratios
from .clairvoyant import (
    ClairvoyantResult, clairvoyant, clairvoyant_exact, clairvoyant_mc, estimate_surplus,
    lai_robbins_bound, markov_tight_fixture, sequential_satisficing_revenue,
)
from .mnl import CardinalityOracle, brute_force_constrained, brute_force_taop, mnl_constrained, mnl_optimal, revenue_ordered
from .models import (
    GAM, LCMNL, MNL, RCS, AlphaMNL, Instance, MarkovChain, ModelError, NestedLogit, SamplerRUM,
    load_instance, save_instance,
)
from .personalization import CapResult, cap_brute, clairvoyant_cap_brute, log_ratio_bound, ptaop
from .pricing import PricingResult, mnl_pricing, unbounded_example

__version__ = "0.1.0"
