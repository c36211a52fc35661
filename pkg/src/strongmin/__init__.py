"""Predimension, closures, amalgamation and definability on finite structures."""
from .core import Flavor, Structure, automorphisms, canon, embeddings, load, parse, serialize
from .predim import check_flat, delta, dim, in_K0, independence, lines
from .closure import acl_trace, icl, is_dclosed, is_strong
from .pairs import (GoodPair, MuFunction, chi, enumerate_good_pairs, extended_base, find_base, in_Lmu,
                    is_primitive, load_mu, make_pair, mu_triples, parse_mu)
from .amalgam import Demand, alpha_demand, build_generic, free_amalgam
from .decomp import determines, flowers_and_bouquet, linear_decompose, reorder, tree_decompose
from .definability import classify_dclstar, finite_codes, orbit_report, quasigroup_experiment, verify_fixture

__all__ = [
    "Flavor",
    "Structure",
    "automorphisms",
    "canon",
    "embeddings",
    "load",
    "parse",
    "serialize",
    "check_flat",
    "delta",
    "dim",
    "in_K0",
    "independence",
    "lines",
    "acl_trace",
    "icl",
    "is_dclosed",
    "is_strong",
    "GoodPair",
    "MuFunction",
    "chi",
    "enumerate_good_pairs",
    "extended_base",
    "find_base",
    "in_Lmu",
    "is_primitive",
    "load_mu",
    "make_pair",
    "mu_triples",
    "parse_mu",
    "Demand",
    "alpha_demand",
    "build_generic",
    "free_amalgam",
    "determines",
    "flowers_and_bouquet",
    "linear_decompose",
    "reorder",
    "tree_decompose",
    "classify_dclstar",
    "finite_codes",
    "orbit_report",
    "quasigroup_experiment",
    "verify_fixture",
]

__version__ = "0.1.0"
