"""Stable matching of residents and couples to hospitals: checking,
binary-program modelling, exact search, generators, and reductions."""

from .instance import (
    Hospital,
    Instance,
    Matching,
    check_dual_market,
    check_master_list,
    parse_instance,
    parse_matching,
    serialize_instance,
    serialize_matching,
    split_components,
    validate_matching,
)
from .stability import (
    BlockingPair,
    blocking_pairs_bis,
    blocking_pairs_mm,
    count_blocking_pairs,
    is_stable_bis,
    is_stable_mm,
    verify_blocking_pair,
)
from .bruteforce import all_stable, enumerate_matchings, max_stable_bruteforce

__version__ = "0.1.0"

__all__ = [
    "Hospital",
    "Instance",
    "Matching",
    "BlockingPair",
    "parse_instance",
    "serialize_instance",
    "parse_matching",
    "serialize_matching",
    "validate_matching",
    "check_dual_market",
    "check_master_list",
    "split_components",
    "blocking_pairs_mm",
    "blocking_pairs_bis",
    "is_stable_mm",
    "is_stable_bis",
    "count_blocking_pairs",
    "verify_blocking_pair",
    "enumerate_matchings",
    "all_stable",
    "max_stable_bruteforce",
    "__version__",
]
