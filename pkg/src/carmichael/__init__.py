"""Higher-order Carmichael numbers: verification and meet-in-the-middle discovery."""

__version__ = "0.1.0"

from .arith import FactoredNat, factor, parse_factorization  # noqa: E402
from .korselt import Verdict, check_order, frobenius_exponent, is_rigid, max_order  # noqa: E402
from .pool import expected_count, fecundity, fecundity_scan, prime_pool  # noqa: E402

__all__ = [
    "FactoredNat",
    "Verdict",
    "check_order",
    "expected_count",
    "factor",
    "fecundity",
    "fecundity_scan",
    "frobenius_exponent",
    "is_rigid",
    "max_order",
    "parse_factorization",
    "prime_pool",
]
