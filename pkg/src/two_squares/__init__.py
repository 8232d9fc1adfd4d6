"""Exact counts, moment sums, and heuristic predictions for integers of
the form n = a^2 + p^2 with p prime and a a positive integer."""

__version__ = "0.1.0"

from .errors import CapabilityError, InputError, InvariantError
from .heuristics import (
    Constants,
    CrossoverReport,
    compute_constants,
    crossover_scan,
    euler_product_c_kappa,
    f_R,
    gamma_fn,
    heuristic_pmf,
    predict,
    psi_r,
    psi_star,
)
from .lemmas import SieveContext, build_context, nu, verify_ell_bruteforce, verify_nu_bruteforce
from .primes import (
    FactorizationSegment,
    PrimeTable,
    factorize_segment,
    is_prime,
    omega_star,
    primes_up_to,
)
from .reps import Representation, compose, enumerate_primitive_reps, r0_star, r1_of
from .sieve import SegmentTally, TallyReport, pair_sieve
from .stats import (
    AsymptoticComparison,
    compare_pi_N,
    daniel_ratio,
    gcd_defect_check,
    keysums_count,
    main_contrib_fraction,
    n_r_table,
    pi_N_histogram,
)

__all__ = [
    "AsymptoticComparison",
    "CapabilityError",
    "Constants",
    "CrossoverReport",
    "FactorizationSegment",
    "InputError",
    "InvariantError",
    "PrimeTable",
    "Representation",
    "SegmentTally",
    "SieveContext",
    "TallyReport",
    "build_context",
    "compare_pi_N",
    "compose",
    "compute_constants",
    "crossover_scan",
    "daniel_ratio",
    "enumerate_primitive_reps",
    "euler_product_c_kappa",
    "f_R",
    "factorize_segment",
    "gamma_fn",
    "gcd_defect_check",
    "heuristic_pmf",
    "is_prime",
    "keysums_count",
    "main_contrib_fraction",
    "n_r_table",
    "nu",
    "omega_star",
    "pair_sieve",
    "pi_N_histogram",
    "predict",
    "primes_up_to",
    "psi_r",
    "psi_star",
    "r0_star",
    "r1_of",
    "verify_ell_bruteforce",
    "verify_nu_bruteforce",
]
