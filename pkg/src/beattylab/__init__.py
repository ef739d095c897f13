"""beattylab: exact-arithmetic experiments on primes p with prime floor(alpha*p + beta)."""

__version__ = "0.1.0"

from .certified import (CertifiedReal, PairCount, beatty_prime_pairs, floor_affine,
                        fractional_in, normalized_statistic)
from .congruence import (CongruenceQuery, DeviationRow, count_direct, count_mobius,
                         deviation_report, main_term)
from .diophantine import (ContinuedFraction, FareyUnion, HitsReport, SandwichReport,
                          best_convergent_denominator, continued_fraction, farey_union,
                          fractional_hits, fractional_hits_report, lemma1_set,
                          sandwich_check, scaling_preimage, scaling_preimage_bound)
from .errors import BeattyLabError, BoundaryAmbiguous, GuardViolation, ParameterError
from .experiment import (ExperimentConfig, ExceptionalReport, MonteCarloResult,
                         RatioReport, ScanRow, exceptional_fraction, integral_by_intervals,
                         integral_enclosure, integral_exact, integral_monte_carlo,
                         j_interval, lower_bound_ratio, sample_alphas, scan_alpha,
                         scan_svg)
from .intervals import IntervalSet
from .primes import (PrimeTable, factorize, is_prime, mobius, omega, sieve_primes,
                     squarefree_divisors)
from .selberg import (PairBoundReport, SieveBound, SieveContext, big_g,
                      eighth_root_ceil, normalizer, pair_bound_check, product_lower,
                      quadratic_form_value, selberg_upper_bound, selberg_weights,
                      sieve_context, sifted_count)

__all__ = [name for name in dir() if not name.startswith("_")]
