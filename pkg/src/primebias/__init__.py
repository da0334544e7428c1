"""Empirical verification of a factorization-dependent bias in the average
error of prime counts over arithmetic progressions.

The library computes the averaged discrepancy of psi/theta/pi over moduli
q <= x/M coprime to a, compares it against the closed-form bias predictions,
and checks every supporting identity: certified prime-sum constants, exact
totient sums, the Dirichlet-series factorization with its contour residues,
the Perron kernel, and the shifted divisor-sum asymptotic.
"""

from .arith import (FactoredInteger, MultStats, RestrictedPart, euler_phi,
                    factorize, mult_stats, restricted_part, smooth_proportion,
                    theta_weight, von_mangoldt)
from .bias import (BiasReport, SweepFailure, TitchmarshReport, average_direct,
                   average_switched, bias_sweep, predict, titchmarsh_sum)
from .constants import (BiasPrediction, CertifiedConstant, c1, c3, c5,
                        mu_bias, mu_prime_bias)
from .errors import (CapacityError, DomainError, NumericError,
                     UnsupportedModeError)
from .mellin import (ComplexPoint, ResidueCheck, perron_kernel_check,
                     residue_check, s_factor, series_direct, z_factor)
from .sieve import (PrimeWindow, ProgressionQuery, TotientTable,
                    chebyshev_totals, li, pi_counts, progression_sum,
                    sieve_segment, totient_table)
from .totient_sums import (ResidualScan, TotientSumResult,
                           residual_scaling_scan, sum_inv_n_coprime,
                           sum_inv_phi, sum_n_over_phi, weighted_sum_inv_phi)
from .zetafn import euler_gamma, zeta_deriv_em, zeta_em

__version__ = "0.1.0"

__all__ = [
    "BiasPrediction", "BiasReport", "CapacityError", "CertifiedConstant",
    "ComplexPoint", "DomainError", "FactoredInteger", "MultStats",
    "NumericError", "PrimeWindow", "ProgressionQuery", "ResidualScan",
    "ResidueCheck", "RestrictedPart", "SweepFailure", "TitchmarshReport",
    "TotientSumResult", "TotientTable", "UnsupportedModeError",
    "average_direct", "average_switched", "bias_sweep", "c1", "c3", "c5",
    "chebyshev_totals", "euler_gamma", "euler_phi", "factorize", "li",
    "mu_bias", "mu_prime_bias", "mult_stats", "perron_kernel_check",
    "pi_counts", "predict", "progression_sum", "residual_scaling_scan",
    "residue_check", "restricted_part", "s_factor", "series_direct",
    "sieve_segment", "smooth_proportion", "sum_inv_n_coprime", "sum_inv_phi",
    "sum_n_over_phi", "theta_weight", "titchmarsh_sum", "totient_table",
    "von_mangoldt", "weighted_sum_inv_phi", "z_factor", "zeta_deriv_em",
    "zeta_em", "__version__",
]
