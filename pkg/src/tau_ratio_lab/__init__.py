"""tau-ratio-lab: divisor-ratio sums, their Euler-product constants,
and empirical verification of the predicted asymptotics."""

from .arithmetic import (
    DivisorTable,
    Factorization,
    SmoothSequence,
    factorize,
    sieve_window,
    smooth_sequence,
    tau,
    totient_mu,
)
from .constants import (
    C_and_prime_sums,
    EulerProductResult,
    K_of_a,
    KappaBreakdown,
    beta,
    big_K,
    e_a,
    e_a_prime_power,
    kappa,
    kappa_closed,
    lemma10_prediction,
)
from .series import (
    E_prediction,
    F_a_truncated,
    SeriesEvaluation,
    identity_residual,
    phi_a,
)
from .sums import (
    CheckpointRow,
    ConvergenceReport,
    convergence_report,
    lemma12_consistency,
    sum_E_a,
    sum_S_a,
    sum_inv_phi_coprime,
)

__version__ = "0.1.0"
