"""Physical-layer security toolkit for two-tier Poisson networks with
full-duplex jamming receivers: closed-form connection/secrecy-outage
expressions, an independent Monte Carlo oracle, and secrecy-throughput
optimization over the FD-tier density.
"""

from .config import NetworkConfig, dbm_to_linear
from .analytic import (
    LambdaCoefficients,
    connection_probability_bound,
    connection_probability_exact,
    fd_connection_approx,
    hd_connection_approx,
    laplace_exponent_if,
    secrecy_outage_approx,
    secrecy_outage_exact,
    secrecy_outage_ma,
    secrecy_outage_ma_limit,
    threshold_beta_e,
    threshold_beta_t,
)
from .mathcore import (
    DerivedConstants,
    PartitionTable,
    c_alpha_n,
    exp_derivative,
    k_alpha_n,
    partitions,
    upsilon,
    xi_coefficient,
)
from .montecarlo import (
    NetworkRealization,
    ProbabilityEstimate,
    SimSettings,
    estimate_fd_connection,
    estimate_hd_connection,
    estimate_secrecy_outage,
    sample_network,
)
from .optimizer import (
    OptimizerConstants,
    QoSTargets,
    ThroughputSolution,
    feasibility,
    lambda_bounds,
    solve_optimal_density,
    stationarity_lhs,
    stationarity_root,
    throughput,
)

__version__ = "0.1.0"

__all__ = [
    "NetworkConfig", "dbm_to_linear",
    "LambdaCoefficients", "connection_probability_bound",
    "connection_probability_exact", "fd_connection_approx",
    "hd_connection_approx", "laplace_exponent_if", "secrecy_outage_approx",
    "secrecy_outage_exact", "secrecy_outage_ma", "secrecy_outage_ma_limit",
    "threshold_beta_e", "threshold_beta_t",
    "DerivedConstants", "PartitionTable", "c_alpha_n", "exp_derivative",
    "k_alpha_n", "partitions", "upsilon", "xi_coefficient",
    "NetworkRealization", "ProbabilityEstimate", "SimSettings",
    "estimate_fd_connection", "estimate_hd_connection",
    "estimate_secrecy_outage", "sample_network",
    "OptimizerConstants", "QoSTargets", "ThroughputSolution", "feasibility",
    "lambda_bounds", "solve_optimal_density", "stationarity_lhs",
    "stationarity_root", "throughput",
]
