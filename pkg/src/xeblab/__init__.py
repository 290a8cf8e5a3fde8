"""xeblab: exact statevector experiments for linear cross-entropy benchmarking.

Simulate small random circuits exactly, score samples with linear XEB,
verify XHOG, spoof it with the greedy top-k strategy, convert XHOG solvers
into probability estimators and measure their MSE gain, and check the
supporting distributional claims (exponential output-probability law,
mixture moments, KL/Pinsker sample complexity).
"""

from .analysis import (
    DivergenceReport,
    FitReport,
    MomentReport,
    empirical_distinguishability,
    kl_uniform_vs_xhog,
    ks_distance_exp1,
    pooled_rescaled_probabilities,
    porter_thomas_fit,
    xeb_moment_check,
)
from .bits import as_index, bits_to_index, index_to_bits
from .circuit import (
    Chain1D,
    Circuit,
    CircuitDistribution,
    Gate,
    Grid2D,
    append_not_mask,
    final_not_mask,
    haar_unitaries,
    parse_circuit,
    sample_circuit,
    serialize_circuit,
)
from .errors import (
    ConfigError,
    DomainError,
    ParseError,
    ResourceLimitError,
    XebLabError,
)
from .estimators import (
    DepolarizingSolver,
    EstimatorTrial,
    FeynmanEstimator,
    MseBenchmark,
    ReductionEstimator,
    TopKSolver,
    UniformSolver,
    exact_estimator,
    feynman_path_amplitude,
    feynman_path_estimator,
    reduction_estimator,
    run_mse_benchmark,
    trivial_estimator,
)
from .samplers import (
    NoiseModel,
    SampleSet,
    parse_samples,
    sample_depolarizing,
    sample_ideal,
    sample_top_k,
    sample_uniform,
    serialize_samples,
)
from .simulator import (
    DEFAULT_MAX_QUBITS,
    OutputDistribution,
    StateVector,
    amplitude,
    full_distribution,
    output_probability,
    read_distribution,
    simulate,
    write_distribution,
)
from .xeb import (
    XebReport,
    check_xhog,
    chebyshev_success_bound,
    required_k,
    xeb_score,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
