"""Quantum pricing engine for single-asset autocallable options.

Exact statevector simulation of the pricing circuit, iterative amplitude
estimation on top of it, four classical reference models, and a T-depth
resource model.
"""

from .circuit import (
    AmplitudeMapping,
    PricingCircuit,
    QuantizedModel,
    RegisterLayout,
    build_pricing_circuit,
    derive_mapping,
    fit_format,
    log_return_increment,
    post_process,
)
from .contracts import AutocallableContract, BinaryOption, FixedPointFormat
from .errors import (
    CapacityError,
    ConfigError,
    MappingError,
    NumericalError,
    PreconditionError,
    QAutocallError,
    StructuralError,
)
from .estimation import (
    EstimateResult,
    IqaeConfig,
    bernoulli_circuit,
    build_grover,
    exact_amplitude,
    iqae_estimate,
)
from .loading import (
    ExponentialPrepSpec,
    GaussianGridSpec,
    exp_angles,
    gaussian_amplitudes,
    integrate_compare,
    integration_amplitude,
    prepare_exponential_full,
    prepare_exponential_partial,
)
from .oracles import (
    McResult,
    PathOutcome,
    closed_form_discretized,
    closed_form_quantized,
    mc_price,
    mc_price_discretized,
    payoff_of_path,
)
from .resources import (
    QSP_BASELINE_T_DEPTH,
    BlockDepths,
    ResourceParams,
    TDepthReport,
    block_depths,
    d_amplitude_loading,
    d_arith,
    d_gaussian,
    d_total,
    solve_truncation,
)
from .simulator import (
    Classical,
    Condition,
    Inject,
    PhaseOracle,
    QubitRegister,
    Ry,
    Statevector,
    X,
    allocate,
    apply_classical,
    inject_amplitudes,
    invert,
    probability,
    sample,
)

__version__ = "0.1.0"
