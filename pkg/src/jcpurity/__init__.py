"""Exact and resummed atomic purity in the resonant Jaynes-Cummings model."""
from . import kernels
from .design import DesignResult, cauchy_schwarz_gap, design_distribution, phase_sensitivity
from .dynamics import (
    EXCITED,
    AtomAmplitudes,
    AtomDensity,
    FieldDensity,
    JointState,
    atom_density,
    atom_density_curve,
    entropy,
    evolve,
    field_density,
    field_purity,
    half_revival_time,
    initial_joint,
    mixed_phase_purity,
    phase_averaged_density,
    predicted_disentangled,
    product_fidelity,
    purity,
    revival_time,
)
from .errors import (
    ConfigurationError,
    DegenerateState,
    EmptyDesign,
    InvalidDistribution,
    InvalidModel,
    JCError,
    NormalizationError,
    NumericalFailure,
    NumericalInstability,
    PeakMismatch,
    QuadratureNoConvergence,
    TruncationLeak,
    UnnormalizableDesign,
    WindowViolation,
)
from .fock import (
    FieldState,
    FieldStats,
    cat_state,
    coherent_state,
    custom_state,
    fock_state,
    gaussian_state,
    read_state_table,
    squeezed_coherent_state,
    stats,
    write_state_table,
)
from .resummation import (
    Family,
    ResumModel,
    ValidityReport,
    ValidityWarning,
    coherence_approx,
    f_nu_quadrature,
    half_revival_purity,
    purity_resummed,
    series_S,
    series_Sc_Ss,
    validity,
)
from .scan import COLUMNS, ScanResult, read_csv, run_scan, validity_flags, write_csv

__version__ = "0.1.0"
