"""Toolkit for a cross-Kerr optomechanical circuit: coupling synthesis
from circuit parameters, photon-blockade statistics, mechanical cat
states, and driven Gaussian photon-phonon entanglement."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    CrossKerrError,
    SolverError,
    TruncationError,
    ValidityError,
)
from .circuit import (
    CircuitParams,
    EffectiveCouplings,
    IntermediateCouplings,
    ValidityReport,
    compute_effective,
    compute_intermediate,
    validity,
)
from .fockspace import (
    FockOperator,
    SpaceSpec,
    hamiltonian_driven,
    hamiltonian_lab,
    ladder,
    number,
)
from .lindblad import (
    DensityMatrix,
    DriveAndBath,
    Liouvillian,
    PropagationResult,
    classify,
    drive_from_power,
    gn0,
    liouvillian,
    liouvillian_spectral_gap,
    propagate,
    steady_state,
    thermal_occupation,
)
from .analytic import (
    PhotonProbabilities,
    PolaronSpectrum,
    franck_condon,
    g2_closed_form,
    g2_perturbative,
    g3_closed_form,
    g3_perturbative,
    photon_probabilities,
)
from .catgen import (
    CatSpec,
    NegativityTrajectory,
    WignerGrid,
    cat_state,
    coherent,
    evolve_closed,
    negativity_trajectory,
    state_fidelity,
    wigner,
    wigner_negativity,
)
from .gaussian import (
    CovarianceSolution,
    MeanField,
    StabilityReport,
    SweepPoint,
    diffusion_matrix,
    drift_matrix,
    entanglement_sweep,
    log_negativity,
    lyapunov_solve,
    mean_field,
    physicality_defect,
    routh_hurwitz,
)
from .presets import PRESETS, Preset, default_circuit, get_preset

__all__ = [
    "__version__",
    "CrossKerrError",
    "ConfigError",
    "SolverError",
    "TruncationError",
    "ValidityError",
    "CircuitParams",
    "IntermediateCouplings",
    "EffectiveCouplings",
    "ValidityReport",
    "compute_intermediate",
    "compute_effective",
    "validity",
    "SpaceSpec",
    "FockOperator",
    "ladder",
    "number",
    "hamiltonian_lab",
    "hamiltonian_driven",
    "DriveAndBath",
    "DensityMatrix",
    "Liouvillian",
    "PropagationResult",
    "liouvillian",
    "liouvillian_spectral_gap",
    "steady_state",
    "propagate",
    "gn0",
    "classify",
    "thermal_occupation",
    "drive_from_power",
    "PolaronSpectrum",
    "PhotonProbabilities",
    "franck_condon",
    "photon_probabilities",
    "g2_perturbative",
    "g3_perturbative",
    "g2_closed_form",
    "g3_closed_form",
    "CatSpec",
    "WignerGrid",
    "NegativityTrajectory",
    "coherent",
    "evolve_closed",
    "cat_state",
    "state_fidelity",
    "wigner",
    "wigner_negativity",
    "negativity_trajectory",
    "MeanField",
    "StabilityReport",
    "CovarianceSolution",
    "SweepPoint",
    "mean_field",
    "drift_matrix",
    "diffusion_matrix",
    "routh_hurwitz",
    "lyapunov_solve",
    "physicality_defect",
    "log_negativity",
    "entanglement_sweep",
    "Preset",
    "PRESETS",
    "get_preset",
    "default_circuit",
]
